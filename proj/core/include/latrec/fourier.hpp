#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "latrec/index_set.hpp"
#include "latrec/lattice.hpp"

namespace latrec {

using Complex = std::complex<double>;
/// Coefficients indexed by the frequencies of an IndexSet, in set order.
using CoefficientVector = Eigen::VectorXcd;
using ValueVector = Eigen::VectorXcd;

enum class OperatorKind { lattice_fft, dense };

std::string_view to_string(OperatorKind kind);

/// The matrix L with entries exp(2 pi i <k, x^i>) (rows: points, columns:
/// frequencies), realized either through one length-M FFT on a rank-1
/// lattice (optionally restricted to the rows listed in a mask, duplicates
/// allowed) or densely for arbitrary points.
///
/// Immutable; copies share state and every method is reentrant.
class SystemOperator {
 public:
  static SystemOperator lattice(const Rank1Lattice& lat, const IndexSet& set);
  static SystemOperator lattice(const Rank1Lattice& lat, const IndexSet& set, std::vector<std::size_t> row_mask);
  /// `points` is row-major n x d in [0,1)^d.
  static SystemOperator dense(int dim, std::vector<double> points, const IndexSet& set);
  /// Lattice operator when the plan carries its lattice, dense otherwise.
  static SystemOperator for_plan(const SamplePlan& plan, const IndexSet& set);

  OperatorKind kind() const;
  std::size_t rows() const;
  std::size_t cols() const;
  const IndexSet& index_set() const;
  /// Row mask of a masked lattice operator (empty otherwise).
  const std::vector<std::size_t>& row_mask() const;
  /// Lattice size M for lattice operators, 0 otherwise.
  std::int64_t lattice_size() const;

  ValueVector forward(const CoefficientVector& a) const;
  CoefficientVector adjoint(const ValueVector& f) const;
  /// L^* diag(weights) L a. Throws on a negative weight.
  CoefficientVector apply_normal(std::span<const double> weights, const CoefficientVector& a) const;

  /// Explicit rows() x cols() matrix; for checks and small instances.
  Eigen::MatrixXcd dense_matrix() const;
  /// L^* diag(weights) L. Lattice operators use one FFT of the weights.
  Eigen::MatrixXcd gram(std::span<const double> weights) const;

  struct Impl;

 private:
  explicit SystemOperator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace latrec
