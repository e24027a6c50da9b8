#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "latrec/fourier.hpp"
#include "latrec/index_set.hpp"
#include "latrec/lattice.hpp"

namespace latrec {

/// Largest |I| for which Gram matrices are assembled densely.
inline constexpr std::size_t kDenseGramCap = 4096;

/// Extreme eigenvalues of a Hermitian matrix, negatives clamped to zero.
SpectralBounds hermitian_bounds(const Eigen::MatrixXcd& gram);

/// A = sigma_min(W^{1/2} L)^2 and B = sigma_max(W^{1/2} L)^2 from the
/// eigenvalues of L^* W L. Throws ResourceLimitError above kDenseGramCap.
SpectralBounds mz_constants(const SamplePlan& plan, const IndexSet& set);
SpectralBounds mz_constants(const SystemOperator& op, std::span<const double> weights);

struct IterativeBounds {
  SpectralBounds bounds;
  bool converged = false;
  int iterations = 0;
};

/// Lanczos with full reorthogonalization on apply_normal, started from a
/// seeded random vector. Ritz values bound the spectrum from inside, so
/// `upper` never exceeds the true B and `lower` never falls below the true A;
/// the iteration stops once both residual bounds are within tol (relative;
/// absolute for a numerically vanishing A).
IterativeBounds estimate_bounds_iterative(const SystemOperator& op, std::span<const double> weights, double tol,
                                          std::uint64_t seed = 0, int max_iterations = 0);

/// Returns A when max |L^*WL - A Id| <= tol with A the mean diagonal entry,
/// i.e. when the weighted points integrate every g * conj(h), g, h in the
/// span, exactly up to the factor A.
std::optional<double> quadrature_exactness(const SamplePlan& plan, const IndexSet& set, double tol = 1e-8);
std::optional<double> quadrature_exactness(const Eigen::MatrixXcd& gram, double tol = 1e-8);

/// JSON object with A, B, B/A, the exactness flag and sizes.
std::string mz_report_json(const SamplePlan& plan, const IndexSet& set, double tol = 1e-8);

}  // namespace latrec
