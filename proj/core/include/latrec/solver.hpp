#pragma once

#include <optional>
#include <span>
#include <string>

#include "latrec/fourier.hpp"
#include "latrec/lattice.hpp"
#include "latrec/subsampling.hpp"

namespace latrec {

enum class SolveMode { direct_normal, iterative_normal };

struct SolverConfig {
  int max_iterations = 10;
  double residual_tolerance = 1e-12;
  SolveMode mode = SolveMode::iterative_normal;
};

struct SolveDiagnostics {
  int iterations = 0;
  /// ||W^{1/2}(L a - f)||
  double residual = 0.0;
  /// Relative residual of the normal equations at exit.
  double normal_residual = 0.0;
  bool converged = false;
  double wall_seconds = 0.0;
  OperatorKind kind = OperatorKind::dense;
  std::string method;
  std::optional<double> condition;
  std::string warning;
};

std::string to_json(const SolveDiagnostics& diag);

struct LeastSquaresResult {
  CoefficientVector coefficients;
  SolveDiagnostics diagnostics;
};

/// Minimizes ||W^{1/2}(L a - f)|| over a.
///
/// Direct mode factors L^*WL (|I| <= 4096); a matrix that is not positive
/// definite falls back to the least-norm solution with a warning in the
/// diagnostics, and a zero matrix throws SingularSystemError. Iterative mode
/// runs conjugate gradients on the normal equations from zero and stops at
/// max_iterations or when the normal residual drops below
/// residual_tolerance relative to ||L^*W f||; hitting the cap is reported,
/// not thrown.
LeastSquaresResult least_squares(const SystemOperator& op, std::span<const double> weights,
                                 const ValueVector& samples, const SolverConfig& cfg = {},
                                 std::optional<SpectralBounds> bounds = std::nullopt);

/// Least squares on a plan with its own weights. A lattice plan whose
/// lattice reconstructs the set and whose weights are uniform is solved as
/// adjoint(f) / M.
LeastSquaresResult reconstruct(const SamplePlan& plan, const IndexSet& set, const ValueVector& samples,
                               const SolverConfig& cfg = {});

/// Least squares on a selection with W = diag(reweights); samples are in
/// selection order.
LeastSquaresResult reconstruct(const SubsampleSelection& sel, const IndexSet& set, const ValueVector& samples,
                               const SolverConfig& cfg = {});

}  // namespace latrec
