#include "latrec/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/mz_analysis.hpp"

namespace latrec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ValueVector weighted(std::span<const double> w, const ValueVector& f) {
  ValueVector out(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) out[i] = w[static_cast<std::size_t>(i)] * f[i];
  return out;
}

double weighted_residual(const SystemOperator& op, std::span<const double> w, const CoefficientVector& a,
                         const ValueVector& f) {
  const ValueVector r = op.forward(a) - f;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += w[static_cast<std::size_t>(i)] * std::norm(r[i]);
  return std::sqrt(acc);
}

CoefficientVector solve_direct(const SystemOperator& op, std::span<const double> w, const ValueVector& f,
                               SolveDiagnostics& diag) {
  if (op.cols() > kDenseGramCap) {
    throw ResourceLimitError("least_squares: direct mode limited to |I| <= " + std::to_string(kDenseGramCap));
  }
  const Eigen::MatrixXcd g = op.gram(w);
  const CoefficientVector rhs = op.adjoint(weighted(w, f));
  if (g.cwiseAbs().maxCoeff() == 0.0) throw SingularSystemError("least_squares: normal matrix is zero");
  diag.iterations = 1;
  diag.converged = true;

  Eigen::LLT<Eigen::MatrixXcd> llt(g);
  if (llt.info() == Eigen::Success) {
    const CoefficientVector a = llt.solve(rhs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() > 0.0) {
      diag.method = "cholesky";
      diag.normal_residual = rhs.norm() > 0.0 ? (g * a - rhs).norm() / rhs.norm() : 0.0;
      return a;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double cut = 1e-12 * lam.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) inv[i] = lam[i] > cut ? 1.0 / lam[i] : 0.0;
  const CoefficientVector a = es.eigenvectors() * (inv.asDiagonal() * (es.eigenvectors().adjoint() * rhs));
  diag.method = "least_norm";
  diag.warning = "normal matrix not positive definite; returned the least-norm solution";
  diag.normal_residual = rhs.norm() > 0.0 ? (g * a - rhs).norm() / rhs.norm() : 0.0;
  return a;
}

CoefficientVector solve_cg(const SystemOperator& op, std::span<const double> w, const ValueVector& f,
                           const SolverConfig& cfg, SolveDiagnostics& diag) {
  const auto n = static_cast<Eigen::Index>(op.cols());
  CoefficientVector a = CoefficientVector::Zero(n);
  const CoefficientVector rhs = op.adjoint(weighted(w, f));
  const double rhs_norm = rhs.norm();
  diag.method = "cg_normal";
  if (rhs_norm == 0.0) {
    diag.converged = true;
    return a;
  }
  CoefficientVector r = rhs;
  CoefficientVector p = r;
  double rr = r.squaredNorm();
  int it = 0;
  while (it < cfg.max_iterations && std::sqrt(rr) > cfg.residual_tolerance * rhs_norm) {
    const CoefficientVector np = op.apply_normal(w, p);
    const double pnp = std::real(p.dot(np));
    if (!(pnp > 0.0)) break;
    const double alpha = rr / pnp;
    a += alpha * p;
    r -= alpha * np;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++it;
  }
  diag.iterations = it;
  diag.normal_residual = std::sqrt(rr) / rhs_norm;
  diag.converged = diag.normal_residual <= cfg.residual_tolerance;
  return a;
}

}  // namespace

std::string to_json(const SolveDiagnostics& diag) {
  nlohmann::ordered_json j;
  j["iterations"] = diag.iterations;
  j["residual"] = diag.residual;
  j["normal_residual"] = diag.normal_residual;
  j["converged"] = diag.converged;
  j["wall_seconds"] = diag.wall_seconds;
  j["operator"] = to_string(diag.kind);
  j["method"] = diag.method;
  if (diag.condition) j["condition"] = *diag.condition;
  if (!diag.warning.empty()) j["warning"] = diag.warning;
  return j.dump(2);
}

LeastSquaresResult least_squares(const SystemOperator& op, std::span<const double> weights,
                                 const ValueVector& samples, const SolverConfig& cfg,
                                 std::optional<SpectralBounds> bounds) {
  if (cfg.max_iterations < 1) throw std::invalid_argument("least_squares: max_iterations must be >= 1");
  if (!(cfg.residual_tolerance >= 0.0)) throw std::invalid_argument("least_squares: negative tolerance");
  if (weights.size() != op.rows() || static_cast<std::size_t>(samples.size()) != op.rows()) {
    throw std::invalid_argument("least_squares: row count mismatch");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("least_squares: negative weight");
  }
  const auto t0 = Clock::now();
  LeastSquaresResult res;
  res.diagnostics.kind = op.kind();
  if (bounds && bounds->lower > 0.0) res.diagnostics.condition = bounds->upper / bounds->lower;
  res.coefficients = cfg.mode == SolveMode::direct_normal ? solve_direct(op, weights, samples, res.diagnostics)
                                                          : solve_cg(op, weights, samples, cfg, res.diagnostics);
  res.diagnostics.residual = weighted_residual(op, weights, res.coefficients, samples);
  res.diagnostics.wall_seconds = seconds_since(t0);
  return res;
}

LeastSquaresResult reconstruct(const SamplePlan& plan, const IndexSet& set, const ValueVector& samples,
                               const SolverConfig& cfg) {
  if (static_cast<std::size_t>(samples.size()) != plan.size()) {
    throw std::invalid_argument("reconstruct: sample count mismatch");
  }
  const auto& w = plan.weights();
  const bool uniform =
      !w.empty() && w.front() > 0.0 && std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
  if (plan.lattice() && uniform && is_reconstructing(*plan.lattice(), set)) {
    const auto t0 = Clock::now();
    const auto op = SystemOperator::lattice(*plan.lattice(), set);
    LeastSquaresResult res;
    // L^*WL = M w Id on a reconstructing lattice
    res.coefficients = op.adjoint(samples) / static_cast<double>(plan.lattice()->size());
    res.diagnostics.kind = op.kind();
    res.diagnostics.method = "lattice_adjoint";
    res.diagnostics.converged = true;
    res.diagnostics.condition = 1.0;
    res.diagnostics.residual = weighted_residual(op, w, res.coefficients, samples);
    res.diagnostics.wall_seconds = seconds_since(t0);
    return res;
  }
  return least_squares(SystemOperator::for_plan(plan, set), w, samples, cfg, plan.bounds());
}

LeastSquaresResult reconstruct(const SubsampleSelection& sel, const IndexSet& set, const ValueVector& samples,
                               const SolverConfig& cfg) {
  return least_squares(selection_operator(sel, set), sel.reweights, samples, cfg);
}

}  // namespace latrec
