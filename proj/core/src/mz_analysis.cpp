#include "latrec/mz_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/rng.hpp"

namespace latrec {

namespace {

void check_cap(std::size_t card) {
  if (card > kDenseGramCap) {
    throw ResourceLimitError("dense Gram assembly limited to |I| <= " + std::to_string(kDenseGramCap) +
                             "; use estimate_bounds_iterative");
  }
}

}  // namespace

SpectralBounds hermitian_bounds(const Eigen::MatrixXcd& gram) {
  if (gram.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_bounds: eigensolver failed");
  const auto& ev = es.eigenvalues();
  return {std::max(0.0, ev.minCoeff()), std::max(0.0, ev.maxCoeff())};
}

SpectralBounds mz_constants(const SystemOperator& op, std::span<const double> weights) {
  check_cap(op.cols());
  return hermitian_bounds(op.gram(weights));
}

SpectralBounds mz_constants(const SamplePlan& plan, const IndexSet& set) {
  if (plan.size() == 0) throw std::invalid_argument("mz_constants: empty plan");
  check_cap(set.size());
  const auto op = SystemOperator::for_plan(plan, set);
  return mz_constants(op, plan.weights());
}

IterativeBounds estimate_bounds_iterative(const SystemOperator& op, std::span<const double> weights, double tol,
                                          std::uint64_t seed, int max_iterations) {
  if (!(tol > 0.0)) throw std::invalid_argument("estimate_bounds_iterative: tol must be positive");
  const auto n = static_cast<Eigen::Index>(op.cols());
  const int budget = max_iterations > 0 ? max_iterations : static_cast<int>(std::min<Eigen::Index>(n, 400));

  Rng rng = Rng::stream(seed, {0x6c616e63ULL});
  CoefficientVector q(n);
  for (Eigen::Index i = 0; i < n; ++i) q[i] = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  q.normalize();

  std::vector<CoefficientVector> basis;
  std::vector<double> alpha, beta;
  IterativeBounds result;
  Eigen::VectorXd ritz;

  for (int it = 0; it < budget; ++it) {
    basis.push_back(q);
    CoefficientVector w = op.apply_normal(weights, q);
    const double a = q.dot(w).real();
    alpha.push_back(a);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : basis) w -= v.dot(w) * v;
    }
    const double b = w.norm();

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    ritz = es.eigenvalues();
    const double theta_min = ritz[0], theta_max = ritz[k - 1];
    // residual norm of a Ritz pair: beta_k * |last component of its eigenvector|
    const double res_min = b * std::abs(es.eigenvectors()(k - 1, 0));
    const double res_max = b * std::abs(es.eigenvectors()(k - 1, k - 1));
    result.iterations = it + 1;
    result.bounds = {std::max(0.0, theta_min), std::max(0.0, theta_max)};

    const double scale = std::max(theta_max, std::numeric_limits<double>::min());
    const bool upper_ok = res_max <= tol * scale;
    const bool lower_ok = res_min <= tol * std::max(theta_min, 0.0) || theta_min <= tol * scale;
    if (b <= 1e-14 * scale || k == n || (upper_ok && lower_ok)) {
      result.converged = true;
      break;
    }
    beta.push_back(b);
    q = w / b;
  }
  // A lone Ritz value cannot see a kernel that the sampling of q missed.
  if (result.converged && n > 1 && alpha.size() == 1) result.converged = false;
  return result;
}

std::optional<double> quadrature_exactness(const Eigen::MatrixXcd& gram, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature_exactness: tol must be positive");
  if (gram.rows() == 0) return std::nullopt;
  const double a = gram.diagonal().real().mean();
  const Eigen::MatrixXcd diff = gram - a * Eigen::MatrixXcd::Identity(gram.rows(), gram.cols());
  if (diff.cwiseAbs().maxCoeff() <= tol && a > 0.0) return a;
  return std::nullopt;
}

std::optional<double> quadrature_exactness(const SamplePlan& plan, const IndexSet& set, double tol) {
  check_cap(set.size());
  const auto op = SystemOperator::for_plan(plan, set);
  return quadrature_exactness(op.gram(plan.weights()), tol);
}

std::string mz_report_json(const SamplePlan& plan, const IndexSet& set, double tol) {
  const auto op = SystemOperator::for_plan(plan, set);
  const Eigen::MatrixXcd g = op.gram(plan.weights());
  const auto bounds = hermitian_bounds(g);
  const auto exact = quadrature_exactness(g, tol);
  nlohmann::json j;
  j["A"] = bounds.lower;
  j["B"] = bounds.upper;
  j["ratio"] = bounds.lower > 0.0 ? nlohmann::json(bounds.upper / bounds.lower) : nlohmann::json(nullptr);
  j["exact_quadrature"] = exact.has_value();
  if (exact) j["quadrature_constant"] = *exact;
  j["points"] = plan.size();
  j["frequencies"] = set.size();
  j["dimension"] = set.dimension();
  j["operator"] = std::string(to_string(op.kind()));
  if (plan.lattice()) j["lattice_size"] = plan.lattice()->size();
  return j.dump(2);
}

}  // namespace latrec
