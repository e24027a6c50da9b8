#include <doctest.h>

#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/mz_analysis.hpp"
#include "latrec/rng.hpp"
#include "latrec/solver.hpp"

using namespace latrec;

namespace {

CoefficientVector random_coeffs(Rng& rng, std::size_t n) {
  CoefficientVector a(static_cast<Eigen::Index>(n));
  for (auto& x : a) x = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  return a;
}

double weighted_residual(const SystemOperator& op, const std::vector<double>& w, const CoefficientVector& a,
                         const ValueVector& f) {
  const ValueVector r = op.forward(a) - f;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) s += w[static_cast<std::size_t>(i)] * std::norm(r[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("full reconstructing lattice returns the planted coefficients") {
  Rng rng(1);
  const auto set = hyperbolic_cross(3, 0.5, 16.0);
  const auto lat = search_generator(set, 2);
  const auto plan = lattice_points(lat);
  const auto op = SystemOperator::lattice(lat, set);
  const auto a = random_coeffs(rng, set.size());
  const auto f = op.forward(a);
  const auto res = reconstruct(plan, set, f);
  CHECK(res.diagnostics.method == "lattice_adjoint");
  CHECK((res.coefficients - a).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((res.coefficients - op.adjoint(f) / static_cast<double>(lat.size())).cwiseAbs().maxCoeff() == 0.0);

  SolverConfig direct;
  direct.mode = SolveMode::direct_normal;
  const auto d = least_squares(op, plan.weights(), f, direct);
  CHECK((d.coefficients - a).cwiseAbs().maxCoeff() <= 1e-12);
  const auto it = least_squares(op, plan.weights(), f);
  CHECK((it.coefficients - a).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(it.diagnostics.iterations <= 2);
}

TEST_CASE("zero samples give zero coefficients") {
  const auto set = hyperbolic_cross(2, 0.5, 8.0);
  const auto plan = lattice_points(search_generator(set, 1));
  const auto op = SystemOperator::for_plan(plan, set);
  const ValueVector f = ValueVector::Zero(static_cast<Eigen::Index>(plan.size()));
  for (auto mode : {SolveMode::direct_normal, SolveMode::iterative_normal}) {
    SolverConfig cfg;
    cfg.mode = mode;
    CHECK(least_squares(op, plan.weights(), f, cfg).coefficients.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("subsampled lattice recovers planted coefficients") {
  Rng rng(2);
  const auto set = hyperbolic_cross(2, 0.5, 16.0);
  auto plan = std::make_shared<const SamplePlan>(lattice_points(search_generator(set, 3)));
  const auto rho = density_weights(*plan, set, set, SmoothnessWeight(1.5));
  const auto full_op = SystemOperator::lattice(*plan->lattice(), set);
  for (int trial = 0; trial < 10; ++trial) {
    const auto sel = random_subsample(plan, rho, 4 * set.size(), 100 + static_cast<std::uint64_t>(trial));
    const auto bounds = mz_constants(selection_operator(sel, set), sel.reweights);
    if (bounds.lower < 1e-3) continue;
    const auto a = random_coeffs(rng, set.size());
    const auto fall = full_op.forward(a);
    ValueVector f(static_cast<Eigen::Index>(sel.size()));
    for (std::size_t q = 0; q < sel.size(); ++q) f[static_cast<Eigen::Index>(q)] = fall[static_cast<Eigen::Index>(sel.indices[q])];
    SolverConfig direct;
    direct.mode = SolveMode::direct_normal;
    const auto res = reconstruct(sel, set, f, direct);
    CHECK((res.coefficients - a).norm() <= 1e-8 * (bounds.upper / bounds.lower) * a.norm());
    SolverConfig cg;
    cg.max_iterations = 500;
    const auto res2 = reconstruct(sel, set, f, cg);
    CHECK((res2.coefficients - a).norm() <= 1e-8 * (bounds.upper / bounds.lower) * a.norm());
  }
}

TEST_CASE("weighted residual is optimal and modes agree") {
  Rng rng(3);
  const auto set = hyperbolic_cross(2, 0.5, 8.0);
  const std::size_t n = 4 * set.size();
  std::vector<double> pts(2 * n), w(n);
  for (auto& x : pts) x = rng.uniform();
  for (auto& x : w) x = 0.5 + rng.uniform();
  const auto op = SystemOperator::dense(2, pts, set);
  ValueVector f(static_cast<Eigen::Index>(n));
  for (auto& x : f) x = Complex(rng.uniform(), rng.uniform());
  SolverConfig direct;
  direct.mode = SolveMode::direct_normal;
  const auto d = least_squares(op, w, f, direct);
  const double r0 = weighted_residual(op, w, d.coefficients, f);
  CHECK(d.diagnostics.residual == doctest::Approx(r0).epsilon(1e-12));
  for (int probe = 0; probe < 100; ++probe) {
    CoefficientVector delta = random_coeffs(rng, set.size());
    delta *= 1e-3 / delta.norm();
    CHECK(weighted_residual(op, w, d.coefficients + delta, f) >= r0);
  }
  const auto b = mz_constants(op, w);
  REQUIRE(b.upper / b.lower <= 10.0);
  SolverConfig cg;
  cg.max_iterations = 1000;
  cg.residual_tolerance = 1e-14;
  const auto it = least_squares(op, w, f, cg);
  CHECK(it.diagnostics.converged);
  CHECK((it.coefficients - d.coefficients).norm() <= 1e-7 * d.coefficients.norm());
}

TEST_CASE("rescaling all weights leaves the solution unchanged") {
  Rng rng(4);
  const auto set = hyperbolic_cross(3, 0.5, 6.0);
  const std::size_t n = 3 * set.size();
  std::vector<double> pts(3 * n), w(n), w2(n);
  for (auto& x : pts) x = rng.uniform();
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = rng.uniform();
    w2[i] = 7.5 * w[i];
  }
  auto plan = std::make_shared<const SamplePlan>(3, pts, w);
  const SamplePlan plan2(3, pts, w2);
  ValueVector f(static_cast<Eigen::Index>(n));
  for (auto& x : f) x = Complex(rng.uniform(), 0.0);
  SolverConfig direct;
  direct.mode = SolveMode::direct_normal;
  const auto a = reconstruct(*plan, set, f, direct).coefficients;
  const auto b = reconstruct(plan2, set, f, direct).coefficients;
  CHECK((a - b).norm() <= 1e-10 * a.norm());
}

TEST_CASE("singular systems") {
  const IndexSet set(1, {-1, 0, 1});
  const auto lat = Rank1Lattice({1}, 2);
  const auto op = SystemOperator::lattice(lat, set);
  SolverConfig direct;
  direct.mode = SolveMode::direct_normal;
  ValueVector f(2);
  f << Complex(1, 0), Complex(3, 0);
  const auto res = least_squares(op, std::vector<double>{0.5, 0.5}, f, direct);
  CHECK(res.diagnostics.method == "least_norm");
  CHECK_FALSE(res.diagnostics.warning.empty());
  CHECK(res.diagnostics.residual <= 1e-12);
  CHECK_THROWS_AS(least_squares(op, std::vector<double>{0.0, 0.0}, f, direct), SingularSystemError);
  SolverConfig bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(least_squares(op, std::vector<double>{0.5, 0.5}, f, bad), std::invalid_argument);
  CHECK_THROWS_AS(least_squares(op, std::vector<double>{0.5}, f), std::invalid_argument);
}

TEST_CASE("iteration cap is reported, not thrown") {
  Rng rng(5);
  const auto set = hyperbolic_cross(2, 0.5, 16.0);
  const std::size_t n = 2 * set.size();
  std::vector<double> pts(2 * n), w(n, 1.0 / n);
  for (auto& x : pts) x = rng.uniform();
  const auto op = SystemOperator::dense(2, pts, set);
  ValueVector f(static_cast<Eigen::Index>(n));
  for (auto& x : f) x = Complex(rng.uniform(), 0.0);
  const auto res = least_squares(op, w, f);
  CHECK(res.diagnostics.iterations == 10);
  CHECK_FALSE(res.diagnostics.converged);
  const auto j = nlohmann::json::parse(to_json(res.diagnostics));
  CHECK(j["iterations"].get<int>() == 10);
  CHECK(j["operator"].get<std::string>() == "dense");
}
