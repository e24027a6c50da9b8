#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/mz_analysis.hpp"
#include "latrec/rng.hpp"
#include "latrec/subsampling.hpp"
#include "support/oracles.hpp"

using namespace latrec;

namespace {

// Direct evaluation of the three-term density for the exponential basis.
std::vector<double> density_oracle(const std::vector<double>& w, const IndexSet& set, const IndexSet& mz,
                                   SmoothnessWeight s) {
  long double wsum = 0.0L;
  for (double x : w) wsum += x;
  long double tail = 0.0L;
  for (std::size_t q = 0; q < mz.size(); ++q) {
    if (!set.contains(mz[q])) tail += eigenvalue(mz[q], s);
  }
  const long double n = static_cast<long double>(set.size());
  std::vector<double> rho;
  for (double x : w) {
    long double r = x * n / (wsum * n) + x / wsum;
    if (tail > 0) r += x * tail / (wsum * tail);
    rho.push_back(static_cast<double>(r / (tail > 0 ? 3.0L : 2.0L)));
  }
  return rho;
}

std::shared_ptr<const SamplePlan> lattice_plan(const IndexSet& set, std::uint64_t seed) {
  return std::make_shared<const SamplePlan>(lattice_points(search_generator(set, seed)));
}

}  // namespace

TEST_CASE("density is uniform on a lattice and proportional to weights in general") {
  const SmoothnessWeight s(1.5);
  const auto mz = hyperbolic_cross(2, 0.5, 16.0);
  const auto set = select_largest_eigenvalues(mz, 20, s);
  const auto plan = lattice_plan(mz, 1);
  for (const auto* inner : {&set, &mz}) {
    const auto rho = density_weights(*plan, *inner, mz, s);
    double sum = 0.0;
    for (double r : rho.rho) {
      CHECK(r == doctest::Approx(1.0 / static_cast<double>(plan->size())).epsilon(1e-13));
      sum += r;
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
  const SamplePlan single(2, {0.3, 0.4}, {2.0});
  CHECK(density_weights(single, set, mz, s).rho == std::vector<double>{1.0});

  Rng rng(3);
  std::vector<double> pts(2 * 30), w(30);
  for (auto& x : pts) x = rng.uniform();
  for (auto& x : w) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
  const SamplePlan general(2, pts, w);
  const auto rho = density_weights(general, set, mz, s);
  const auto expect = density_oracle(w, set, mz, s);
  double wsum = 0.0;
  for (double x : w) wsum += x;
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(rho.rho[i] == doctest::Approx(expect[i]).epsilon(1e-13));
    CHECK(rho.rho[i] == doctest::Approx(w[i] / wsum).epsilon(1e-13));
    if (w[i] == 0.0) CHECK(rho.rho[i] == 0.0);
  }
  CHECK_THROWS_AS(density_weights(SamplePlan(2, {0.1, 0.1}, {0.0}), set, mz, s), std::invalid_argument);
  CHECK_THROWS_AS(density_weights(*plan, mz, set, s), std::invalid_argument);
}

TEST_CASE("random_subsample_size") {
  CHECK(random_subsample_size(1, 1, 1.0 / 3.0, 100, 1.0) == 20179);
  CHECK(random_subsample_size(1, 1, 1, 1, 1e-3) == 1);
  CHECK(random_subsample_size(1, 1, 1, 1, 0.5) == 6);
  CHECK_THROWS_AS(random_subsample_size(0, 1, 1, 10, 1), std::invalid_argument);
}

TEST_CASE("kappa") {
  CHECK(kappa(1, 1) == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-15));
  CHECK(kappa(1, 3) == doctest::Approx(5 + std::sqrt(24.0)).epsilon(1e-15));
  CHECK(kappa(1, 3) == doctest::Approx(9.8990).epsilon(1e-4));
  double prev = 0;
  for (double b = 1; b < 10; b += 0.5) {
    CHECK(kappa(1, b) > prev);
    prev = kappa(1, b);
  }
  CHECK(kappa(2.0, 2.0) >= 2 + std::sqrt(3.0) - 1e-15);
}

TEST_CASE("alias table matches target frequencies") {
  const std::vector<double> p{0.1, 0.0, 0.5, 0.15, 0.25};
  AliasTable t(p);
  Rng rng(17);
  std::vector<int> counts(p.size());
  const int n = 200000;
  for (int i = 0; i < n; ++i) ++counts[t.sample(rng)];
  CHECK(counts[1] == 0);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(counts[i] / double(n) == doctest::Approx(p[i]).epsilon(0.02));
}

TEST_CASE("random_subsample basics") {
  const SamplePlan one(1, {0.25}, {0.7});
  auto plan1 = std::make_shared<const SamplePlan>(one);
  const DensityWeights rho1{{1.0}};
  const auto sel = random_subsample(plan1, rho1, 9, 4);
  CHECK(sel.size() == 9);
  double acc = 0.0;
  for (std::size_t q = 0; q < 9; ++q) {
    CHECK(sel.indices[q] == 0);
    acc += sel.reweights[q];
  }
  CHECK(acc == doctest::Approx(0.7).epsilon(1e-15));

  const auto set = hyperbolic_cross(2, 0.5, 8.0);
  const auto plan = lattice_plan(set, 2);
  const auto rho = density_weights(*plan, set, set, SmoothnessWeight(1.5));
  const auto a = random_subsample(plan, rho, 100, 77);
  const auto b = random_subsample(plan, rho, 100, 77);
  CHECK(a.indices == b.indices);
  CHECK(a.reweights == b.reweights);
  for (std::size_t q = 0; q < a.size(); ++q) {
    CHECK(a.reweights[q] == doctest::Approx(plan->weights()[a.indices[q]] / (100 * rho.rho[a.indices[q]])).epsilon(1e-15));
  }
  CHECK(stage_tag(a.stage) == "random");
  CHECK_THROWS_AS(random_subsample(plan, rho, 0, 1), std::invalid_argument);
}

TEST_CASE("stage-1 estimator is unbiased") {
  Rng rng(31);
  const auto set = hyperbolic_cross(1, 1.0, 3.0);
  const auto plan = lattice_plan(set, 5);
  const auto rho = density_weights(*plan, set, set, SmoothnessWeight(1.0));
  CoefficientVector a(static_cast<Eigen::Index>(set.size()));
  for (auto& x : a) x = Complex(rng.uniform() - 0.5, rng.uniform() - 0.5);
  const auto vals = SystemOperator::lattice(*plan->lattice(), set).forward(a);
  const double exact = a.squaredNorm();  // exact quadrature
  const int trials = 100000;
  long double mean = 0.0L;
  for (int t = 0; t < trials; ++t) {
    const auto sel = random_subsample(plan, rho, 4, static_cast<std::uint64_t>(t));
    double s = 0.0;
    for (std::size_t q = 0; q < sel.size(); ++q) s += sel.reweights[q] * std::norm(vals[static_cast<Eigen::Index>(sel.indices[q])]);
    mean += s;
  }
  mean /= trials;
  CHECK(static_cast<double>(mean) == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("stage-1 lower constant at the prescribed size") {
  int ok = 0, total = 0;
  for (std::size_t card_target : {32u, 64u}) {
    const auto mz = hyperbolic_cross(2, 0.5, card_target == 32 ? 12.0 : 24.0);
    const auto set = select_largest_eigenvalues(mz, card_target, SmoothnessWeight(1.5));
    const auto plan = lattice_plan(mz, 9);
    const auto rho = density_weights(*plan, set, mz, SmoothnessWeight(1.5));
    const std::size_t n = random_subsample_size(1, 1, 1.0 / 3.0, set.size(), 1.0);
    for (int t = 0; t < 20; ++t) {
      const auto sel = random_subsample(plan, rho, n, 1000 + static_cast<std::uint64_t>(t));
      const auto b = mz_constants(selection_operator(sel, set), sel.reweights);
      ok += b.lower >= 0.5;
      ++total;
    }
  }
  CHECK(ok >= 0.73 * total);
}

TEST_CASE("selection serialization") {
  const auto set = hyperbolic_cross(1, 1.0, 3.0);
  const auto plan = lattice_plan(set, 1);
  const auto rho = density_weights(*plan, set, set, SmoothnessWeight(1.0));
  const auto sel = random_subsample(plan, rho, 3, 12);
  std::ostringstream os;
  write_selection_csv(os, sel);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "row,reweight,stage,s");
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(line.find(",random,") != std::string::npos);
    CHECK(line.back() == ',');
  }
  CHECK(rows == 3);
  const auto j = nlohmann::json::parse(selection_sidecar_json(sel));
  CHECK(j["seed"].get<std::uint64_t>() == 12);
  CHECK(j["n"].get<std::size_t>() == 3);
}
