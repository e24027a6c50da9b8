#include <doctest.h>

#include <cmath>

#include "latrec/errors.hpp"
#include "latrec/mz_analysis.hpp"
#include "latrec/rng.hpp"
#include "latrec/subsampling.hpp"
#include "support/oracles.hpp"

using namespace latrec;

namespace {

struct Stage1 {
  IndexSet set;
  SubsampleSelection sel;
  SpectralBounds bounds;
};

Stage1 make_stage1(std::size_t card, std::uint64_t seed, double factor) {
  const SmoothnessWeight s(1.5);
  const auto mz = hyperbolic_cross(2, 0.5, 40.0);
  const auto set = select_largest_eigenvalues(mz, card, s);
  auto plan = std::make_shared<const SamplePlan>(lattice_points(search_generator(mz, 3)));
  const auto rho = density_weights(*plan, set, mz, s);
  const auto n = static_cast<std::size_t>(std::ceil(factor * card * std::log(static_cast<double>(card))));
  auto sel = random_subsample(plan, rho, n, seed);
  const auto b = mz_constants(selection_operator(sel, set), sel.reweights);
  return {set, std::move(sel), b};
}

SpectralBounds output_bounds(const SubsampleSelection& sel, const IndexSet& set) {
  const Eigen::MatrixXcd rows = oracle::dft_matrix(
      set.dimension(),
      [&] {
        std::vector<double> pts;
        for (auto i : sel.indices) pts.insert(pts.end(), sel.parent->point(i), sel.parent->point(i) + set.dimension());
        return pts;
      }(),
      [&] {
        std::vector<std::vector<std::int64_t>> f;
        for (std::size_t q = 0; q < set.size(); ++q) f.emplace_back(set[q].begin(), set[q].end());
        return f;
      }());
  const auto [lo, hi] = oracle::gram_extremes(rows, sel.reweights);
  return {lo, hi};
}

}  // namespace

TEST_CASE("weighted BSS keeps every row of an orthonormal basis") {
  const Eigen::MatrixXcd rows = Eigen::MatrixXcd::Identity(8, 8);
  const auto res = bss_weighted_rows(rows, 16.0, {1.0, 1.0});
  REQUIRE(res.rows.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(res.rows[i] == i);
    CHECK(res.s[i] > 0.0);
  }
}

TEST_CASE("weighted BSS on duplicated basis rows") {
  for (int m : {4, 16, 32}) {
    Eigen::MatrixXcd rows(2 * m, m);
    rows << Eigen::MatrixXcd::Identity(m, m) / std::sqrt(2.0), Eigen::MatrixXcd::Identity(m, m) / std::sqrt(2.0);
    const auto res = bss_weighted_rows(rows, 16.0, {1.0, 1.0});
    CHECK(res.rows.size() <= static_cast<std::size_t>(16 * m));
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
    for (std::size_t q = 0; q < res.rows.size(); ++q) {
      g += res.s[q] * rows.row(static_cast<Eigen::Index>(res.rows[q])).adjoint() * rows.row(static_cast<Eigen::Index>(res.rows[q]));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    CHECK(es.eigenvalues().minCoeff() >= 0.5 - 1e-12);
    for (double s : res.s) CHECK(s >= 0.0);
  }
}

TEST_CASE("weighted BSS preconditions") {
  const Eigen::MatrixXcd rows = Eigen::MatrixXcd::Identity(4, 4);
  CHECK_THROWS_AS(bss_weighted_rows(rows, 13.0, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(bss_weighted_rows(rows * 0.5, 16.0, {1.0, 1.0}), std::invalid_argument);
  Eigen::MatrixXcd deficient = rows;
  deficient.row(3).setZero();
  CHECK_THROWS_AS(bss_weighted_rows(deficient, 16.0, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("weighted BSS on a lattice stage-1 subsample with |I| = 64") {
  Stage1 st = make_stage1(64, 5, 4.0);
  for (std::uint64_t seed = 6; !(st.bounds.lower >= 0.5 && st.bounds.upper <= 1.5); ++seed) st = make_stage1(64, seed, 4.0);
  const SpectralBounds ab{1.0, 1.0};
  const auto out = bss_subsample(st.sel, st.set, 16.0, ab);
  CHECK(out.size() <= 16 * 64);
  CHECK(stage_tag(out.stage) == "bss_weighted");
  const auto b = output_bounds(out, st.set);
  CHECK(b.lower >= 0.5);
  CHECK(b.upper <= 1.5 * bss_upper_factor(16.0, kappa(1.0, 1.0)));
  for (std::size_t q = 0; q < out.size(); ++q) {
    const double expect = st.sel.parent->weights()[out.indices[q]] * out.s[q] / (st.sel.size() * out.rho[q]);
    CHECK(out.reweights[q] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("plain BSS lower constant, cardinality and reweights") {
  for (double b : {2.0, 4.0}) {
    for (std::size_t card : {8u, 32u, 64u}) {
      const Stage1 st = make_stage1(card, 40 + card, 2.0);
      const auto out = plain_bss_subsample(st.sel, st.set, b);
      CHECK(static_cast<double>(out.size()) <= std::ceil(b * card));
      CHECK(out.s.empty());
      const auto ob = output_bounds(out, st.set);
      CHECK(ob.lower >= plain_bss_lower_factor(b) * st.bounds.lower);
      for (std::size_t q = 0; q < out.size(); ++q) {
        const double expect = st.sel.parent->weights()[out.indices[q]] / (out.rho[q] * static_cast<double>(card));
        CHECK(out.reweights[q] == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
  CHECK(plain_bss_lower_factor(2.0) == doctest::Approx(1.0 / 1602.0).epsilon(1e-15));
}

TEST_CASE("plain BSS certifies the stronger internal bound") {
  const Stage1 st = make_stage1(48, 77, 3.0);
  const auto rows = frame_rows(st.sel, st.set);
  const auto res = bss_plain_rows(rows, 2.0);
  CHECK(res.lower_observed >= res.lower_guarantee * (1 - 1e-9));
  CHECK(res.lower_guarantee > plain_bss_lower_factor(2.0) * res.input_lower);
  CHECK(res.rows.size() <= 96);
  const auto again = bss_plain_rows(rows, 2.0);
  CHECK(again.rows == res.rows);
}

TEST_CASE("plain BSS small and infeasible cases") {
  const Eigen::MatrixXcd one = Eigen::MatrixXcd::Constant(3, 1, Complex(0.5, 0.0));
  const auto res = bss_plain_rows(one, 3.0);
  CHECK(res.rows.size() <= 3);
  CHECK(res.lower_observed > 0.0);
  CHECK_THROWS_AS(bss_plain_rows(one, 2.0), std::invalid_argument);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(10, 10);
  CHECK_THROWS_AS(bss_plain_rows(id, 1.05), std::invalid_argument);
}

TEST_CASE("plain BSS never picks a row with zero stage-1 weight") {
  Rng rng(4);
  const auto set = hyperbolic_cross(2, 0.5, 8.0);
  const std::size_t n = 200;
  std::vector<double> pts(2 * n), w(n);
  for (auto& x : pts) x = rng.uniform();
  for (std::size_t i = 0; i < n; ++i) w[i] = i % 3 == 0 ? 0.0 : 1.0 / n;
  auto plan = std::make_shared<const SamplePlan>(2, pts, w);
  SubsampleSelection sel;
  sel.parent = plan;
  for (std::size_t i = 0; i < n; ++i) {
    sel.indices.push_back(i);
    sel.reweights.push_back(w[i]);
    sel.rho.push_back(1.0 / n);
  }
  sel.stage = RandomStage{n, 0};
  const auto out = plain_bss_subsample(sel, set, 2.0);
  for (auto i : out.indices) CHECK(w[i] > 0.0);
}
