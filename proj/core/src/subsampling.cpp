#include "latrec/subsampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/rng.hpp"

namespace latrec {

DensityWeights density_weights(const SamplePlan& plan, const IndexSet& set, const IndexSet& mz_set,
                               SmoothnessWeight s) {
  if (!set.is_subset_of(mz_set)) throw std::invalid_argument("density_weights: I must be a subset of I_MZ");
  const auto& w = plan.weights();
  double wsum = 0.0;
  for (double x : w) wsum += x;
  if (!(wsum > 0.0)) throw std::invalid_argument("density_weights: all parent weights are zero");

  // |eta_k(x)| = 1 for exponentials, so N_I and T do not depend on x.
  const double christoffel = static_cast<double>(set.size());
  double tail = 0.0;
  for (std::size_t q = 0; q < mz_set.size(); ++q) {
    if (!set.contains(mz_set[q])) tail += eigenvalue(mz_set[q], s);
  }

  const double n_sum = christoffel * wsum;
  const double t_sum = tail * wsum;
  const bool with_tail = t_sum > 0.0;
  const double scale = with_tail ? 1.0 / 3.0 : 0.5;

  DensityWeights out;
  out.rho.resize(w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double r = w[i] * christoffel / n_sum + w[i] / wsum;
    if (with_tail) r += w[i] * tail / t_sum;
    out.rho[i] = scale * r;
    total += out.rho[i];
  }
  // rounding leaves the sum within a few ulps of one; fold that back in
  for (double& r : out.rho) r /= total;
  return out;
}

std::size_t random_subsample_size(double lower, double upper, double c, std::size_t card, double t) {
  if (!(lower > 0.0)) throw std::invalid_argument("random_subsample_size: A must be positive");
  if (!(upper >= lower)) throw std::invalid_argument("random_subsample_size: need B >= A");
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("random_subsample_size: C must lie in (0, 1]");
  if (card == 0) throw std::invalid_argument("random_subsample_size: |I| must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("random_subsample_size: t must be positive");
  const double n = 12.0 * upper / (lower * c) * static_cast<double>(card) * (std::log(static_cast<double>(card)) + t);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(n)));
}

AliasTable::AliasTable(const std::vector<double>& probabilities) {
  const std::size_t n = probabilities.size();
  if (n == 0) throw std::invalid_argument("AliasTable: empty distribution");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("AliasTable: invalid probability");
    sum += p;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("AliasTable: probabilities sum to zero");

  prob_.assign(n, 0.0);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = probabilities[i] * static_cast<double>(n) / sum;
    alias_[i] = i;
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t l = small.back();
    small.pop_back();
    const std::size_t g = large.back();
    prob_[l] = scaled[l];
    alias_[l] = g;
    scaled[g] = (scaled[g] + scaled[l]) - 1.0;
    if (scaled[g] < 1.0) {
      large.pop_back();
      small.push_back(g);
    }
  }
  for (auto i : large) prob_[i] = 1.0;
  // leftovers in `small` are rounding residue
  for (auto i : small) prob_[i] = probabilities[i] > 0.0 ? 1.0 : 0.0;
}

std::string stage_tag(const Stage& stage) {
  switch (stage.index()) {
    case 0: return "random";
    case 1: return "bss_weighted";
    default: return "plain_bss";
  }
}

SubsampleSelection random_subsample(std::shared_ptr<const SamplePlan> plan, const DensityWeights& rho, std::size_t n,
                                    std::uint64_t seed) {
  if (!plan) throw std::invalid_argument("random_subsample: null plan");
  if (n == 0) throw std::invalid_argument("random_subsample: n must be positive");
  if (rho.rho.size() != plan->size()) throw std::invalid_argument("random_subsample: density length mismatch");

  AliasTable table(rho.rho);
  Rng rng = Rng::stream(seed, {0x73746731ULL});
  SubsampleSelection sel;
  sel.indices.reserve(n);
  sel.reweights.reserve(n);
  sel.rho.reserve(n);
  const auto& w = plan->weights();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = table.sample(rng);
    const double r = rho.rho[i];
    if (!(r > 0.0)) throw std::logic_error("random_subsample: drew a point of zero density");
    sel.indices.push_back(i);
    sel.reweights.push_back(w[i] / (static_cast<double>(n) * r));
    sel.rho.push_back(r);
  }
  sel.parent = std::move(plan);
  sel.stage = RandomStage{n, seed};
  return sel;
}

double kappa(double lower, double upper) {
  if (!(lower > 0.0) || !(upper >= lower)) throw std::invalid_argument("kappa: need B >= A > 0");
  const double c = 1.5 * upper / lower + 0.5;
  return c + std::sqrt(c * c - 1.0);
}

SystemOperator selection_operator(const SubsampleSelection& sel, const IndexSet& set) {
  if (!sel.parent) throw std::invalid_argument("selection_operator: selection has no parent");
  const SamplePlan& plan = *sel.parent;
  if (plan.lattice()) return SystemOperator::lattice(*plan.lattice(), set, sel.indices);
  const auto d = static_cast<std::size_t>(plan.dimension());
  std::vector<double> pts;
  pts.reserve(sel.indices.size() * d);
  for (auto i : sel.indices) pts.insert(pts.end(), plan.point(i), plan.point(i) + d);
  return SystemOperator::dense(plan.dimension(), std::move(pts), set);
}

Eigen::MatrixXcd frame_rows(const SubsampleSelection& sel, const IndexSet& set) {
  Eigen::MatrixXcd rows = selection_operator(sel, set).dense_matrix();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) rows.row(i) *= std::sqrt(sel.reweights[static_cast<std::size_t>(i)]);
  return rows;
}

double plain_bss_lower_factor(double b) { return std::pow(b - 1.0, 3) / (178.0 * (b + 1.0) * (b + 1.0)); }

double bss_upper_factor(double b, double kappa_value) {
  const double sb = std::sqrt(b);
  return 1.5 * (sb + 1.0) * (sb + 1.0) / ((sb - 1.0) * (sb - kappa_value));
}

namespace {

void require_random_stage(const SubsampleSelection& stage1, const char* who) {
  if (!std::holds_alternative<RandomStage>(stage1.stage)) {
    throw std::invalid_argument(std::string(who) + ": expects a random stage-1 selection");
  }
}

}  // namespace

SubsampleSelection bss_subsample(const SubsampleSelection& stage1, const IndexSet& set, double b,
                                 SpectralBounds bounds) {
  require_random_stage(stage1, "bss_subsample");
  const Eigen::MatrixXcd rows = frame_rows(stage1, set);
  const WeightedBssResult res = bss_weighted_rows(rows, b, bounds);
  SubsampleSelection out;
  out.parent = stage1.parent;
  out.stage = BssWeightedStage{b};
  for (std::size_t q = 0; q < res.rows.size(); ++q) {
    const std::size_t j = res.rows[q];
    out.indices.push_back(stage1.indices[j]);
    out.reweights.push_back(stage1.reweights[j] * res.s[q]);
    out.s.push_back(res.s[q]);
    out.rho.push_back(stage1.rho[j]);
  }
  return out;
}

SubsampleSelection plain_bss_subsample(const SubsampleSelection& stage1, const IndexSet& set, double b,
                                       const PlainBssOptions& opts) {
  require_random_stage(stage1, "plain_bss_subsample");
  const Eigen::MatrixXcd rows = frame_rows(stage1, set);
  const PlainBssResult res = bss_plain_rows(rows, b, opts);
  const double n = static_cast<double>(stage1.size());
  const double m = static_cast<double>(set.size());
  SubsampleSelection out;
  out.parent = stage1.parent;
  out.stage = PlainBssStage{b};
  for (auto j : res.rows) {
    out.indices.push_back(stage1.indices[j]);
    out.reweights.push_back(stage1.reweights[j] * n / m);
    out.rho.push_back(stage1.rho[j]);
  }
  return out;
}

void write_selection_csv(std::ostream& os, const SubsampleSelection& sel) {
  const std::string tag = stage_tag(sel.stage);
  os << "row,reweight,stage,s\n";
  char buf[64];
  for (std::size_t q = 0; q < sel.size(); ++q) {
    std::snprintf(buf, sizeof buf, "%.17g", sel.reweights[q]);
    os << sel.indices[q] << ',' << buf << ',' << tag << ',';
    if (!sel.s.empty()) {
      std::snprintf(buf, sizeof buf, "%.17g", sel.s[q]);
      os << buf;
    }
    os << '\n';
  }
}

std::string selection_sidecar_json(const SubsampleSelection& sel) {
  nlohmann::ordered_json j;
  j["stage"] = stage_tag(sel.stage);
  j["size"] = sel.size();
  if (sel.parent) j["parent_size"] = sel.parent->size();
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, RandomStage>) {
          j["n"] = st.n;
          j["seed"] = st.seed;
        } else {
          j["b"] = st.b;
        }
      },
      sel.stage);
  return j.dump(2);
}

}  // namespace latrec
