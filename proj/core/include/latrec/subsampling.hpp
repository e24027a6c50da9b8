#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "latrec/fourier.hpp"
#include "latrec/index_set.hpp"
#include "latrec/lattice.hpp"

namespace latrec {

/// Probability vector over the points of a parent plan.
struct DensityWeights {
  std::vector<double> rho;
};

/// Importance density over the parent points, an equal mixture of three
/// terms: the discrete Christoffel function of I, the eigenvalue-weighted
/// tail over I_MZ \ I, and the parent weights. Each term is normalized by its
/// own weighted sum; an empty tail drops the second term. For the exponential
/// basis |eta_k| = 1 pointwise, so the first two terms reduce to omega_i up
/// to normalization.
DensityWeights density_weights(const SamplePlan& plan, const IndexSet& set, const IndexSet& mz_set,
                               SmoothnessWeight s);

/// ceil((12 B / (A C)) |I| (ln |I| + t)).
std::size_t random_subsample_size(double lower, double upper, double c, std::size_t card, double t);

/// Walker/Vose alias table; construction and sampling are deterministic.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& probabilities);
  template <class R>
  std::size_t sample(R& rng) const {
    const std::size_t col = static_cast<std::size_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[col] ? col : alias_[col];
  }
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

struct RandomStage {
  std::size_t n = 0;
  std::uint64_t seed = 0;
};
struct BssWeightedStage {
  double b = 0.0;
};
struct PlainBssStage {
  double b = 0.0;
};
using Stage = std::variant<RandomStage, BssWeightedStage, PlainBssStage>;

std::string stage_tag(const Stage& stage);

/// Rows of a parent plan (duplicates allowed) with per-row weights.
struct SubsampleSelection {
  std::shared_ptr<const SamplePlan> parent;
  std::vector<std::size_t> indices;
  std::vector<double> reweights;
  /// BSS weights s_i of the weighted variant; empty otherwise.
  std::vector<double> s;
  Stage stage;
  /// Stage-1 density values rho_i of the selected rows.
  std::vector<double> rho;

  std::size_t size() const { return indices.size(); }
};

/// n i.i.d. categorical draws by rho (duplicates kept), reweights
/// omega_i / (n rho_i).
SubsampleSelection random_subsample(std::shared_ptr<const SamplePlan> plan, const DensityWeights& rho, std::size_t n,
                                    std::uint64_t seed);

/// 3B/(2A) + 1/2 + sqrt((3B/(2A) + 1/2)^2 - 1).
double kappa(double lower, double upper);

/// Operator restricted to the selected rows, in selection order. Lattice
/// parents give a masked FFT operator, others a dense one.
SystemOperator selection_operator(const SubsampleSelection& sel, const IndexSet& set);

/// Rows sqrt(reweight_i) * (exp(2 pi i <k, x^i>))_k of a selection.
Eigen::MatrixXcd frame_rows(const SubsampleSelection& sel, const IndexSet& set);

struct WeightedBssResult {
  std::vector<std::size_t> rows;  // distinct, ascending
  std::vector<double> s;
};

/// Two-sided barrier greedy on the whitened rows for floor(b m) steps.
/// `bounds` are the constants (A, B) the input rows satisfy in the form
/// [A/2, 3B/2]; b must exceed kappa(A, B)^2. The returned s make
/// sum_i s_i r_i^* r_i >= A/2 and <= (3/2) B (sqrt b + 1)^2 / ((sqrt b - 1)(sqrt b - kappa)),
/// which is checked before returning (CertificateError otherwise).
WeightedBssResult bss_weighted_rows(const Eigen::MatrixXcd& rows, double b, SpectralBounds bounds);

struct PlainBssOptions {
  /// Slack in the barrier step; 1 is the tight choice.
  double slack = 1.25;
  /// Upper limit on Sherman-Morrison steps between exact refreshes.
  std::size_t max_block = 256;
};

struct PlainBssResult {
  std::vector<std::size_t> rows;  // ascending, a row may repeat
  double lower_guarantee = 0.0;   // certified lower constant relative to the input rows
  double lower_observed = 0.0;
  double input_lower = 0.0;
  std::size_t refreshes = 0;
  std::size_t rollbacks = 0;
};

/// Unweighted selection of at most floor(b m) rows whose sum, scaled by n/m,
/// keeps a lower frame bound: lower-barrier greedy on the whitened rows with
/// every row entering at weight n/m. b must exceed 1 + 1/m. The output
/// lower constant is checked against (b-1)^3/(178 (b+1)^2) times the input
/// lower constant (or `reference_lower` when given).
PlainBssResult bss_plain_rows(const Eigen::MatrixXcd& rows, double b, const PlainBssOptions& opts = {},
                              std::optional<double> reference_lower = std::nullopt);

/// Weighted BSS on a stage-1 selection; reweights omega_i s_i / (n rho_i).
SubsampleSelection bss_subsample(const SubsampleSelection& stage1, const IndexSet& set, double b,
                                 SpectralBounds bounds);

/// PlainBSS on a stage-1 selection; reweights omega_i / (rho_i |I|).
SubsampleSelection plain_bss_subsample(const SubsampleSelection& stage1, const IndexSet& set, double b,
                                       const PlainBssOptions& opts = {});

/// Lower constant guaranteed for PlainBSS relative to A.
double plain_bss_lower_factor(double b);
/// Upper constant guaranteed for weighted BSS relative to B.
double bss_upper_factor(double b, double kappa_value);

/// CSV: row,reweight,stage,s (s empty unless weighted BSS).
void write_selection_csv(std::ostream& os, const SubsampleSelection& sel);
/// JSON sidecar with the stage parameters and seed.
std::string selection_sidecar_json(const SubsampleSelection& sel);

}  // namespace latrec
