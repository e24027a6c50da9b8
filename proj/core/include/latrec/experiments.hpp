#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "latrec/lattice.hpp"

namespace latrec {

enum class Strategy { full, random_sub, bss_sub, continuous_random };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

struct ExperimentConfig {
  int d = 5;
  double s = 1.5;
  double gamma = 0.5;
  std::vector<double> radii{2, 4, 8};
  std::vector<Strategy> strategies{Strategy::full, Strategy::random_sub, Strategy::continuous_random};
  double b = 2.0;
  std::uint64_t seed = 1;
  int repetitions = 1;
  std::uint64_t memory_cap_bytes = std::uint64_t{4} << 30;
  std::string output_dir = "out";
  /// Empty means <output_dir>/lattice_cache.
  std::string lattice_cache_dir;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Fields missing from the JSON keep the values already in `base`.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& cfg);

struct ReportRow {
  double radius = 0.0;
  std::size_t card = 0;
  Strategy strategy = Strategy::full;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::int64_t lattice_size = 0;
  std::size_t points = 0;
  double truncation = 0.0;
  double aliasing = 0.0;
  double total = 0.0;
  int iterations = 0;
  double setup_seconds = 0.0;
  double subsample_seconds = 0.0;
  double solve_seconds = 0.0;
  double bss_seconds = 0.0;
  /// Non-empty when the strategy was skipped, e.g. over the memory cap.
  std::string skipped;

  bool ran() const { return skipped.empty(); }
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct AssertionResult {
  std::string name;
  bool passed = true;
  std::string detail;
  friend bool operator==(const AssertionResult&, const AssertionResult&) = default;
};

struct ExperimentReport {
  int experiment = 1;
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<AssertionResult> assertions;

  bool all_passed() const;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Full lattice, random subsample of ceil(|I| ln |I|) lattice points and
/// the same number of uniform random points, each solved with at most 10
/// CG steps (the full lattice by its exact adjoint formula), on I = I_MZ =
/// hyperbolic cross for every radius.
ExperimentReport run_experiment_1(const ExperimentConfig& cfg);

/// As experiment 1, with the random subsample further reduced by PlainBSS
/// with factor b. Requires bss_sub among the strategies.
ExperimentReport run_experiment_2(const ExperimentConfig& cfg);

/// Lattice for the cross of radius R, read from the cache directory when
/// present and written there after a search otherwise.
Rank1Lattice cached_lattice(const ExperimentConfig& cfg, double radius);

/// Median over full-lattice point counts of
/// (random_sub total error interpolated log-log at that count) / (full total error).
/// Counts outside the random_sub range are skipped; returns NaN if none remain.
double subsample_tracking_ratio(const ExperimentReport& report);

enum class ReportFormat { csv, json, both };
ReportFormat parse_format(const std::string& name);

/// Writes error_vs_frequencies.csv, points_vs_frequencies.csv,
/// error_vs_points.csv, time_vs_frequencies.csv (csv) and report.json (json)
/// into `dir`, creating it. Only the time panel and the JSON carry timings.
void emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& dir);

std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);

/// The same JSON with every timing field removed.
std::string report_to_json_without_timings(const ExperimentReport& report);

}  // namespace latrec
