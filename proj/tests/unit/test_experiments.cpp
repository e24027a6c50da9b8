#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "latrec/experiments.hpp"

using namespace latrec;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const std::string& tag) {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.radii = {2, 4, 8};
  cfg.output_dir = (fs::temp_directory_path() / ("latrec_exp_" + tag)).string();
  fs::remove_all(cfg.output_dir);
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("strategy and format names") {
  for (auto s : {Strategy::full, Strategy::random_sub, Strategy::bss_sub, Strategy::continuous_random})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("nope"), std::invalid_argument);
  CHECK(parse_format("both") == ReportFormat::both);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("config validation and JSON") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.b = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.b = 2.0;
  cfg.radii.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  ExperimentConfig c2;
  c2.d = 3;
  c2.radii = {2, 16};
  c2.strategies = {Strategy::bss_sub};
  c2.seed = 77;
  CHECK(config_from_json(config_to_json(c2)) == c2);
  const auto merged = config_from_json(R"({"reps": 4, "out": "elsewhere"})", c2);
  CHECK(merged.repetitions == 4);
  CHECK(merged.output_dir == "elsewhere");
  CHECK(merged.d == 3);
  CHECK_THROWS(config_from_json("{not json"));
}

TEST_CASE("experiment 1 on a small grid") {
  auto cfg = small_config("e1");
  const auto rep = run_experiment_1(cfg);
  CHECK(rep.rows.size() == cfg.radii.size() * cfg.strategies.size());
  for (const auto& r : rep.rows) {
    REQUIRE(r.ran());
    CHECK(r.aliasing >= 0.0);
    CHECK(r.total == doctest::Approx(std::hypot(r.truncation, r.aliasing)));
    if (r.strategy == Strategy::full) CHECK(r.aliasing <= r.truncation);
    if (r.strategy == Strategy::full) CHECK(r.points == static_cast<std::size_t>(r.lattice_size));
    if (r.strategy != Strategy::full) {
      const double c = static_cast<double>(r.card);
      CHECK(r.points == static_cast<std::size_t>(std::ceil(c * std::log(c))));
    }
  }
  CHECK(report_from_json(report_to_json(rep)) == rep);

  emit_report(rep, ReportFormat::both, cfg.output_dir);
  for (const char* f : {"error_vs_frequencies.csv", "points_vs_frequencies.csv", "error_vs_points.csv",
                        "time_vs_frequencies.csv", "report.json"})
    CHECK(fs::exists(fs::path(cfg.output_dir) / f));
  CHECK(slurp(fs::path(cfg.output_dir) / "error_vs_points.csv").find("solve") == std::string::npos);
  CHECK(slurp(fs::path(cfg.output_dir) / "time_vs_frequencies.csv").find("solve_avg") != std::string::npos);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("experiment 1 is deterministic apart from timings") {
  auto cfg = small_config("det");
  cfg.repetitions = 2;
  const auto a = run_experiment_1(cfg);
  const auto b = run_experiment_1(cfg);
  CHECK(report_to_json_without_timings(a) == report_to_json_without_timings(b));
  CHECK(report_to_json_without_timings(a).find("seconds") == std::string::npos);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("experiment 2 keeps at most ceil(b |I|) points") {
  auto cfg = small_config("e2");
  cfg.radii = {4, 8};
  cfg.strategies = {Strategy::full, Strategy::random_sub, Strategy::bss_sub};
  const auto rep = run_experiment_2(cfg);
  for (const auto& a : rep.assertions)
    if (a.name == "bss_point_count" || a.name == "random_sub_point_count") CHECK(a.passed);
  for (const auto& r : rep.rows) {
    if (r.strategy != Strategy::bss_sub || !r.ran()) continue;
    CHECK(r.points <= static_cast<std::size_t>(std::ceil(cfg.b * static_cast<double>(r.card))));
  }
  cfg.strategies = {Strategy::full};
  CHECK_THROWS_AS(run_experiment_2(cfg), std::invalid_argument);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("empty report emits header-only CSVs") {
  ExperimentReport rep;
  const auto dir = fs::temp_directory_path() / "latrec_exp_empty";
  fs::remove_all(dir);
  emit_report(rep, ReportFormat::csv, dir);
  const auto text = slurp(dir / "error_vs_frequencies.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK_FALSE(fs::exists(dir / "report.json"));
  CHECK(std::isnan(subsample_tracking_ratio(rep)));
  fs::remove_all(dir);
}

TEST_CASE("memory cap skips instead of failing") {
  auto cfg = small_config("cap");
  cfg.memory_cap_bytes = 1;
  const auto rep = run_experiment_1(cfg);
  bool any_skipped = false;
  for (const auto& r : rep.rows) any_skipped |= !r.ran();
  CHECK(any_skipped);
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("lattice cache round trip") {
  auto cfg = small_config("cache");
  const auto a = cached_lattice(cfg, 8);
  const auto b = cached_lattice(cfg, 8);
  CHECK(a == b);
  bool found = false;
  for (const auto& e : fs::recursive_directory_iterator(cfg.output_dir)) found |= e.path().extension() == ".txt";
  CHECK(found);
  fs::remove_all(cfg.output_dir);
}
