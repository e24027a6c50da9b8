#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/experiments.hpp"
#include "latrec/index_set.hpp"
#include "latrec/lattice.hpp"
#include "latrec/mz_analysis.hpp"

using namespace latrec;

namespace {

struct ExperimentFlags {
  std::string config;
  int d = 0;
  double s = 0.0;
  double gamma = 0.0;
  std::vector<double> radii;
  std::vector<std::string> strategies;
  double b = 0.0;
  std::uint64_t seed = 0;
  int reps = 0;
  std::uint64_t mem_cap = 0;
  std::string out;
  std::string format = "both";

  std::vector<CLI::Option*> options;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--config", f.config, "JSON config file; flags given on the command line win");
  f.options.push_back(app->add_option("--d", f.d, "spatial dimension"));
  f.options.push_back(app->add_option("--s", f.s, "smoothness order of the density weights"));
  f.options.push_back(app->add_option("--gamma", f.gamma, "hyperbolic cross shape parameter"));
  f.options.push_back(app->add_option("--radii", f.radii, "cross radii, increasing")->delimiter(','));
  f.options.push_back(
      app->add_option("--strategies", f.strategies, "full,random_sub,bss_sub,continuous_random")->delimiter(','));
  f.options.push_back(app->add_option("--b", f.b, "BSS oversampling factor"));
  f.options.push_back(app->add_option("--seed", f.seed, "master seed"));
  f.options.push_back(app->add_option("--reps", f.reps, "repetitions"));
  f.options.push_back(app->add_option("--mem-cap", f.mem_cap, "memory cap in bytes"));
  f.options.push_back(app->add_option("--out", f.out, "output directory"));
  app->add_option("--format", f.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig build_config(const ExperimentFlags& f, ExperimentConfig cfg) {
  if (!f.config.empty()) cfg = config_from_json(slurp(f.config), cfg);
  auto given = [&](std::size_t i) { return f.options[i]->count() > 0; };
  if (given(0)) cfg.d = f.d;
  if (given(1)) cfg.s = f.s;
  if (given(2)) cfg.gamma = f.gamma;
  if (given(3)) cfg.radii = f.radii;
  if (given(4)) {
    cfg.strategies.clear();
    for (const auto& s : f.strategies) cfg.strategies.push_back(parse_strategy(s));
  }
  if (given(5)) cfg.b = f.b;
  if (given(6)) cfg.seed = f.seed;
  if (given(7)) cfg.repetitions = f.reps;
  if (given(8)) cfg.memory_cap_bytes = f.mem_cap;
  if (given(9)) cfg.output_dir = f.out;
  cfg.validate();
  return cfg;
}

int run_experiment_command(int which, const ExperimentFlags& f) {
  ExperimentConfig base;
  if (which == 2) {
    base.strategies = {Strategy::full, Strategy::random_sub, Strategy::bss_sub, Strategy::continuous_random};
  }
  const ExperimentConfig cfg = build_config(f, base);
  const ExperimentReport report = which == 1 ? run_experiment_1(cfg) : run_experiment_2(cfg);
  emit_report(report, parse_format(f.format), cfg.output_dir);
  for (const auto& row : report.rows) {
    if (!row.ran()) std::cerr << "skipped R=" << row.radius << ' ' << to_string(row.strategy) << ": " << row.skipped << '\n';
  }
  for (const auto& a : report.assertions) {
    std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << " (" << a.detail << ")\n";
  }
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice-based least-squares reconstruction experiments"};
  app.require_subcommand(1);

  ExperimentFlags f1, f2;
  auto* exp1 = app.add_subcommand("exp1", "full lattice vs random subsample vs uniform random points");
  add_experiment_flags(exp1, f1);
  auto* exp2 = app.add_subcommand("exp2", "experiment 1 plus PlainBSS-subsampled lattice");
  add_experiment_flags(exp2, f2);

  int ls_d = 2;
  double ls_gamma = 0.5;
  std::vector<double> ls_radii{8};
  std::uint64_t ls_seed = 1;
  std::string ls_out;
  auto* search = app.add_subcommand("lattice-search", "find reconstructing rank-1 lattices for hyperbolic crosses");
  search->add_option("--d", ls_d, "spatial dimension");
  search->add_option("--gamma", ls_gamma, "cross shape parameter");
  search->add_option("--radii", ls_radii, "cross radii")->delimiter(',');
  search->add_option("--seed", ls_seed, "search seed");
  search->add_option("--out", ls_out, "directory for lattice files");

  int mz_d = 2;
  double mz_gamma = 0.5;
  std::vector<double> mz_radii{8};
  std::uint64_t mz_seed = 1;
  std::string mz_lattice;
  double mz_tol = 1e-8;
  auto* audit = app.add_subcommand("mz-audit", "MZ constants and exactness of a lattice on a cross");
  audit->add_option("--d", mz_d, "spatial dimension");
  audit->add_option("--gamma", mz_gamma, "cross shape parameter");
  audit->add_option("--radii", mz_radii, "cross radii")->delimiter(',');
  audit->add_option("--seed", mz_seed, "lattice search seed");
  audit->add_option("--lattice", mz_lattice, "lattice file to audit instead of searching (single radius)");
  audit->add_option("--tol", mz_tol, "exactness tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exp1) return run_experiment_command(1, f1);
    if (*exp2) return run_experiment_command(2, f2);
    if (*search) {
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (double r : ls_radii) {
        const IndexSet set = hyperbolic_cross(ls_d, ls_gamma, r);
        const Rank1Lattice lat = search_generator(set, ls_seed);
        out.push_back({{"radius", r},
                       {"card", set.size()},
                       {"M", lat.size()},
                       {"z", lat.generator()},
                       {"M_over_card", static_cast<double>(lat.size()) / static_cast<double>(set.size())}});
        if (!ls_out.empty()) {
          std::filesystem::create_directories(ls_out);
          char name[128];
          std::snprintf(name, sizeof name, "lattice_d%d_R%g.txt", ls_d, r);
          std::ofstream os(std::filesystem::path(ls_out) / name);
          write_lattice(os, lat);
        }
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*audit) {
      bool ok = true;
      nlohmann::ordered_json out = nlohmann::ordered_json::array();
      for (double r : mz_radii) {
        const IndexSet set = hyperbolic_cross(mz_d, mz_gamma, r);
        Rank1Lattice lat = [&] {
          if (mz_lattice.empty()) return search_generator(set, mz_seed);
          std::ifstream in(mz_lattice);
          if (!in) throw std::runtime_error("cannot read " + mz_lattice);
          return read_lattice(in);
        }();
        const SamplePlan plan = lattice_points(lat);
        nlohmann::ordered_json entry;
        entry["radius"] = r;
        if (set.size() <= kDenseGramCap) {
          entry["report"] = nlohmann::ordered_json::parse(mz_report_json(plan, set, mz_tol));
          ok = ok && quadrature_exactness(plan, set, mz_tol).has_value();
        } else {
          const auto op = SystemOperator::for_plan(plan, set);
          const auto est = estimate_bounds_iterative(op, plan.weights(), mz_tol);
          entry["report"] = {{"card", set.size()},
                             {"M", lat.size()},
                             {"A", est.bounds.lower},
                             {"B", est.bounds.upper},
                             {"method", "lanczos"},
                             {"converged", est.converged}};
          ok = ok && est.converged && est.bounds.upper - est.bounds.lower <= mz_tol * est.bounds.upper;
        }
        out.push_back(entry);
      }
      std::cout << out.dump(2) << '\n';
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
