#include "latrec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "latrec/errors.hpp"
#include "latrec/fourier.hpp"
#include "latrec/index_set.hpp"
#include "latrec/kink.hpp"
#include "latrec/rng.hpp"
#include "latrec/solver.hpp"
#include "latrec/subsampling.hpp"

namespace latrec {

using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

constexpr Strategy kAllStrategies[] = {Strategy::full, Strategy::random_sub, Strategy::bss_sub,
                                       Strategy::continuous_random};

std::uint64_t strategy_tag(Strategy s) { return static_cast<std::uint64_t>(s); }

std::uint64_t rep_seed(std::uint64_t seed, std::size_t radius_index, Strategy s, int rep) {
  return Rng::stream(seed, {0x65787073ULL, radius_index, strategy_tag(s), static_cast<std::uint64_t>(rep)}).next();
}

std::size_t log_oversampled(std::size_t card) {
  const double c = static_cast<double>(card);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(c * std::log(c))));
}

// Rough peak bytes per strategy, checked before anything is allocated.
std::uint64_t setup_bytes(std::int64_t m, int d) {
  return static_cast<std::uint64_t>(m) * (static_cast<std::uint64_t>(d) * 8 + 16 + 8);
}
std::uint64_t fft_bytes(std::int64_t m) { return static_cast<std::uint64_t>(m) * 16 * 3; }
std::uint64_t rows_bytes(std::size_t n, int d) { return static_cast<std::uint64_t>(n) * (static_cast<std::uint64_t>(d) * 8 + 64); }
std::uint64_t bss_bytes(std::size_t n, std::size_t m) {
  return 16 * (4 * static_cast<std::uint64_t>(m) * n + 5 * static_cast<std::uint64_t>(m) * m);
}

std::string over_cap(std::uint64_t need, std::uint64_t cap) {
  return "memory estimate " + std::to_string(need) + " bytes exceeds cap " + std::to_string(cap);
}

void record_errors(ReportRow& row, const SpectralData& ref, const CoefficientVector& a, const IndexSet& set,
                   double trunc_sq) {
  const double alias_sq = aliasing_error_sq(ref, a, set);
  row.truncation = std::sqrt(trunc_sq);
  row.aliasing = std::sqrt(alias_sq);
  row.total = std::sqrt(trunc_sq + alias_sq);
}

ExperimentReport run(const ExperimentConfig& cfg, int which) {
  cfg.validate();
  const bool with_bss = std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::bss_sub) != cfg.strategies.end();
  if (which == 2 && !with_bss) throw std::invalid_argument("experiment 2 requires the bss_sub strategy");

  std::vector<IndexSet> sets;
  for (double r : cfg.radii) {
    sets.push_back(hyperbolic_cross(cfg.d, cfg.gamma, r));
    if (with_bss && !(cfg.b > 1.0 + 1.0 / static_cast<double>(sets.back().size()))) {
      throw std::invalid_argument("b must exceed 1 + 1/|I| for every radius");
    }
  }

  ExperimentReport report;
  report.experiment = which;
  report.config = cfg;
  const SmoothnessWeight sw(cfg.s);
  const KinkSpectrum ref(cfg.d);
  SolverConfig solver;
  solver.max_iterations = 10;

  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    const double radius = cfg.radii[ri];
    const IndexSet& set = sets[ri];
    const std::size_t card = set.size();
    const double trunc_sq = truncation_error_sq(ref, ref.norm_sq(), set);
    const std::size_t n_log = log_oversampled(card);

    auto t0 = Clock::now();
    const Rank1Lattice lat = cached_lattice(cfg, radius);
    const std::int64_t m = lat.size();

    auto base_row = [&](Strategy s, int rep) {
      ReportRow row;
      row.radius = radius;
      row.card = card;
      row.strategy = s;
      row.repetition = rep;
      row.lattice_size = m;
      row.seed = rep_seed(cfg.seed, ri, s == Strategy::bss_sub ? Strategy::random_sub : s, rep);
      return row;
    };

    if (setup_bytes(m, cfg.d) > cfg.memory_cap_bytes) {
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        for (Strategy s : cfg.strategies) {
          ReportRow row = base_row(s, rep);
          row.skipped = over_cap(setup_bytes(m, cfg.d), cfg.memory_cap_bytes);
          report.rows.push_back(row);
        }
      }
      continue;
    }

    auto plan = std::make_shared<const SamplePlan>(lattice_points(lat));
    ValueVector f_full(m);
    for (std::int64_t i = 0; i < m; ++i) {
      f_full[i] = kink_eval(std::span<const double>(plan->point(static_cast<std::size_t>(i)),
                                                    static_cast<std::size_t>(cfg.d)));
    }
    const DensityWeights rho = density_weights(*plan, set, set, sw);
    const double setup_seconds = seconds_since(t0);

    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      std::shared_ptr<SubsampleSelection> stage1;
      double stage1_seconds = 0.0;
      auto ensure_stage1 = [&](std::uint64_t seed) {
        if (stage1) return;
        const auto ts = Clock::now();
        stage1 = std::make_shared<SubsampleSelection>(random_subsample(plan, rho, n_log, seed));
        stage1_seconds = seconds_since(ts);
      };
      auto selection_values = [&](const SubsampleSelection& sel) {
        ValueVector v(static_cast<Eigen::Index>(sel.size()));
        for (std::size_t q = 0; q < sel.size(); ++q) v[static_cast<Eigen::Index>(q)] = f_full[static_cast<Eigen::Index>(sel.indices[q])];
        return v;
      };

      for (Strategy s : cfg.strategies) {
        ReportRow row = base_row(s, rep);
        row.setup_seconds = setup_seconds;
        switch (s) {
          case Strategy::full: {
            const std::uint64_t need = fft_bytes(m);
            if (need > cfg.memory_cap_bytes) {
              row.skipped = over_cap(need, cfg.memory_cap_bytes);
              break;
            }
            row.points = static_cast<std::size_t>(m);
            const auto res = reconstruct(*plan, set, f_full, solver);
            row.solve_seconds = res.diagnostics.wall_seconds;
            row.iterations = res.diagnostics.iterations;
            record_errors(row, ref, res.coefficients, set, trunc_sq);
            break;
          }
          case Strategy::random_sub: {
            const std::uint64_t need = fft_bytes(m) + rows_bytes(n_log, cfg.d);
            if (need > cfg.memory_cap_bytes) {
              row.skipped = over_cap(need, cfg.memory_cap_bytes);
              break;
            }
            ensure_stage1(row.seed);
            row.subsample_seconds = stage1_seconds;
            row.points = stage1->size();
            const auto res = reconstruct(*stage1, set, selection_values(*stage1), solver);
            row.solve_seconds = res.diagnostics.wall_seconds;
            row.iterations = res.diagnostics.iterations;
            record_errors(row, ref, res.coefficients, set, trunc_sq);
            break;
          }
          case Strategy::bss_sub: {
            const std::uint64_t need = fft_bytes(m) + bss_bytes(n_log, card);
            if (need > cfg.memory_cap_bytes) {
              row.skipped = over_cap(need, cfg.memory_cap_bytes);
              break;
            }
            ensure_stage1(row.seed);
            row.subsample_seconds = stage1_seconds;
            const auto tb = Clock::now();
            const SubsampleSelection sel = plain_bss_subsample(*stage1, set, cfg.b);
            row.bss_seconds = seconds_since(tb);
            row.points = sel.size();
            const auto res = reconstruct(sel, set, selection_values(sel), solver);
            row.solve_seconds = res.diagnostics.wall_seconds;
            row.iterations = res.diagnostics.iterations;
            record_errors(row, ref, res.coefficients, set, trunc_sq);
            break;
          }
          case Strategy::continuous_random: {
            const std::uint64_t need = rows_bytes(n_log, cfg.d) * 2;
            if (need > cfg.memory_cap_bytes) {
              row.skipped = over_cap(need, cfg.memory_cap_bytes);
              break;
            }
            const auto ts = Clock::now();
            Rng rng = Rng::stream(row.seed, {0x756e6966ULL});
            std::vector<double> pts(n_log * static_cast<std::size_t>(cfg.d));
            for (double& x : pts) x = rng.uniform();
            ValueVector f(static_cast<Eigen::Index>(n_log));
            for (std::size_t i = 0; i < n_log; ++i) {
              f[static_cast<Eigen::Index>(i)] =
                  kink_eval(std::span<const double>(pts.data() + i * static_cast<std::size_t>(cfg.d),
                                                    static_cast<std::size_t>(cfg.d)));
            }
            const auto op = SystemOperator::dense(cfg.d, std::move(pts), set);
            row.subsample_seconds = seconds_since(ts);
            row.points = n_log;
            const std::vector<double> w(n_log, 1.0 / static_cast<double>(n_log));
            const auto res = least_squares(op, w, f, solver);
            row.solve_seconds = res.diagnostics.wall_seconds;
            row.iterations = res.diagnostics.iterations;
            record_errors(row, ref, res.coefficients, set, trunc_sq);
            break;
          }
        }
        report.rows.push_back(row);
      }
    }
  }

  // Enabled assertions
  for (Strategy s : cfg.strategies) {
    AssertionResult a{"aliasing_le_truncation:" + to_string(s), true, ""};
    std::size_t ran = 0, bad = 0;
    for (const auto& row : report.rows) {
      if (row.strategy != s || !row.ran()) continue;
      ++ran;
      if (!(row.aliasing <= row.truncation)) ++bad;
    }
    a.passed = bad == 0;
    a.detail = std::to_string(bad) + " of " + std::to_string(ran) + " runs violate";
    report.assertions.push_back(a);
  }
  if (std::find(cfg.strategies.begin(), cfg.strategies.end(), Strategy::random_sub) != cfg.strategies.end()) {
    AssertionResult a{"random_sub_point_count", true, ""};
    std::size_t bad = 0;
    for (const auto& row : report.rows) {
      if (row.strategy == Strategy::random_sub && row.ran() && row.points != log_oversampled(row.card)) ++bad;
    }
    a.passed = bad == 0;
    a.detail = std::to_string(bad) + " runs differ from ceil(|I| ln |I|)";
    report.assertions.push_back(a);
  }
  if (with_bss) {
    AssertionResult a{"bss_point_count", true, ""};
    std::size_t bad = 0;
    for (const auto& row : report.rows) {
      if (row.strategy != Strategy::bss_sub || !row.ran()) continue;
      if (static_cast<double>(row.points) > std::ceil(cfg.b * static_cast<double>(row.card))) ++bad;
    }
    a.passed = bad == 0;
    a.detail = std::to_string(bad) + " runs exceed ceil(b |I|)";
    report.assertions.push_back(a);
  }
  return report;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::full: return "full";
    case Strategy::random_sub: return "random_sub";
    case Strategy::bss_sub: return "bss_sub";
    case Strategy::continuous_random: return "continuous_random";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (d < 1) throw std::invalid_argument("d must be positive");
  if (!(s > 0.5)) throw std::invalid_argument("s must exceed 1/2");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
  if (radii.empty()) throw std::invalid_argument("radii schedule is empty");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 1.0) || !std::isfinite(radii[i])) throw std::invalid_argument("radii must exceed 1");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw std::invalid_argument("radii must be strictly increasing");
  }
  if (strategies.empty()) throw std::invalid_argument("no strategies selected");
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (strategies[i] == strategies[j]) throw std::invalid_argument("duplicate strategy " + to_string(strategies[i]));
    }
  }
  if (!(b > 1.0)) throw std::invalid_argument("b must exceed 1");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (memory_cap_bytes == 0) throw std::invalid_argument("memory cap must be positive");
}

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig cfg) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "d") cfg.d = value.get<int>();
    else if (key == "s") cfg.s = value.get<double>();
    else if (key == "gamma") cfg.gamma = value.get<double>();
    else if (key == "radii") cfg.radii = value.get<std::vector<double>>();
    else if (key == "strategies") {
      cfg.strategies.clear();
      for (const auto& name : value) cfg.strategies.push_back(parse_strategy(name.get<std::string>()));
    } else if (key == "b") cfg.b = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "repetitions" || key == "reps") cfg.repetitions = value.get<int>();
    else if (key == "memory_cap_bytes" || key == "mem_cap") cfg.memory_cap_bytes = value.get<std::uint64_t>();
    else if (key == "output_dir" || key == "out") cfg.output_dir = value.get<std::string>();
    else if (key == "lattice_cache_dir") cfg.lattice_cache_dir = value.get<std::string>();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

namespace {

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["d"] = cfg.d;
  j["s"] = cfg.s;
  j["gamma"] = cfg.gamma;
  j["radii"] = cfg.radii;
  std::vector<std::string> names;
  for (Strategy s : cfg.strategies) names.push_back(to_string(s));
  j["strategies"] = names;
  j["b"] = cfg.b;
  j["seed"] = cfg.seed;
  j["repetitions"] = cfg.repetitions;
  j["memory_cap_bytes"] = cfg.memory_cap_bytes;
  j["output_dir"] = cfg.output_dir;
  j["lattice_cache_dir"] = cfg.lattice_cache_dir;
  return j;
}

json report_json(const ExperimentReport& report, bool timings) {
  json j;
  j["experiment"] = report.experiment;
  j["config"] = config_json(report.config);
  json rows = json::array();
  for (const auto& r : report.rows) {
    json o;
    o["radius"] = r.radius;
    o["card"] = r.card;
    o["strategy"] = to_string(r.strategy);
    o["repetition"] = r.repetition;
    o["seed"] = r.seed;
    o["lattice_size"] = r.lattice_size;
    o["points"] = r.points;
    o["truncation"] = r.truncation;
    o["aliasing"] = r.aliasing;
    o["total"] = r.total;
    o["iterations"] = r.iterations;
    if (timings) {
      o["setup_seconds"] = r.setup_seconds;
      o["subsample_seconds"] = r.subsample_seconds;
      o["solve_seconds"] = r.solve_seconds;
      o["bss_seconds"] = r.bss_seconds;
    }
    o["skipped"] = r.skipped;
    rows.push_back(o);
  }
  j["rows"] = rows;
  json asserts = json::array();
  for (const auto& a : report.assertions) asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  j["assertions"] = asserts;
  j["all_passed"] = report.all_passed();
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2); }

bool ExperimentReport::all_passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

ExperimentReport run_experiment_1(const ExperimentConfig& cfg) { return run(cfg, 1); }
ExperimentReport run_experiment_2(const ExperimentConfig& cfg) { return run(cfg, 2); }

Rank1Lattice cached_lattice(const ExperimentConfig& cfg, double radius) {
  namespace fs = std::filesystem;
  const fs::path dir = cfg.lattice_cache_dir.empty() ? fs::path(cfg.output_dir) / "lattice_cache"
                                                     : fs::path(cfg.lattice_cache_dir);
  const std::string name = "lattice_d" + std::to_string(cfg.d) + "_g" + fmt(cfg.gamma) + "_R" + fmt(radius) + "_s" +
                           std::to_string(cfg.seed) + ".txt";
  const fs::path file = dir / name;
  const IndexSet set = hyperbolic_cross(cfg.d, cfg.gamma, radius);
  if (fs::exists(file)) {
    std::ifstream in(file);
    try {
      Rank1Lattice lat = read_lattice(in);
      if (lat.dimension() == cfg.d && is_reconstructing(lat, set)) return lat;
    } catch (const std::exception&) {
      // unreadable cache entries are rebuilt below
    }
  }
  Rank1Lattice lat = search_generator(set, cfg.seed);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(file);
  if (out) write_lattice(out, lat);
  return lat;
}

double subsample_tracking_ratio(const ExperimentReport& report) {
  std::map<double, std::pair<double, double>> full;   // radius -> (points, mean total)
  std::map<double, std::pair<double, double>> sub;
  std::map<double, int> nfull, nsub;
  for (const auto& r : report.rows) {
    if (!r.ran()) continue;
    if (r.strategy == Strategy::full) {
      full[r.radius].first = static_cast<double>(r.points);
      full[r.radius].second += r.total;
      ++nfull[r.radius];
    } else if (r.strategy == Strategy::random_sub) {
      sub[r.radius].first += static_cast<double>(r.points);
      sub[r.radius].second += r.total;
      ++nsub[r.radius];
    }
  }
  std::vector<std::pair<double, double>> curve;  // (log points, log error), ascending in points
  for (auto& [rad, pe] : sub) curve.emplace_back(std::log(pe.first / nsub[rad]), std::log(pe.second / nsub[rad]));
  std::sort(curve.begin(), curve.end());
  std::vector<double> ratios;
  for (auto& [rad, pe] : full) {
    const double lp = std::log(pe.first);
    const double err = pe.second / nfull[rad];
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
      if (lp >= curve[i].first && lp <= curve[i + 1].first && curve[i + 1].first > curve[i].first) {
        const double t = (lp - curve[i].first) / (curve[i + 1].first - curve[i].first);
        const double le = curve[i].second + t * (curve[i + 1].second - curve[i].second);
        ratios.push_back(std::exp(le) / err);
        break;
      }
    }
  }
  if (ratios.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(ratios.begin(), ratios.end());
  const std::size_t k = ratios.size();
  return k % 2 == 1 ? ratios[k / 2] : 0.5 * (ratios[k / 2 - 1] + ratios[k / 2]);
}

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "both") return ReportFormat::both;
  throw std::invalid_argument("unknown format '" + name + "'");
}

namespace {

struct Stats {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int n = 0;
  void add(double x) {
    min = std::min(min, x);
    max = std::max(max, x);
    sum += x;
    ++n;
  }
  double avg() const { return n ? sum / n : 0.0; }
};

struct Group {
  double radius = 0.0;
  std::size_t card = 0;
  Strategy strategy = Strategy::full;
  double truncation = 0.0;
  Stats aliasing, total, points, setup, subsample, solve, bss;
};

std::vector<Group> aggregate(const ExperimentReport& report) {
  std::vector<Group> out;
  for (double radius : report.config.radii) {
    for (Strategy s : report.config.strategies) {
      Group g;
      g.radius = radius;
      g.strategy = s;
      for (const auto& r : report.rows) {
        if (r.radius != radius || r.strategy != s || !r.ran()) continue;
        g.card = r.card;
        g.truncation = r.truncation;
        g.aliasing.add(r.aliasing);
        g.total.add(r.total);
        g.points.add(static_cast<double>(r.points));
        g.setup.add(r.setup_seconds);
        g.subsample.add(r.subsample_seconds);
        g.solve.add(r.solve_seconds);
        g.bss.add(r.bss_seconds);
      }
      if (g.total.n > 0) out.push_back(g);
    }
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

}  // namespace

void emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  if (format != ReportFormat::json) {
    const auto groups = aggregate(report);
    {
      auto os = open_out(dir / "error_vs_frequencies.csv");
      os << "radius,card,strategy,truncation,aliasing_min,aliasing_avg,aliasing_max,total_min,total_avg,total_max\n";
      for (const auto& g : groups) {
        os << fmt(g.radius) << ',' << g.card << ',' << to_string(g.strategy) << ',' << fmt(g.truncation) << ','
           << fmt(g.aliasing.min) << ',' << fmt(g.aliasing.avg()) << ',' << fmt(g.aliasing.max) << ','
           << fmt(g.total.min) << ',' << fmt(g.total.avg()) << ',' << fmt(g.total.max) << '\n';
      }
    }
    {
      auto os = open_out(dir / "points_vs_frequencies.csv");
      os << "radius,card,strategy,points_min,points_avg,points_max,oversampling_avg\n";
      for (const auto& g : groups) {
        os << fmt(g.radius) << ',' << g.card << ',' << to_string(g.strategy) << ',' << fmt(g.points.min) << ','
           << fmt(g.points.avg()) << ',' << fmt(g.points.max) << ','
           << fmt(g.points.avg() / static_cast<double>(g.card)) << '\n';
      }
    }
    {
      auto os = open_out(dir / "error_vs_points.csv");
      os << "strategy,radius,card,points_avg,total_min,total_avg,total_max\n";
      for (Strategy s : report.config.strategies) {
        for (const auto& g : groups) {
          if (g.strategy != s) continue;
          os << to_string(s) << ',' << fmt(g.radius) << ',' << g.card << ',' << fmt(g.points.avg()) << ','
             << fmt(g.total.min) << ',' << fmt(g.total.avg()) << ',' << fmt(g.total.max) << '\n';
        }
      }
    }
    {
      auto os = open_out(dir / "time_vs_frequencies.csv");
      os << "radius,card,strategy,setup_avg,subsample_avg,solve_min,solve_avg,solve_max,bss_avg\n";
      for (const auto& g : groups) {
        os << fmt(g.radius) << ',' << g.card << ',' << to_string(g.strategy) << ',' << fmt(g.setup.avg()) << ','
           << fmt(g.subsample.avg()) << ',' << fmt(g.solve.min) << ',' << fmt(g.solve.avg()) << ','
           << fmt(g.solve.max) << ',' << fmt(g.bss.avg()) << '\n';
      }
    }
  }
  if (format != ReportFormat::csv) {
    auto os = open_out(dir / "report.json");
    os << report_to_json(report) << '\n';
  }
}

std::string report_to_json(const ExperimentReport& report) { return report_json(report, true).dump(2); }

std::string report_to_json_without_timings(const ExperimentReport& report) {
  return report_json(report, false).dump(2);
}

ExperimentReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentReport report;
  report.experiment = j.at("experiment").get<int>();
  report.config = config_from_json(j.at("config").dump());
  for (const auto& o : j.at("rows")) {
    ReportRow r;
    r.radius = o.at("radius").get<double>();
    r.card = o.at("card").get<std::size_t>();
    r.strategy = parse_strategy(o.at("strategy").get<std::string>());
    r.repetition = o.at("repetition").get<int>();
    r.seed = o.at("seed").get<std::uint64_t>();
    r.lattice_size = o.at("lattice_size").get<std::int64_t>();
    r.points = o.at("points").get<std::size_t>();
    r.truncation = o.at("truncation").get<double>();
    r.aliasing = o.at("aliasing").get<double>();
    r.total = o.at("total").get<double>();
    r.iterations = o.at("iterations").get<int>();
    r.setup_seconds = o.value("setup_seconds", 0.0);
    r.subsample_seconds = o.value("subsample_seconds", 0.0);
    r.solve_seconds = o.value("solve_seconds", 0.0);
    r.bss_seconds = o.value("bss_seconds", 0.0);
    r.skipped = o.at("skipped").get<std::string>();
    report.rows.push_back(r);
  }
  for (const auto& a : j.at("assertions")) {
    report.assertions.push_back({a.at("name").get<std::string>(), a.at("passed").get<bool>(),
                                 a.at("detail").get<std::string>()});
  }
  return report;
}

}  // namespace latrec
