#include "latrec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "latrec/errors.hpp"
#include "latrec/rng.hpp"

namespace latrec {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t mod_positive(std::int64_t v, std::uint64_t m) {
  const std::int64_t r = v % static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(m) : r);
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, base, m);
    base = mul_mod(base, base, m);
    e >>= 1;
  }
  return r;
}

// Residue-injectivity checker. A bitmap over [0, M) when it fits, sorting
// otherwise.
class ResidueSet {
 public:
  explicit ResidueSet(std::uint64_t m) : m_(m) {
    if (m <= (std::uint64_t{1} << 31)) bits_.assign((m + 63) / 64, 0);
  }

  bool all_distinct(const std::vector<std::uint64_t>& r) {
    if (bits_.empty()) {
      scratch_ = r;
      std::sort(scratch_.begin(), scratch_.end());
      return std::adjacent_find(scratch_.begin(), scratch_.end()) == scratch_.end();
    }
    bool ok = true;
    std::size_t set = 0;
    for (; set < r.size(); ++set) {
      auto& w = bits_[r[set] >> 6];
      const std::uint64_t bit = std::uint64_t{1} << (r[set] & 63);
      if (w & bit) {
        ok = false;
        break;
      }
      w |= bit;
    }
    for (std::size_t i = 0; i < set; ++i) bits_[r[i] >> 6] = 0;
    return ok;
  }

 private:
  std::uint64_t m_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> scratch_;
};

// Unique coordinate prefixes of a lexicographically sorted set, level by level.
struct PrefixLevels {
  // parent[j][p]: index of prefix p's (j-1)-prefix; value[j][p]: its j-th coordinate.
  std::vector<std::vector<std::uint32_t>> parent;
  std::vector<std::vector<std::int64_t>> value;

  explicit PrefixLevels(const IndexSet& set) {
    const int d = set.dimension();
    parent.resize(static_cast<std::size_t>(d));
    value.resize(static_cast<std::size_t>(d));
    // id of the current prefix at each level while sweeping in order
    std::vector<std::uint32_t> current(static_cast<std::size_t>(d), 0);
    for (std::size_t i = 0; i < set.size(); ++i) {
      auto k = set[i];
      int first_diff = 0;
      if (i > 0) {
        auto prev = set[i - 1];
        while (first_diff < d && prev[first_diff] == k[first_diff]) ++first_diff;
      }
      for (int j = first_diff; j < d; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const std::uint32_t par = j == 0 ? 0u : current[jj - 1];
        current[jj] = static_cast<std::uint32_t>(parent[jj].size());
        parent[jj].push_back(par);
        value[jj].push_back(k[j]);
      }
    }
  }
};

}  // namespace

Rank1Lattice::Rank1Lattice(std::vector<std::int64_t> generator, std::int64_t size)
    : z_(std::move(generator)), m_(size) {
  if (m_ < 1) throw std::invalid_argument("Rank1Lattice: M must be >= 1");
  if (z_.empty()) throw std::invalid_argument("Rank1Lattice: generator must be non-empty");
  for (auto& zj : z_) zj = static_cast<std::int64_t>(mod_positive(zj, static_cast<std::uint64_t>(m_)));
}

double Rank1Lattice::coordinate(std::int64_t i, int j) const {
  const auto m = static_cast<std::uint64_t>(m_);
  const std::uint64_t r = mul_mod(mod_positive(i, m), static_cast<std::uint64_t>(z_[static_cast<std::size_t>(j)]), m);
  return static_cast<double>(r) / static_cast<double>(m_);
}

SamplePlan::SamplePlan(int dim, std::vector<double> points, std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
  if (dim < 1) throw std::invalid_argument("SamplePlan: dimension must be >= 1");
  if (points_.size() != weights_.size() * static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("SamplePlan: points and weights disagree in count");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("SamplePlan: weights must be finite and >= 0");
  }
}

SamplePlan& SamplePlan::with_stability(IndexSet set, std::optional<SpectralBounds> bounds) {
  stable_for_ = std::move(set);
  bounds_ = bounds;
  return *this;
}

SamplePlan lattice_points(const Rank1Lattice& lat) {
  const int d = lat.dimension();
  const auto m = static_cast<std::size_t>(lat.size());
  std::vector<double> pts(m * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) pts[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
        lat.coordinate(static_cast<std::int64_t>(i), j);
  }
  SamplePlan plan(d, std::move(pts), std::vector<double>(m, 1.0 / static_cast<double>(m)));
  plan.lattice_ = lat;
  return plan;
}

std::vector<std::int64_t> lattice_residues(const Rank1Lattice& lat, const IndexSet& set) {
  if (!set.empty() && set.dimension() != lat.dimension()) {
    throw std::invalid_argument("lattice_residues: dimension mismatch");
  }
  const auto m = static_cast<std::uint64_t>(lat.size());
  const auto& z = lat.generator();
  std::vector<std::int64_t> out(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto k = set[i];
    u128 acc = 0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      acc += static_cast<u128>(mod_positive(k[j], m)) * static_cast<std::uint64_t>(z[j]);
      acc %= m;
    }
    out[i] = static_cast<std::int64_t>(acc);
  }
  return out;
}

bool is_reconstructing(const Rank1Lattice& lat, const IndexSet& set) {
  if (set.empty()) throw std::invalid_argument("is_reconstructing: empty index set");
  if (set.dimension() != lat.dimension()) throw std::invalid_argument("is_reconstructing: dimension mismatch");
  if (static_cast<std::uint64_t>(lat.size()) < set.size()) return false;
  auto r = lattice_residues(lat, set);
  std::sort(r.begin(), r.end());
  return std::adjacent_find(r.begin(), r.end()) == r.end();
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic for all 64-bit n with these bases.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  if ((n & 1) == 0) ++n;
  while (!is_prime(n)) n += 2;
  return n;
}

Rank1Lattice search_generator(const IndexSet& set, std::uint64_t seed, const LatticeSchedule& schedule) {
  if (set.empty()) throw std::invalid_argument("search_generator: empty index set");
  const int d = set.dimension();
  if (set.size() == 1) return Rank1Lattice(std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), 1);
  if (schedule.growth <= 1.0) throw std::invalid_argument("search_generator: growth must exceed 1");

  const PrefixLevels levels(set);
  const auto card = static_cast<double>(set.size());
  std::uint64_t m = schedule.first_size > 0
                        ? static_cast<std::uint64_t>(schedule.first_size)
                        : static_cast<std::uint64_t>(std::ceil(schedule.start_factor * card));
  m = next_prime(std::max<std::uint64_t>(m, set.size()));

  std::vector<std::uint64_t> prev, cur;
  while (m <= static_cast<std::uint64_t>(schedule.max_size)) {
    ResidueSet residues(m);
    Rng rng = Rng::stream(seed, {0x6c617474ULL, m});
    for (int attempt = 0; attempt < schedule.attempts_per_size; ++attempt) {
      std::vector<std::int64_t> z(static_cast<std::size_t>(d), 0);
      prev.assign(1, 0);
      bool complete = true;
      for (int j = 0; j < d && complete; ++j) {
        const auto& par = levels.parent[static_cast<std::size_t>(j)];
        const auto& val = levels.value[static_cast<std::size_t>(j)];
        cur.resize(par.size());
        bool found = false;
        for (int c = 0; c < schedule.candidates_per_component; ++c) {
          const std::uint64_t zj = 1 + rng.below(m - 1);
          for (std::size_t p = 0; p < par.size(); ++p) {
            const std::uint64_t t = prev[par[p]] + mul_mod(mod_positive(val[p], m), zj, m);
            cur[p] = t >= m ? t - m : t;
          }
          if (residues.all_distinct(cur)) {
            z[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(zj);
            found = true;
            break;
          }
        }
        if (!found) {
          complete = false;
        } else {
          std::swap(prev, cur);
        }
      }
      if (complete) return Rank1Lattice(std::move(z), static_cast<std::int64_t>(m));
    }
    const auto grown = static_cast<std::uint64_t>(std::ceil(schedule.growth * static_cast<double>(m)));
    m = next_prime(grown);
  }
  throw LatticeSearchError("search_generator: no reconstructing lattice for |I| = " + std::to_string(set.size()) +
                           " with M <= " + std::to_string(schedule.max_size));
}

void write_lattice(std::ostream& os, const Rank1Lattice& lat) {
  os << lat.dimension() << ' ' << lat.size();
  for (auto zj : lat.generator()) os << ' ' << zj;
  os << '\n';
}

Rank1Lattice read_lattice(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_lattice: empty input");
  std::istringstream ls(line);
  int d = 0;
  std::int64_t m = 0;
  if (!(ls >> d >> m) || d < 1) throw std::invalid_argument("read_lattice: malformed header");
  std::vector<std::int64_t> z(static_cast<std::size_t>(d));
  for (auto& zj : z) {
    if (!(ls >> zj)) throw std::invalid_argument("read_lattice: expected " + std::to_string(d) + " generator entries");
  }
  return Rank1Lattice(std::move(z), m);
}

void write_plan_csv(std::ostream& os, const SamplePlan& plan) {
  const int d = plan.dimension();
  for (int j = 1; j <= d; ++j) os << 'x' << j << ',';
  os << "weight\n";
  char buf[64];
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const double* x = plan.point(i);
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", x[j]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", plan.weights()[i]);
    os << buf;
  }
}

}  // namespace latrec
