#include "latrec/index_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "latrec/errors.hpp"

namespace latrec {

namespace {

bool lex_less(const std::int64_t* a, const std::int64_t* b, int d) {
  return std::lexicographical_compare(a, a + d, b, b + d);
}

// Product of the factors in ascending order, so that the value does not
// depend on the coordinate order.
double sorted_product(std::vector<double>& factors) {
  std::sort(factors.begin(), factors.end());
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

}  // namespace

IndexSet::IndexSet(int dim, std::vector<std::int64_t> flat) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("IndexSet: dimension must be >= 1");
  const auto d = static_cast<std::size_t>(dim);
  if (flat.size() % d != 0) throw std::invalid_argument("IndexSet: flat buffer is not a multiple of the dimension");
  const std::size_t n = flat.size() / d;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(flat.data() + a * d, flat.data() + b * d, dim);
  });
  flat_.resize(flat.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(flat.data() + order[i] * d, d, flat_.data() + i * d);
    if (i > 0 && std::equal(flat_.data() + (i - 1) * d, flat_.data() + i * d, flat_.data() + i * d)) {
      throw std::invalid_argument("IndexSet: duplicate frequency");
    }
  }
}

std::optional<std::size_t> IndexSet::find(Frequency k) const {
  if (static_cast<int>(k.size()) != dim_ || empty()) return std::nullopt;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (lex_less((*this)[mid].data(), k.data(), dim_)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < size() && std::equal(k.begin(), k.end(), (*this)[lo].begin())) return lo;
  return std::nullopt;
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  if (empty()) return true;
  if (other.dim_ != dim_) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!other.contains((*this)[i])) return false;
  }
  return true;
}

std::vector<std::int64_t> IndexSet::max_abs() const {
  std::vector<std::int64_t> m(static_cast<std::size_t>(dim_), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    auto k = (*this)[i];
    for (int j = 0; j < dim_; ++j) m[j] = std::max<std::int64_t>(m[j], std::llabs(k[j]));
  }
  return m;
}

bool in_hyperbolic_cross(Frequency k, double gamma, double radius) {
  std::vector<double> f(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    f[j] = std::max(1.0, static_cast<double>(std::llabs(k[j])) / gamma);
  }
  return sorted_product(f) <= radius;
}

IndexSet hyperbolic_cross(int d, double gamma, double radius, std::size_t max_size) {
  if (d < 1) throw std::invalid_argument("hyperbolic_cross: d must be >= 1");
  if (!std::isfinite(gamma) || !std::isfinite(radius)) {
    throw std::invalid_argument("hyperbolic_cross: gamma and R must be finite");
  }
  if (gamma <= 0.0) throw std::invalid_argument("hyperbolic_cross: gamma must be positive");
  if (radius <= 1.0) throw std::invalid_argument("hyperbolic_cross: R must exceed 1");
  if (gamma * radius > 1e15) throw ResourceLimitError("hyperbolic_cross: gamma*R too large");

  // The running product is pruned with a small relative slack; the exact
  // predicate decides at the leaves.
  const double budget = radius * (1.0 + 1e-9);
  std::vector<std::int64_t> flat;
  std::vector<std::int64_t> k(static_cast<std::size_t>(d), 0);
  std::size_t count = 0;

  auto descend = [&](auto&& self, int j, double prod) -> void {
    if (j == d) {
      if (!in_hyperbolic_cross(k, gamma, radius)) return;
      if (++count > max_size) {
        throw ResourceLimitError("hyperbolic_cross: set exceeds the configured size cap of " +
                                 std::to_string(max_size));
      }
      flat.insert(flat.end(), k.begin(), k.end());
      return;
    }
    const auto kmax = static_cast<std::int64_t>(std::floor(gamma * budget / prod));
    for (std::int64_t v = -kmax; v <= kmax; ++v) {
      const double f = std::max(1.0, static_cast<double>(std::llabs(v)) / gamma);
      if (prod * f > budget) continue;
      k[static_cast<std::size_t>(j)] = v;
      self(self, j + 1, prod * f);
    }
    k[static_cast<std::size_t>(j)] = 0;
  };
  descend(descend, 0, 1.0);

  IndexSet out(IndexSet::Sorted{}, d, std::move(flat));
  out.shape_ = HyperbolicCrossShape{gamma, radius};
  return out;
}

SmoothnessWeight::SmoothnessWeight(double s) : s_(s) {
  if (!(s > 0.5) || !std::isfinite(s)) throw std::invalid_argument("SmoothnessWeight: s must exceed 1/2");
}

double weight_mix(Frequency k, SmoothnessWeight s) {
  std::vector<double> f(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(std::llabs(k[j]));
    f[j] = std::sqrt(1.0 + std::pow(a, 2.0 * s.order()));
  }
  return sorted_product(f);
}

double eigenvalue(Frequency k, SmoothnessWeight s) {
  const double w = weight_mix(k, s);
  return 1.0 / (w * w);
}

IndexSet select_largest_eigenvalues(const IndexSet& parent, std::size_t m, SmoothnessWeight s) {
  if (m > parent.size()) throw std::invalid_argument("select_largest_eigenvalues: m exceeds |parent|");
  std::vector<double> lambda(parent.size());
  for (std::size_t i = 0; i < parent.size(); ++i) lambda[i] = eigenvalue(parent[i], s);
  std::vector<std::size_t> order(parent.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
  std::vector<std::int64_t> flat;
  flat.reserve(m * static_cast<std::size_t>(parent.dimension()));
  for (std::size_t i = 0; i < m; ++i) {
    auto k = parent[order[i]];
    flat.insert(flat.end(), k.begin(), k.end());
  }
  return IndexSet(parent.dimension(), std::move(flat));
}

void write_index_set(std::ostream& os, const IndexSet& set) {
  os << "d=" << set.dimension() << " count=" << set.size() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    auto k = set[i];
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (j) os << ' ';
      os << k[j];
    }
    os << '\n';
  }
}

IndexSet read_index_set(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::invalid_argument("read_index_set: missing header");
  int d = 0;
  std::size_t count = 0;
  if (std::sscanf(header.c_str(), "d=%d count=%zu", &d, &count) != 2 || d < 1) {
    throw std::invalid_argument("read_index_set: malformed header '" + header + "'");
  }
  std::vector<std::int64_t> flat;
  flat.reserve(count * static_cast<std::size_t>(d));
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw std::invalid_argument("read_index_set: truncated body");
    std::istringstream ls(line);
    for (int j = 0; j < d; ++j) {
      std::int64_t v = 0;
      if (!(ls >> v)) throw std::invalid_argument("read_index_set: malformed line '" + line + "'");
      flat.push_back(v);
    }
  }
  return IndexSet(d, std::move(flat));
}

}  // namespace latrec
