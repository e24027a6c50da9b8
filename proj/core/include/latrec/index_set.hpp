#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace latrec {

using Frequency = std::span<const std::int64_t>;

/// Parameters of { k : prod_j max(1, |k_j|/gamma) <= radius }.
struct HyperbolicCrossShape {
  double gamma = 1.0;
  double radius = 2.0;
};

/// Finite set of d-dimensional integer frequencies, stored flat and kept in
/// lexicographic order without duplicates.
class IndexSet {
 public:
  IndexSet() = default;

  /// `flat` holds size*dim integers, one frequency after another, in any
  /// order. Throws std::invalid_argument on duplicates or a ragged buffer.
  IndexSet(int dim, std::vector<std::int64_t> flat);

  int dimension() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return flat_.empty(); }

  Frequency operator[](std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

  const std::vector<std::int64_t>& flat() const { return flat_; }

  std::optional<std::size_t> find(Frequency k) const;
  bool contains(Frequency k) const { return find(k).has_value(); }
  bool is_subset_of(const IndexSet& other) const;

  /// Largest |k_j| over the set, per coordinate.
  std::vector<std::int64_t> max_abs() const;

  const std::optional<HyperbolicCrossShape>& shape() const { return shape_; }

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.dim_ == b.dim_ && a.flat_ == b.flat_;
  }

 private:
  friend IndexSet hyperbolic_cross(int, double, double, std::size_t);
  struct Sorted {};
  IndexSet(Sorted, int dim, std::vector<std::int64_t> flat) : dim_(dim), flat_(std::move(flat)) {}

  int dim_ = 0;
  std::vector<std::int64_t> flat_;
  std::optional<HyperbolicCrossShape> shape_;
};

inline constexpr std::size_t kDefaultMaxIndexSetSize = std::size_t{1} << 24;

/// True iff prod_j max(1, |k_j|/gamma) <= radius, the product taken in
/// coordinate order (the same order the enumeration uses).
bool in_hyperbolic_cross(Frequency k, double gamma, double radius);

/// Hyperbolic cross in lexicographic order, enumerated by coordinate-wise
/// descent with a running product budget. Throws ResourceLimitError once
/// the set would exceed `max_size`.
IndexSet hyperbolic_cross(int d, double gamma, double radius,
                          std::size_t max_size = kDefaultMaxIndexSetSize);

/// Mixed smoothness order s > 1/2.
class SmoothnessWeight {
 public:
  explicit SmoothnessWeight(double s);
  double order() const { return s_; }

 private:
  double s_;
};

/// prod_j (1 + (2 pi |k_j|)^{2s})^{1/2}.
double weight_mix(Frequency k, SmoothnessWeight s);

/// lambda_k = weight_mix(k, s)^{-2}.
double eigenvalue(Frequency k, SmoothnessWeight s);

/// The m frequencies of `parent` with largest eigenvalue; ties keep the
/// lexicographically smaller frequency.
IndexSet select_largest_eigenvalues(const IndexSet& parent, std::size_t m, SmoothnessWeight s);

/// Text format: header `d=<int> count=<int>`, then one frequency per line.
void write_index_set(std::ostream& os, const IndexSet& set);
IndexSet read_index_set(std::istream& is);

}  // namespace latrec
