#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "latrec/index_set.hpp"

namespace latrec {

/// Rank-1 lattice { (i z mod M) / M : i = 0..M-1 } in [0,1)^d.
class Rank1Lattice {
 public:
  /// Components of z are reduced modulo M. Throws if M < 1 or z is empty.
  Rank1Lattice(std::vector<std::int64_t> generator, std::int64_t size);

  int dimension() const { return static_cast<int>(z_.size()); }
  std::int64_t size() const { return m_; }
  const std::vector<std::int64_t>& generator() const { return z_; }

  /// Coordinate j of point i, exactly (i z_j mod M) / M rounded once.
  double coordinate(std::int64_t i, int j) const;

  friend bool operator==(const Rank1Lattice&, const Rank1Lattice&) = default;

 private:
  std::vector<std::int64_t> z_;
  std::int64_t m_;
};

/// MZ constants (A, B) of a (points, weights, index set) triple.
struct SpectralBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Points in [0,1)^d (row-major, one point per row) with nonnegative weights.
/// Plans built from a lattice keep it, so point i is lattice point i.
class SamplePlan {
 public:
  SamplePlan(int dim, std::vector<double> points, std::vector<double> weights);

  int dimension() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  const double* point(std::size_t i) const { return points_.data() + i * static_cast<std::size_t>(dim_); }

  const std::optional<Rank1Lattice>& lattice() const { return lattice_; }
  const std::optional<IndexSet>& stable_for() const { return stable_for_; }
  const std::optional<SpectralBounds>& bounds() const { return bounds_; }

  SamplePlan& with_stability(IndexSet set, std::optional<SpectralBounds> bounds = std::nullopt);

 private:
  friend SamplePlan lattice_points(const Rank1Lattice&);

  int dim_;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::optional<Rank1Lattice> lattice_;
  std::optional<IndexSet> stable_for_;
  std::optional<SpectralBounds> bounds_;
};

/// The M lattice points with uniform weights 1/M.
SamplePlan lattice_points(const Rank1Lattice& lat);

/// <k, z> mod M for every k in the set, in set order; exact 128-bit arithmetic.
std::vector<std::int64_t> lattice_residues(const Rank1Lattice& lat, const IndexSet& set);

/// True iff k -> <k, z> mod M is injective on the set.
bool is_reconstructing(const Rank1Lattice& lat, const IndexSet& set);

/// Candidate sizes for the generator search: primes, starting at the next
/// prime >= start_factor*|I| (or `first_size` when nonzero), each following
/// one the next prime >= growth*previous, up to `max_size`.
struct LatticeSchedule {
  std::int64_t first_size = 0;
  double start_factor = 2.0;
  double growth = 2.0;
  std::int64_t max_size = std::int64_t{1} << 40;
  int attempts_per_size = 8;
  int candidates_per_component = 16;
};

/// Component-by-component search with random candidates: z_j is drawn per
/// component and kept once <k, z> mod M is injective on the projection of
/// the set to its first j coordinates. Deterministic in `seed`.
/// Throws LatticeSearchError when the schedule is exhausted.
Rank1Lattice search_generator(const IndexSet& set, std::uint64_t seed,
                              const LatticeSchedule& schedule = {});

bool is_prime(std::uint64_t n);
std::uint64_t next_prime(std::uint64_t n);

/// Single line `d M z_1 ... z_d`.
void write_lattice(std::ostream& os, const Rank1Lattice& lat);
Rank1Lattice read_lattice(std::istream& is);

/// CSV with columns x_1..x_d,weight and 17 significant digits.
void write_plan_csv(std::ostream& os, const SamplePlan& plan);

}  // namespace latrec
