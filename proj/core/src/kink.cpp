#include "latrec/kink.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace latrec {

namespace {

const double kHalfWidth = 1.0 / std::sqrt(5.0);

}  // namespace

double kink_constant() { return std::pow(5.0, 0.75) * 15.0 / (4.0 * std::sqrt(3.0)); }

double kink_eval_1d(double x) {
  const double y = x - 0.5;
  return kink_constant() * std::max(0.2 - y * y, 0.0);
}

double kink_eval(std::span<const double> x) {
  double v = 1.0;
  for (double xj : x) v *= kink_eval_1d(xj);
  return v;
}

double kink_coeff_1d(std::int64_t k) {
  const double c = kink_constant();
  const double a = kHalfWidth;
  if (k == 0) return c * 4.0 / 3.0 * a * a * a;
  // shift to the centre: exp(-2 pi i k / 2) = (-1)^k, then the even part
  const double w = 2.0 * std::numbers::pi * static_cast<double>(k);
  const double wa = w * a;
  const double val = c * 4.0 * (std::sin(wa) - wa * std::cos(wa)) / (w * w * w);
  return (k % 2 == 0) ? val : -val;
}

KinkSpectrum::KinkSpectrum(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("KinkSpectrum: dimension must be positive");
}

Complex KinkSpectrum::coefficient(Frequency k) const {
  if (static_cast<int>(k.size()) != dim_) throw std::invalid_argument("KinkSpectrum: frequency dimension mismatch");
  double v = 1.0;
  for (auto kj : k) v *= kink_coeff_1d(kj);
  return {v, 0.0};
}

CoefficientVector restrict_to(const SpectralData& ref, const IndexSet& set) {
  if (set.dimension() != ref.dimension()) throw std::invalid_argument("restrict_to: dimension mismatch");
  CoefficientVector out(static_cast<Eigen::Index>(set.size()));
  for (std::size_t q = 0; q < set.size(); ++q) out[static_cast<Eigen::Index>(q)] = ref.coefficient(set[q]);
  return out;
}

double truncation_error_sq(const SpectralData& ref, double norm_sq, const IndexSet& set) {
  if (set.empty()) return norm_sq;
  const double captured = restrict_to(ref, set).squaredNorm();
  const double diff = norm_sq - captured;
  if (diff < -1e-12) throw std::domain_error("truncation_error_sq: coefficients exceed the stated norm");
  return std::max(diff, 0.0);
}

double aliasing_error_sq(const SpectralData& ref, const CoefficientVector& computed, const IndexSet& set) {
  if (static_cast<std::size_t>(computed.size()) != set.size()) {
    throw std::invalid_argument("aliasing_error_sq: coefficient count does not match the index set");
  }
  if (set.empty()) return 0.0;
  return (restrict_to(ref, set) - computed).squaredNorm();
}

void write_kink_table_csv(std::ostream& os, std::int64_t kmax) {
  os << "k,value\n";
  char buf[64];
  for (std::int64_t k = -kmax; k <= kmax; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", kink_coeff_1d(k));
    os << k << ',' << buf << '\n';
  }
}

}  // namespace latrec
