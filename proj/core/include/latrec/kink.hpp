#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>

#include "latrec/fourier.hpp"
#include "latrec/index_set.hpp"

namespace latrec {

/// 5^{3/4} * 15 / (4 sqrt 3), making the univariate factor unit-norm.
double kink_constant();

/// c * max(1/5 - (x - 1/2)^2, 0).
double kink_eval_1d(double x);
/// Tensor product of kink_eval_1d over the coordinates.
double kink_eval(std::span<const double> x);

/// int_0^1 g(x) exp(-2 pi i k x) dx in closed form; real and even in k.
double kink_coeff_1d(std::int64_t k);

/// Exact Fourier coefficients of a function, evaluated per frequency.
class SpectralData {
 public:
  virtual ~SpectralData() = default;
  virtual int dimension() const = 0;
  virtual Complex coefficient(Frequency k) const = 0;
  virtual double norm_sq() const = 0;
};

/// The d-variate kink; ||f||^2 = 1.
class KinkSpectrum final : public SpectralData {
 public:
  explicit KinkSpectrum(int dim);
  int dimension() const override { return dim_; }
  Complex coefficient(Frequency k) const override;
  double norm_sq() const override { return 1.0; }

 private:
  int dim_;
};

/// Coefficients of `ref` on the set, in set order.
CoefficientVector restrict_to(const SpectralData& ref, const IndexSet& set);

/// norm_sq - sum_{k in I} |f_k|^2, clamped at zero; throws when the sum
/// exceeds norm_sq by more than 1e-12.
double truncation_error_sq(const SpectralData& ref, double norm_sq, const IndexSet& set);

/// sum_{k in I} |f_k - g_k|^2.
double aliasing_error_sq(const SpectralData& ref, const CoefficientVector& computed, const IndexSet& set);

/// CSV `k,value` for k = -kmax..kmax.
void write_kink_table_csv(std::ostream& os, std::int64_t kmax);

}  // namespace latrec
