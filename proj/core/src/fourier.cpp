#include "latrec/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace latrec {

namespace {

__extension__ using u128 = unsigned __int128;

// fftw planning is not thread-safe; execution on fresh buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer fftw_buffer(std::size_t n) {
  auto* p = fftw_alloc_complex(n);
  if (!p) throw std::bad_alloc();
  return FftwBuffer(p);
}

// Per-thread scratch pair that only grows, so repeated transforms skip the
// allocation and the page faults that come with fresh large blocks.
struct FftScratch {
  FftwBuffer in;
  FftwBuffer out;
  std::size_t capacity = 0;
};

FftScratch& fft_scratch(std::size_t n) {
  thread_local FftScratch s;
  if (s.capacity < n) {
    s.in = fftw_buffer(n);
    s.out = fftw_buffer(n);
    s.capacity = n;
  }
  return s;
}

// Out-of-place length-M plans in both directions. FFTW_ESTIMATE keeps the
// chosen algorithm, and with it the rounding, independent of timings.
class FftPair {
 public:
  explicit FftPair(std::size_t m) : m_(m) {
    auto in = fftw_buffer(m);
    auto out = fftw_buffer(m);
    std::lock_guard lock(fftw_planner_mutex());
    const int n = static_cast<int>(m);
    forward_ = fftw_plan_dft_1d(n, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(n, in.get(), out.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw std::runtime_error("FftPair: FFTW planning failed");
  }
  FftPair(const FftPair&) = delete;
  FftPair& operator=(const FftPair&) = delete;
  ~FftPair() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // out[m] = sum_i in[i] exp(-2 pi i i m / M)
  void forward(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(forward_, in, out); }
  // out[i] = sum_m in[m] exp(+2 pi i i m / M)
  void backward(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(backward_, in, out); }
  std::size_t size() const { return m_; }

 private:
  std::size_t m_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

inline Complex cmul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}
inline Complex cmul_conj(Complex a, Complex b) {  // conj(a) * b
  return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

Complex unit_phase(double t) {
  t -= std::floor(t);
  const double a = 2.0 * std::numbers::pi * t;
  return {std::cos(a), std::sin(a)};
}

// exp(2 pi i r / M) for an exact residue r.
Complex residue_phase(std::uint64_t r, std::uint64_t m) {
  const double a = 2.0 * std::numbers::pi * (static_cast<double>(r) / static_cast<double>(m));
  return {std::cos(a), std::sin(a)};
}

}  // namespace

struct SystemOperator::Impl {
  OperatorKind kind = OperatorKind::dense;
  IndexSet set;

  // lattice_fft
  std::optional<Rank1Lattice> lat;
  std::vector<std::int64_t> residues;
  bool masked = false;
  std::vector<std::size_t> mask;
  std::unique_ptr<FftPair> fft;

  // dense
  int dim = 0;
  std::size_t npoints = 0;
  std::vector<double> points;
  std::vector<std::int64_t> kmax;
  // first coordinate in which frequency q differs from frequency q-1
  std::vector<int> first_diff;

  std::size_t rows() const {
    if (kind == OperatorKind::dense) return npoints;
    return masked ? mask.size() : static_cast<std::size_t>(lat->size());
  }

  // Per-coordinate tables exp(2 pi i v x_j), v in [-kmax_j, kmax_j].
  void fill_tables(const double* x, std::vector<std::vector<Complex>>& tables) const {
    for (int j = 0; j < dim; ++j) {
      const auto K = kmax[static_cast<std::size_t>(j)];
      auto& t = tables[static_cast<std::size_t>(j)];
      t.resize(static_cast<std::size_t>(2 * K + 1));
      for (std::int64_t v = -K; v <= K; ++v) t[static_cast<std::size_t>(v + K)] = unit_phase(static_cast<double>(v) * x[j]);
    }
  }

  // Calls visit(q, E_iq) for every frequency q of one point, reusing
  // products over shared lexicographic prefixes.
  template <class Visit>
  void sweep_row(const std::vector<std::vector<Complex>>& tables, std::vector<Complex>& prefix, Visit&& visit) const {
    prefix[0] = Complex(1.0, 0.0);
    const std::size_t n = set.size();
    for (std::size_t q = 0; q < n; ++q) {
      auto k = set[q];
      for (int j = first_diff[q]; j < dim; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        prefix[jj + 1] = cmul(prefix[jj], tables[jj][static_cast<std::size_t>(k[jj] + kmax[jj])]);
      }
      visit(q, prefix[static_cast<std::size_t>(dim)]);
    }
  }
};

std::string_view to_string(OperatorKind kind) {
  return kind == OperatorKind::lattice_fft ? "lattice_fft" : "dense";
}

namespace {

std::shared_ptr<SystemOperator::Impl> make_lattice_impl(const Rank1Lattice& lat, const IndexSet& set) {
  if (set.empty() || set.dimension() != lat.dimension()) {
    throw std::invalid_argument("SystemOperator::lattice: index set must be non-empty and match the lattice dimension");
  }
  auto impl = std::make_shared<SystemOperator::Impl>();
  impl->kind = OperatorKind::lattice_fft;
  impl->set = set;
  impl->lat = lat;
  impl->residues = lattice_residues(lat, set);
  impl->fft = std::make_unique<FftPair>(static_cast<std::size_t>(lat.size()));
  return impl;
}

}  // namespace

SystemOperator SystemOperator::lattice(const Rank1Lattice& lat, const IndexSet& set) {
  return SystemOperator(make_lattice_impl(lat, set));
}

SystemOperator SystemOperator::lattice(const Rank1Lattice& lat, const IndexSet& set, std::vector<std::size_t> row_mask) {
  for (auto j : row_mask) {
    if (j >= static_cast<std::size_t>(lat.size())) throw std::invalid_argument("SystemOperator::lattice: mask index out of range");
  }
  auto impl = make_lattice_impl(lat, set);
  impl->masked = true;
  impl->mask = std::move(row_mask);
  return SystemOperator(std::move(impl));
}

SystemOperator SystemOperator::dense(int dim, std::vector<double> points, const IndexSet& set) {
  if (set.empty() || set.dimension() != dim) {
    throw std::invalid_argument("SystemOperator::dense: index set must be non-empty and match the point dimension");
  }
  if (points.size() % static_cast<std::size_t>(dim) != 0) throw std::invalid_argument("SystemOperator::dense: ragged point buffer");
  auto impl = std::make_shared<Impl>();
  impl->kind = OperatorKind::dense;
  impl->set = set;
  impl->dim = dim;
  impl->npoints = points.size() / static_cast<std::size_t>(dim);
  impl->points = std::move(points);
  impl->kmax = set.max_abs();
  impl->first_diff.resize(set.size());
  for (std::size_t q = 0; q < set.size(); ++q) {
    int p = 0;
    if (q > 0) {
      auto a = set[q - 1], b = set[q];
      while (p < dim && a[p] == b[p]) ++p;
    }
    impl->first_diff[q] = p;
  }
  return SystemOperator(std::move(impl));
}

SystemOperator SystemOperator::for_plan(const SamplePlan& plan, const IndexSet& set) {
  if (plan.lattice()) return lattice(*plan.lattice(), set);
  return dense(plan.dimension(), plan.points(), set);
}

OperatorKind SystemOperator::kind() const { return impl_->kind; }
std::size_t SystemOperator::rows() const { return impl_->rows(); }
std::size_t SystemOperator::cols() const { return impl_->set.size(); }
const IndexSet& SystemOperator::index_set() const { return impl_->set; }
const std::vector<std::size_t>& SystemOperator::row_mask() const { return impl_->mask; }
std::int64_t SystemOperator::lattice_size() const { return impl_->lat ? impl_->lat->size() : 0; }

ValueVector SystemOperator::forward(const CoefficientVector& a) const {
  const Impl& op = *impl_;
  if (static_cast<std::size_t>(a.size()) != cols()) throw std::invalid_argument("forward: coefficient length mismatch");
  ValueVector f(static_cast<Eigen::Index>(rows()));

  if (op.kind == OperatorKind::lattice_fft) {
    const std::size_t m = op.fft->size();
    auto& scratch = fft_scratch(m);
    fftw_complex* in = scratch.in.get();
    fftw_complex* out = scratch.out.get();
    auto* acc = reinterpret_cast<Complex*>(in);
    std::fill(acc, acc + m, Complex(0.0, 0.0));
    for (std::size_t q = 0; q < op.residues.size(); ++q) acc[op.residues[q]] += a[static_cast<Eigen::Index>(q)];
    op.fft->backward(in, out);
    const auto* vals = reinterpret_cast<const Complex*>(out);
    if (op.masked) {
      for (std::size_t j = 0; j < op.mask.size(); ++j) f[static_cast<Eigen::Index>(j)] = vals[op.mask[j]];
    } else {
      std::copy(vals, vals + m, f.data());
    }
    return f;
  }

  std::vector<std::vector<Complex>> tables(static_cast<std::size_t>(op.dim));
  std::vector<Complex> prefix(static_cast<std::size_t>(op.dim) + 1);
  const Complex* ad = a.data();
  for (std::size_t i = 0; i < op.npoints; ++i) {
    op.fill_tables(op.points.data() + i * static_cast<std::size_t>(op.dim), tables);
    Complex sum(0.0, 0.0);
    op.sweep_row(tables, prefix, [&](std::size_t q, Complex e) { sum += cmul(ad[q], e); });
    f[static_cast<Eigen::Index>(i)] = sum;
  }
  return f;
}

CoefficientVector SystemOperator::adjoint(const ValueVector& f) const {
  const Impl& op = *impl_;
  if (static_cast<std::size_t>(f.size()) != rows()) throw std::invalid_argument("adjoint: value length mismatch");
  CoefficientVector a = CoefficientVector::Zero(static_cast<Eigen::Index>(cols()));

  if (op.kind == OperatorKind::lattice_fft) {
    const std::size_t m = op.fft->size();
    auto& scratch = fft_scratch(m);
    fftw_complex* in = scratch.in.get();
    fftw_complex* out = scratch.out.get();
    auto* acc = reinterpret_cast<Complex*>(in);
    if (op.masked) {
      std::fill(acc, acc + m, Complex(0.0, 0.0));
      for (std::size_t j = 0; j < op.mask.size(); ++j) acc[op.mask[j]] += f[static_cast<Eigen::Index>(j)];
    } else {
      std::copy(f.data(), f.data() + m, acc);
    }
    op.fft->forward(in, out);
    const auto* vals = reinterpret_cast<const Complex*>(out);
    for (std::size_t q = 0; q < op.residues.size(); ++q) a[static_cast<Eigen::Index>(q)] = vals[op.residues[q]];
    return a;
  }

  std::vector<std::vector<Complex>> tables(static_cast<std::size_t>(op.dim));
  std::vector<Complex> prefix(static_cast<std::size_t>(op.dim) + 1);
  Complex* ad = a.data();
  for (std::size_t i = 0; i < op.npoints; ++i) {
    const Complex fi = f[static_cast<Eigen::Index>(i)];
    if (fi == Complex(0.0, 0.0)) continue;
    op.fill_tables(op.points.data() + i * static_cast<std::size_t>(op.dim), tables);
    op.sweep_row(tables, prefix, [&](std::size_t q, Complex e) { ad[q] += cmul_conj(e, fi); });
  }
  return a;
}

CoefficientVector SystemOperator::apply_normal(std::span<const double> weights, const CoefficientVector& a) const {
  if (weights.size() != rows()) throw std::invalid_argument("apply_normal: weight length mismatch");
  ValueVector f = forward(a);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("apply_normal: negative weight");
    f[static_cast<Eigen::Index>(i)] *= weights[i];
  }
  return adjoint(f);
}

Eigen::MatrixXcd SystemOperator::dense_matrix() const {
  const Impl& op = *impl_;
  const auto n = static_cast<Eigen::Index>(rows());
  const auto c = static_cast<Eigen::Index>(cols());
  Eigen::MatrixXcd L(n, c);
  if (op.kind == OperatorKind::lattice_fft) {
    const auto m = static_cast<std::uint64_t>(op.lat->size());
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint64_t row = op.masked ? op.mask[static_cast<std::size_t>(i)] : static_cast<std::uint64_t>(i);
      for (Eigen::Index q = 0; q < c; ++q) {
        const auto r = static_cast<std::uint64_t>(
            static_cast<u128>(row) * static_cast<std::uint64_t>(op.residues[static_cast<std::size_t>(q)]) % m);
        L(i, q) = residue_phase(r, m);
      }
    }
    return L;
  }
  std::vector<std::vector<Complex>> tables(static_cast<std::size_t>(op.dim));
  std::vector<Complex> prefix(static_cast<std::size_t>(op.dim) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    op.fill_tables(op.points.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(op.dim), tables);
    op.sweep_row(tables, prefix, [&](std::size_t q, Complex e) { L(i, static_cast<Eigen::Index>(q)) = e; });
  }
  return L;
}

Eigen::MatrixXcd SystemOperator::gram(std::span<const double> weights) const {
  const Impl& op = *impl_;
  if (weights.size() != rows()) throw std::invalid_argument("gram: weight length mismatch");
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("gram: negative weight");
  }
  const auto c = static_cast<Eigen::Index>(cols());
  if (op.kind == OperatorKind::lattice_fft) {
    // G_kl = sum_i u_i exp(2 pi i i (r_l - r_k) / M) = h[(r_l - r_k) mod M],
    // h the backward transform of the per-lattice-point weights u.
    const std::size_t m = op.fft->size();
    auto& scratch = fft_scratch(m);
    fftw_complex* in = scratch.in.get();
    fftw_complex* out = scratch.out.get();
    auto* u = reinterpret_cast<Complex*>(in);
    std::fill(u, u + m, Complex(0.0, 0.0));
    if (op.masked) {
      for (std::size_t j = 0; j < op.mask.size(); ++j) u[op.mask[j]] += weights[j];
    } else {
      for (std::size_t i = 0; i < m; ++i) u[i] = weights[i];
    }
    op.fft->backward(in, out);
    const auto* h = reinterpret_cast<const Complex*>(out);
    const auto mm = static_cast<std::int64_t>(m);
    Eigen::MatrixXcd G(c, c);
    for (Eigen::Index l = 0; l < c; ++l) {
      for (Eigen::Index k = 0; k < c; ++k) {
        std::int64_t diff = op.residues[static_cast<std::size_t>(l)] - op.residues[static_cast<std::size_t>(k)];
        if (diff < 0) diff += mm;
        G(k, l) = h[diff];
      }
    }
    return G;
  }
  const Eigen::MatrixXcd L = dense_matrix();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::MatrixXcd WL = w.cwiseSqrt().asDiagonal() * L;
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(c, c);
  G.selfadjointView<Eigen::Lower>().rankUpdate(WL.adjoint());
  return G.selfadjointView<Eigen::Lower>();
}

}  // namespace latrec
