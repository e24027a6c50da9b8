#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "latrec/errors.hpp"
#include "latrec/subsampling.hpp"

namespace latrec {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct Whitened {
  MatrixXcd y;  // columns are the conjugated input rows
  MatrixXcd v;  // G^{-1/2} y, so sum v v^* = Id
  double lower = 0.0;
  double upper = 0.0;
};

Whitened whiten(const MatrixXcd& rows, const char* who) {
  Whitened w;
  w.y = rows.adjoint();
  const MatrixXcd g = w.y * w.y.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g);
  if (es.info() != Eigen::Success) throw std::runtime_error(std::string(who) + ": eigensolver failed");
  const VectorXd& lam = es.eigenvalues();
  w.lower = lam.minCoeff();
  w.upper = lam.maxCoeff();
  if (!(w.upper > 0.0) || !(w.lower > 1e-13 * w.upper)) {
    throw std::invalid_argument(std::string(who) + ": input rows do not span the coefficient space");
  }
  const MatrixXcd& q = es.eigenvectors();
  const MatrixXcd inv_sqrt = q * lam.cwiseSqrt().cwiseInverse().asDiagonal() * q.adjoint();
  w.v = inv_sqrt * w.y;
  return w;
}

void eigh(const MatrixXcd& x, VectorXd& lam, MatrixXcd& q) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(x);
  if (es.info() != Eigen::Success) throw std::runtime_error("bss: eigensolver failed");
  lam = es.eigenvalues();
  q = es.eigenvectors();
}

SpectralBounds weighted_gram_bounds(const MatrixXcd& y, const std::vector<std::size_t>& cols,
                                    const std::vector<double>& s) {
  const Index m = y.rows();
  MatrixXcd g = MatrixXcd::Zero(m, m);
  for (std::size_t q = 0; q < cols.size(); ++q) {
    g.selfadjointView<Eigen::Lower>().rankUpdate(y.col(static_cast<Index>(cols[q])), s[q]);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g.selfadjointView<Eigen::Lower>(), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

}  // namespace

WeightedBssResult bss_weighted_rows(const MatrixXcd& rows, double b, SpectralBounds bounds) {
  const Index m = rows.cols();
  const Index n = rows.rows();
  if (m == 0 || n == 0) throw std::invalid_argument("bss_weighted_rows: empty system");
  const double kap = kappa(bounds.lower, bounds.upper);
  if (!(b > kap * kap)) throw std::invalid_argument("bss_weighted_rows: infeasible b, need b > kappa^2");

  const Whitened w = whiten(rows, "bss_weighted_rows");
  const double slack = 1e-9;
  if (w.lower < 0.5 * bounds.lower * (1.0 - slack) || w.upper > 1.5 * bounds.upper * (1.0 + slack)) {
    throw std::invalid_argument("bss_weighted_rows: input rows violate [A/2, 3B/2]");
  }

  const auto steps = static_cast<std::size_t>(std::floor(b * static_cast<double>(m)));
  const double d = static_cast<double>(steps) / static_cast<double>(m);
  const double sd = std::sqrt(d);
  const double eps_l = 1.0 / sd, delta_l = 1.0;
  const double eps_u = (sd - 1.0) / (d + sd), delta_u = (sd + 1.0) / (sd - 1.0);
  double l = -static_cast<double>(m) / eps_l;
  double u = static_cast<double>(m) / eps_u;

  MatrixXcd x = MatrixXcd::Zero(m, m);
  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  VectorXd lam;
  MatrixXcd q;
  for (std::size_t step = 0; step < steps; ++step) {
    eigh(x, lam, q);
    const double lp = l + delta_l, up = u + delta_u;
    const VectorXd fl1 = (lam.array() - lp).inverse().matrix();
    const VectorXd fu1 = (up - lam.array()).inverse().matrix();
    const double phi_l = (lam.array() - l).inverse().sum();
    const double phi_u = (u - lam.array()).inverse().sum();
    const double phi_lp = fl1.sum(), phi_up = fu1.sum();

    const Eigen::MatrixXd p2 = (q.adjoint() * w.v).cwiseAbs2();
    const VectorXd cl1 = p2.transpose() * fl1;
    const VectorXd cl2 = p2.transpose() * fl1.cwiseAbs2();
    const VectorXd cu1 = p2.transpose() * fu1;
    const VectorXd cu2 = p2.transpose() * fu1.cwiseAbs2();

    Index best = -1;
    double best_gap = 0.0, best_l = 0.0, best_u = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double li = cl2[i] / (phi_lp - phi_l) - cl1[i];
      const double ui = cu2[i] / (phi_u - phi_up) + cu1[i];
      if (!(li > 0.0)) continue;
      if (best < 0 || li - ui > best_gap) {
        best = i;
        best_gap = li - ui;
        best_l = li;
        best_u = ui;
      }
    }
    if (best < 0 || best_gap < -1e-12 * best_l) throw CertificateError("bss_weighted_rows: no admissible row");
    const double t = 2.0 / (best_l + best_u);
    x.noalias() += t * w.v.col(best) * w.v.col(best).adjoint();
    s[static_cast<std::size_t>(best)] += t;
    l = lp;
    u = up;
  }

  eigh(x, lam, q);
  const double scale = 1.0 / lam.minCoeff();
  WeightedBssResult res;
  for (Index i = 0; i < n; ++i) {
    if (s[static_cast<std::size_t>(i)] > 0.0) {
      res.rows.push_back(static_cast<std::size_t>(i));
      res.s.push_back(s[static_cast<std::size_t>(i)] * scale);
    }
  }

  const SpectralBounds out = weighted_gram_bounds(w.y, res.rows, res.s);
  const double upper_cap = bounds.upper * bss_upper_factor(b, kap);
  if (out.lower < 0.5 * bounds.lower * (1.0 - slack) || out.upper > upper_cap * (1.0 + slack)) {
    throw CertificateError("bss_weighted_rows: output violates the two-sided bound");
  }
  return res;
}

PlainBssResult bss_plain_rows(const MatrixXcd& rows, double b, const PlainBssOptions& opts,
                              std::optional<double> reference_lower) {
  const Index m = rows.cols();
  const Index n = rows.rows();
  if (m == 0 || n == 0) throw std::invalid_argument("bss_plain_rows: empty system");
  const double md = static_cast<double>(m);
  if (!(b > 1.0 + 1.0 / md)) throw std::invalid_argument("bss_plain_rows: infeasible b, need b > 1 + 1/|I|");
  if (!(opts.slack >= 1.0)) throw std::invalid_argument("bss_plain_rows: slack must be >= 1");

  const Whitened w = whiten(rows, "bss_plain_rows");
  const auto steps = static_cast<std::size_t>(std::floor(b * md));
  const double qf = std::sqrt(static_cast<double>(steps) / md);
  const double eps = opts.slack * md / (qf - 1.0);
  const double delta = 1.0 / (opts.slack * md + eps);
  const double t = static_cast<double>(n) / md;
  double l = -md / eps;

  // Row norms of zero never help and must never be picked.
  std::vector<char> admissible(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) admissible[static_cast<std::size_t>(i)] = w.v.col(i).squaredNorm() > 0.0;

  MatrixXcd x = MatrixXcd::Zero(m, m);
  MatrixXcd x_saved = x;
  VectorXd lam = VectorXd::Zero(m);
  MatrixXcd q = MatrixXcd::Identity(m, m);
  std::vector<std::size_t> chosen;
  std::vector<int> uses(static_cast<std::size_t>(n), 0);
  std::size_t cap = std::max<std::size_t>(1, opts.max_block);
  PlainBssResult res;
  res.input_lower = w.lower;

  // Two-column block [V | Z0] so one product serves both updates.
  MatrixXcd vz(m, 2 * n);
  while (chosen.size() < steps) {
    const double gap = lam.minCoeff() - l;
    std::size_t r = static_cast<std::size_t>(std::floor(0.5 * gap / delta));
    r = std::clamp<std::size_t>(r, 1, std::min(cap, steps - chosen.size()));
    const double lhat = l + static_cast<double>(r) * delta;

    const VectorXd dinv = (lam.array() - lhat).inverse().matrix();
    vz.leftCols(n) = w.v;
    // spelled out so both products go through the blocked GEMM kernel
    MatrixXcd qv;
    qv.noalias() = q.adjoint() * w.v;
    qv = dinv.asDiagonal() * qv;
    vz.rightCols(n).noalias() = q * qv;
    double phi = dinv.sum();
    VectorXd a = (w.v.conjugate().cwiseProduct(vz.rightCols(n))).colwise().sum().real().transpose();
    VectorXd bb = vz.rightCols(n).colwise().squaredNorm().transpose();

    MatrixXcd zs(m, static_cast<Index>(r));
    MatrixXcd ws(static_cast<Index>(r), n);
    VectorXd cs(static_cast<Index>(r));
    const std::size_t base = chosen.size();
    for (std::size_t k = 0; k < r; ++k) {
      Index best = -1, best_new = -1;
      double dec_best = -1.0, dec_new = -1.0;
      for (Index i = 0; i < n; ++i) {
        if (!admissible[static_cast<std::size_t>(i)]) continue;
        const double dec = t * bb[i] / (1.0 + t * a[i]);
        if (dec > dec_best) {
          dec_best = dec;
          best = i;
        }
        if (uses[static_cast<std::size_t>(i)] == 0 && dec > dec_new) {
          dec_new = dec;
          best_new = i;
        }
      }
      if (best < 0) throw CertificateError("bss_plain_rows: no admissible row");
      Index pick = best;
      if (best_new >= 0) {
        const bool ok = r == 1 ? phi - dec_new <= eps * (1.0 - 1e-10) : dec_new >= 0.9 * dec_best;
        if (ok) pick = best_new;
      }
      const auto kk = static_cast<Index>(k);
      VectorXcd z = vz.col(n + pick);
      if (kk > 0) z.noalias() -= zs.leftCols(kk) * cs.head(kk).cast<Complex>().cwiseProduct(ws.block(0, pick, kk, 1).col(0));
      const double c = t / (1.0 + t * a[pick]);
      phi -= t * bb[pick] / (1.0 + t * a[pick]);

      Eigen::RowVectorXcd zv = z.adjoint() * vz;  // [z^* V | z^* Z0]
      Eigen::RowVectorXcd wrow = zv.leftCols(n);
      Eigen::RowVectorXcd urow = zv.rightCols(n);
      if (kk > 0) {
        const VectorXcd zz = (zs.leftCols(kk).adjoint() * z).conjugate().cwiseProduct(cs.head(kk).cast<Complex>());
        urow.noalias() -= zz.transpose() * ws.topRows(kk);
      }
      const double zn = z.squaredNorm();
      for (Index i = 0; i < n; ++i) {
        const Complex wi = wrow[i];
        const double aw = std::norm(wi);
        a[i] -= c * aw;
        bb[i] += -2.0 * c * std::real(std::conj(wi) * urow[i]) + c * c * aw * zn;
      }
      zs.col(kk) = z;
      ws.row(kk) = wrow;
      cs[kk] = c;

      x.noalias() += t * w.v.col(pick) * w.v.col(pick).adjoint();
      chosen.push_back(static_cast<std::size_t>(pick));
      ++uses[static_cast<std::size_t>(pick)];
    }

    VectorXd lam2;
    MatrixXcd q2;
    eigh(x, lam2, q2);
    const bool above = lam2.minCoeff() > lhat;
    const double phi_exact = above ? (lam2.array() - lhat).inverse().sum() : 0.0;
    if (above && phi_exact <= eps * (1.0 + 1e-9)) {
      l = lhat;
      lam = std::move(lam2);
      q = std::move(q2);
      x_saved = x;
      ++res.refreshes;
      cap = std::min(std::max<std::size_t>(1, opts.max_block), 2 * cap);
    } else {
      if (r == 1) throw CertificateError("bss_plain_rows: barrier potential exceeded on a single step");
      for (std::size_t k = base; k < chosen.size(); ++k) --uses[chosen[k]];
      chosen.resize(base);
      x = x_saved;
      cap = std::max<std::size_t>(1, r / 2);
      ++res.rollbacks;
    }
  }

  std::sort(chosen.begin(), chosen.end());
  res.rows = chosen;
  res.lower_guarantee = (qf - 1.0) * (qf - 1.0) / opts.slack * w.lower;

  const std::vector<double> tw(chosen.size(), t);
  res.lower_observed = weighted_gram_bounds(w.y, chosen, tw).lower;
  const double ref = reference_lower.value_or(w.lower);
  if (res.lower_observed < plain_bss_lower_factor(b) * ref) {
    throw CertificateError("bss_plain_rows: output lower constant below the certified bound");
  }
  return res;
}

}  // namespace latrec
