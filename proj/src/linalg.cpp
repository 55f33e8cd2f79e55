#include "fkqc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fkqc {

namespace {
constexpr std::size_t kDenseCutoff = 64;
constexpr double kPivotRel = 1e-14;
}  // namespace

CyclicBandedMatrix::CyclicBandedMatrix(std::size_t n, int bandwidth)
    : n_(n), w_(bandwidth), diag_(n, 0.0),
      super_(static_cast<std::size_t>(bandwidth), std::vector<double>(n, 0.0)) {
  if (n == 0 || bandwidth < 1 || static_cast<std::size_t>(bandwidth) >= n)
    throw DimensionMismatch("cyclic banded matrix needs 1 <= bandwidth < n");
}

double CyclicBandedMatrix::entry(std::size_t r, std::size_t c) const {
  double v = 0.0;
  if (r == c) v += diag_[r];
  for (int k = 1; k <= w_; ++k) {
    const auto& s = super_[k - 1];
    if ((r + k) % n_ == c) v += s[r];
    if ((c + k) % n_ == r) v += s[c];
  }
  return v;
}

std::vector<double> CyclicBandedMatrix::apply(const std::vector<double>& x) const {
  if (x.size() != n_) throw DimensionMismatch("apply: size mismatch");
  std::vector<double> y(n_);
  for (std::size_t t = 0; t < n_; ++t) y[t] = diag_[t] * x[t];
  for (int k = 1; k <= w_; ++k) {
    const auto& s = super_[k - 1];
    for (std::size_t t = 0; t < n_; ++t) {
      std::size_t c = (t + k) % n_;
      y[t] += s[t] * x[c];
      y[c] += s[t] * x[t];
    }
  }
  return y;
}

Factorization factorize(const CyclicBandedMatrix& a) {
  const std::size_t n = a.dim();
  const int w = a.bandwidth();

  double max_diag = 0.0;
  for (std::size_t t = 0; t < n; ++t) max_diag = std::max(max_diag, std::fabs(a.diag(t)));
  const double tol = kPivotRel * max_diag;

  Factorization f;
  f.n_ = n;
  f.w_ = w;

  if (n < kDenseCutoff) {
    f.dense_ = true;
    std::vector<double> m(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) m[r * n + c] = a.entry(r, c);
    std::vector<double>& l = f.dense_l_;
    l.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = m[i * n + i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * l[i * n + k];
      if (!(s > tol))
        throw NotPositiveDefinite("pivot " + std::to_string(s) + " at index " + std::to_string(i));
      l[i * n + i] = std::sqrt(s);
      for (std::size_t j = i + 1; j < n; ++j) {
        double t = m[j * n + i];
        for (std::size_t k = 0; k < i; ++k) t -= l[j * n + k] * l[i * n + k];
        l[j * n + i] = t / l[i * n + i];
      }
    }
    return f;
  }

  // split off the last w indices; the remaining leading block is strictly
  // banded because every wrap-around contribution touches the border
  const std::size_t m = n - static_cast<std::size_t>(w);
  std::vector<std::vector<double>> band(static_cast<std::size_t>(w) + 1,
                                        std::vector<double>(m, 0.0));
  std::vector<double> a_ib(m * w, 0.0);
  std::vector<double> a_bb(static_cast<std::size_t>(w) * w, 0.0);

  for (std::size_t t = 0; t < n; ++t) {
    if (t < m)
      band[0][t] = a.diag(t);
    else
      a_bb[(t - m) * w + (t - m)] += a.diag(t);
  }
  for (int k = 1; k <= w; ++k) {
    for (std::size_t t = 0; t < n; ++t) {
      const double v = a.super(k, t);
      std::size_t r = t, c = (t + k) % n;
      if (r > c) std::swap(r, c);
      if (c < m) {
        band[c - r][r] += v;
      } else if (r < m) {
        a_ib[r * w + (c - m)] += v;
      } else {
        a_bb[(r - m) * w + (c - m)] += v;
        if (r != c) a_bb[(c - m) * w + (r - m)] += v;
      }
    }
  }

  // banded Cholesky of the leading block: lband[k*m+i] = L[i+k][i]
  std::vector<double>& lb = f.lband_;
  lb.assign((static_cast<std::size_t>(w) + 1) * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double s = band[0][i];
    for (std::size_t k = 1; k <= std::min<std::size_t>(w, i); ++k)
      s -= lb[k * m + (i - k)] * lb[k * m + (i - k)];
    if (!(s > tol))
      throw NotPositiveDefinite("pivot " + std::to_string(s) + " at index " + std::to_string(i));
    const double lii = std::sqrt(s);
    lb[i] = lii;
    for (std::size_t r = 1; r <= std::min<std::size_t>(w, m - 1 - i); ++r) {
      double t = band[r][i];
      for (std::size_t k = 1; k <= std::min<std::size_t>(w - r, i); ++k)
        t -= lb[(k + r) * m + (i - k)] * lb[k * m + (i - k)];
      lb[r * m + i] = t / lii;
    }
  }

  auto forward = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = x[i];
      for (std::size_t k = 1; k <= std::min<std::size_t>(w, i); ++k)
        s -= lb[k * m + (i - k)] * x[i - k];
      x[i] = s / lb[i];
    }
  };

  // Z = L^-1 A_IB, one forward substitution per border column
  f.z_.assign(m * w, 0.0);
  for (int j = 0; j < w; ++j) {
    std::vector<double> col(m);
    for (std::size_t i = 0; i < m; ++i) col[i] = a_ib[i * w + j];
    forward(col);
    for (std::size_t i = 0; i < m; ++i) f.z_[i * w + j] = col[i];
  }

  // Schur complement S = A_BB - Z^T Z, then its dense Cholesky
  std::vector<double> s_mat = a_bb;
  for (int r = 0; r < w; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += f.z_[i * w + r] * f.z_[i * w + c];
      s_mat[static_cast<std::size_t>(r) * w + c] -= acc;
    }
  f.ls_.assign(static_cast<std::size_t>(w) * w, 0.0);
  for (int i = 0; i < w; ++i) {
    double s = s_mat[static_cast<std::size_t>(i) * w + i];
    for (int k = 0; k < i; ++k) s -= f.ls_[i * w + k] * f.ls_[i * w + k];
    if (!(s > tol))
      throw NotPositiveDefinite("border pivot " + std::to_string(s));
    f.ls_[static_cast<std::size_t>(i) * w + i] = std::sqrt(s);
    for (int j = i + 1; j < w; ++j) {
      double t = s_mat[static_cast<std::size_t>(j) * w + i];
      for (int k = 0; k < i; ++k) t -= f.ls_[j * w + k] * f.ls_[i * w + k];
      f.ls_[static_cast<std::size_t>(j) * w + i] = t / f.ls_[i * w + i];
    }
  }
  return f;
}

std::vector<double> Factorization::solve(const std::vector<double>& rhs) const {
  if (rhs.size() != n_) throw DimensionMismatch("solve: rhs size mismatch");

  if (dense_) {
    std::vector<double> x(rhs);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = x[i];
      for (std::size_t k = 0; k < i; ++k) s -= dense_l_[i * n_ + k] * x[k];
      x[i] = s / dense_l_[i * n_ + i];
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = x[ii];
      for (std::size_t k = ii + 1; k < n_; ++k) s -= dense_l_[k * n_ + ii] * x[k];
      x[ii] = s / dense_l_[ii * n_ + ii];
    }
    return x;
  }

  const std::size_t m = n_ - static_cast<std::size_t>(w_);
  const std::size_t w = static_cast<std::size_t>(w_);
  std::vector<double> y(rhs.begin(), rhs.begin() + m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = y[i];
    for (std::size_t k = 1; k <= std::min(w, i); ++k)
      s -= lband_[k * m + (i - k)] * y[i - k];
    y[i] = s / lband_[i];
  }

  std::vector<double> t(w);
  for (std::size_t r = 0; r < w; ++r) {
    double acc = rhs[m + r];
    for (std::size_t i = 0; i < m; ++i) acc -= z_[i * w + r] * y[i];
    t[r] = acc;
  }
  std::vector<double> xb(w);
  for (std::size_t i = 0; i < w; ++i) {
    double s = t[i];
    for (std::size_t k = 0; k < i; ++k) s -= ls_[i * w + k] * xb[k];
    xb[i] = s / ls_[i * w + i];
  }
  for (std::size_t ii = w; ii-- > 0;) {
    double s = xb[ii];
    for (std::size_t k = ii + 1; k < w; ++k) s -= ls_[k * w + ii] * xb[k];
    xb[ii] = s / ls_[ii * w + ii];
  }

  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < w; ++j) acc += z_[i * w + j] * xb[j];
    y[i] -= acc;
  }
  for (std::size_t ii = m; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = 1; k <= std::min(w, m - 1 - ii); ++k)
      s -= lband_[k * m + ii] * y[ii + k];
    y[ii] = s / lband_[ii];
  }

  std::vector<double> x(n_);
  std::copy(y.begin(), y.end(), x.begin());
  std::copy(xb.begin(), xb.end(), x.begin() + m);
  return x;
}

double quadratic_form(const std::vector<double>& z, const CyclicBandedMatrix& w) {
  if (z.size() != w.dim()) throw DimensionMismatch("quadratic_form: size mismatch");
  const std::vector<double> wz = w.apply(z);
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += z[i] * wz[i];
  return acc;
}

double weighted_norm(const std::vector<double>& z, const CyclicBandedMatrix& w) {
  const double q = quadratic_form(z, w);
  if (q >= 0.0) return std::sqrt(q);
  double zz = 0.0;
  for (double v : z) zz += v * v;
  if (q < -1e-12 * zz)
    throw NegativeQuadraticForm("z^T W z = " + std::to_string(q));
  return 0.0;
}

}  // namespace fkqc
