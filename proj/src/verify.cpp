#include "fkqc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace fkqc {

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) s += x[t] * y[t];
  return s;
}

double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

std::vector<double> sub(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) d[t] = x[t] - y[t];
  return d;
}

}  // namespace

std::vector<double> dense_reference_solve(std::vector<double> a, std::vector<double> rhs,
                                          std::size_t n) {
  if (a.size() != n * n || rhs.size() != n)
    throw DimensionMismatch("dense_reference_solve: shape mismatch");

  std::vector<std::size_t> perm(n);
  for (std::size_t r = 0; r < n; ++r) perm[r] = r;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(a[perm[col] * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::abs(a[perm[r] * n + col]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (!(best > 0.0)) throw SingularMatrix("dense_reference_solve: zero pivot");
    std::swap(perm[col], perm[pivot]);

    double p = a[perm[col] * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double factor = a[perm[r] * n + col] / p;
      if (factor == 0.0) continue;
      a[perm[r] * n + col] = 0.0;
      for (std::size_t c = col + 1; c < n; ++c)
        a[perm[r] * n + c] -= factor * a[perm[col] * n + c];
      rhs[perm[r]] -= factor * rhs[perm[col]];
    }
  }

  std::vector<double> x(n);
  for (std::size_t step = n; step-- > 0;) {
    double s = rhs[perm[step]];
    for (std::size_t c = step + 1; c < n; ++c) s -= a[perm[step] * n + c] * x[c];
    x[step] = s / a[perm[step] * n + step];
  }
  return x;
}

std::vector<double> densify(const CyclicBandedMatrix& matrix) {
  std::size_t n = matrix.dim();
  std::vector<double> dense(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) dense[r * n + c] = matrix.entry(r, c);
  return dense;
}

IdentityCheck check_identity(const ModelParams& params, const Partition& partition,
                             const QuantityOfInterest& qoi) {
  AssembledSystem sys_a = assemble_system(params, partition, BondRole::Ea);
  AssembledSystem sys_ac = assemble_system(params, partition, BondRole::Eac);
  Factorization fac_a = factorize(sys_a.matrix);
  Factorization fac_ac = factorize(sys_ac.matrix);

  std::vector<double> y_a = fac_a.solve(sys_a.f.data());
  std::vector<double> y_ac = fac_ac.solve(sys_ac.f.data());
  std::vector<double> g_a = fac_a.solve(qoi.q.data());
  std::vector<double> g_ac = fac_ac.solve(qoi.q.data());

  std::vector<double> e = sub(y_a, y_ac);
  std::vector<double> ehat = sub(g_a, g_ac);

  ChainVector y_ac_chain(params.M, y_ac);
  ChainVector residual = residual_primal(params, partition, y_ac_chain);

  IdentityCheck check;
  check.lhs = dot(qoi.q.data(), e);
  check.rhs = dot(g_ac, residual.data()) + dot(ehat, sys_a.matrix.apply(e));
  // Both sides cancel to near zero on well-resolved partitions, so the gap is
  // measured against the magnitudes entering the identity, not the cancelled value.
  double magnitude = norm2(qoi.q.data()) * (norm2(y_a) + norm2(y_ac));
  double scale = std::max({std::abs(check.lhs), std::abs(check.rhs), magnitude, 1e-300});
  check.rel_discrepancy = std::abs(check.lhs - check.rhs) / scale;
  return check;
}

SandwichCheck check_sandwich(const ModelParams& params, const Partition& partition,
                             const QuantityOfInterest& qoi,
                             const std::vector<double>& extra_sigmas) {
  AssembledSystem sys_a = assemble_system(params, partition, BondRole::Ea);
  AssembledSystem sys_ac = assemble_system(params, partition, BondRole::Eac);
  Factorization fac_a = factorize(sys_a.matrix);
  Factorization fac_ac = factorize(sys_ac.matrix);

  std::vector<double> yac = fac_ac.solve(sys_ac.f.data());
  std::vector<double> gac = fac_ac.solve(qoi.q.data());
  std::vector<double> e = sub(fac_a.solve(sys_a.f.data()), yac);
  std::vector<double> ehat = sub(fac_a.solve(qoi.q.data()), gac);

  ChainVector y_ac(params.M, std::move(yac));
  ChainVector g_ac(params.M, std::move(gac));

  double sigma0 = compute_sigma(params, partition, y_ac, g_ac);
  std::vector<double> sigmas = {sigma0};
  sigmas.insert(sigmas.end(), extra_sigmas.begin(), extra_sigmas.end());

  std::vector<double> ya(e.size()), ga(e.size());
  for (std::size_t t = 0; t < e.size(); ++t) {
    ya[t] = y_ac[t] + e[t];
    ga[t] = g_ac[t] + ehat[t];
  }
  double norm_ya = weighted_norm(ya, sys_a.matrix);
  double norm_ga = weighted_norm(ga, sys_a.matrix);

  SandwichCheck check;
  check.max_relative_violation = -1e300;

  std::vector<double> combined(e.size());
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    double sigma = sigmas[j];
    BoundSet bounds = bounds_at_sigma(params, partition, y_ac, g_ac, qoi, sigma);
    // e and ehat are differences of solutions, so below this floor every
    // sandwiched quantity is roundoff and the ordering carries no information
    double noise = 1e-12 * (sigma * norm_ya + norm_ga / sigma);
    for (int sign = 0; sign < 2; ++sign) {
      double sgn = sign == 0 ? 1.0 : -1.0;
      for (std::size_t t = 0; t < e.size(); ++t)
        combined[t] = sigma * e[t] + sgn * ehat[t] / sigma;
      double truth = weighted_norm(combined, sys_a.matrix);
      double upp = sign == 0 ? bounds.upp_plus : bounds.upp_minus;
      double low = sign == 0 ? bounds.low_plus : bounds.low_minus;
      if (j == 0) (sign == 0 ? check.norm_plus : check.norm_minus) = truth;
      double violation;
      if (upp <= noise && truth <= noise && low <= noise) {
        violation = 0.0;
      } else {
        violation = std::max(low - truth, truth - upp) / std::max(upp, 1e-300);
      }
      check.max_relative_violation = std::max(check.max_relative_violation, violation);
    }
  }
  return check;
}

GradientCheck check_gradient(const ModelParams& params, const Partition& partition,
                             const ChainVector& y, double step) {
  AssembledSystem sys = assemble_system(params, partition, BondRole::Eac);
  std::vector<double> analytic = sys.matrix.apply(y.data());
  for (std::size_t t = 0; t < analytic.size(); ++t) analytic[t] -= sys.f[t];

  GradientCheck check;
  ChainVector probe = y;
  for (std::size_t t = 0; t < analytic.size(); ++t) {
    double kept = probe[t];
    probe[t] = kept + step;
    double e_plus = energy(params, partition, probe, EnergyForm::mixed_matrix);
    probe[t] = kept - step;
    double e_minus = energy(params, partition, probe, EnergyForm::mixed_matrix);
    probe[t] = kept;
    double fd = (e_plus - e_minus) / (2.0 * step);
    check.max_abs_difference = std::max(check.max_abs_difference, std::abs(fd - analytic[t]));
    check.max_abs_gradient = std::max(check.max_abs_gradient, std::abs(analytic[t]));
  }
  return check;
}

}  // namespace fkqc
