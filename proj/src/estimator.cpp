#include "fkqc/estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace fkqc {

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

std::vector<double> sub(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  return z;
}

std::vector<double> combine(double c1, const std::vector<double>& x, double c2,
                            const std::vector<double>& y) {
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = c1 * x[i] + c2 * y[i];
  return z;
}

constexpr double kFallbackTol = 1e-14;

// Shared state for one (params, partition) evaluation; holds assembled
// operators and the factorizations the bound formulas reuse.
struct Workspace {
  const ModelParams& p;
  CyclicBandedMatrix ea;
  CyclicBandedMatrix eac;
  AssembledSystem sys_a;
  AssembledSystem sys_ac;
  Factorization fac_ea;
  ChainVector a_ref;

  Workspace(const ModelParams& params, const Partition& part)
      : p(params),
        ea(assemble_bond_matrix(params, part, BondRole::Ea).to_operator()),
        eac(assemble_bond_matrix(params, part, BondRole::Eac).to_operator()),
        sys_a(assemble_system(params, part, BondRole::Ea)),
        sys_ac(assemble_system(params, part, BondRole::Eac)),
        fac_ea(factorize(ea)),
        a_ref(build_reference_vectors(params).first) {}

  std::vector<double> apply_p(const std::vector<double>& z) const {
    return sub(z, fac_ea.solve(eac.apply(z)));
  }

  // (E^a - E^ac) w, the interface-supported bond weight
  std::vector<double> apply_de(const std::vector<double>& w) const {
    return sub(ea.apply(w), eac.apply(w));
  }

  std::vector<double> strain(const std::vector<double>& y) const {
    return apply_difference(sub(y, a_ref.data()));
  }
};

double sigma_from(const Workspace& ws, const std::vector<double>& u,
                  const std::vector<double>& v, const std::vector<double>& pu,
                  const std::vector<double>& pv) {
  const double npu = weighted_norm(pu, ws.ea);
  const double npv = weighted_norm(pv, ws.ea);
  // The projections vanish whenever the two models coincide, leaving pure
  // roundoff; the unprojected strain norms set the scale that tells a
  // vanishing projection apart from a genuinely small one.
  if (npu <= kFallbackTol * weighted_norm(u, ws.ea) ||
      npv <= kFallbackTol * weighted_norm(v, ws.ea))
    return 1.0;
  return std::sqrt(npv / npu);
}

double theta_for(const std::vector<double>& r, const std::vector<double>& y,
                 const std::vector<double>& g, double g_my, double y_my, double g_mg) {
  const double ry = dot(r, y);
  const double rg = dot(r, g);
  const double num = ry * g_my - rg * y_my;
  const double den = rg * g_my - ry * g_mg;
  const double scale = std::fabs(ry * g_my) + std::fabs(rg * y_my) + std::fabs(rg * g_my) +
                       std::fabs(ry * g_mg);
  if (std::fabs(den) <= kFallbackTol * scale || scale == 0.0) return 0.0;
  return num / den;
}

double low_bound(const Workspace& ws, const std::vector<double>& r,
                 const std::vector<double>& y, const std::vector<double>& g, double theta) {
  const std::vector<double> t = combine(1.0, y, theta, g);
  const double tn = weighted_norm(t, ws.sys_a.matrix);
  const double tr = std::fabs(dot(t, r));
  const double scale = std::max(1.0, tr);
  if (tn <= kFallbackTol * scale) return 0.0;
  return tr / tn;
}

BoundSet bounds_impl(const Workspace& ws, const std::vector<double>& y,
                     const std::vector<double>& g, const std::vector<double>& r_primal,
                     const std::vector<double>& r_dual, double sigma) {
  const std::vector<double> pu = ws.apply_p(ws.strain(y));
  const std::vector<double> pv = ws.apply_p(apply_difference(g));

  BoundSet b;
  const double g_my = dot(g, ws.sys_a.matrix.apply(y));
  const double y_my = quadratic_form(y, ws.sys_a.matrix);
  const double g_mg = quadratic_form(g, ws.sys_a.matrix);

  for (int sgn : {+1, -1}) {
    const std::vector<double> w = combine(sigma, pu, sgn / sigma, pv);
    const double upp = weighted_norm(w, ws.ea);
    const std::vector<double> r = combine(sigma, r_primal, sgn / sigma, r_dual);
    const double theta = theta_for(r, y, g, g_my, y_my, g_mg);
    const double low = low_bound(ws, r, y, g, theta);
    if (sgn > 0) {
      b.upp_plus = upp;
      b.theta_plus = theta;
      b.low_plus = low;
    } else {
      b.upp_minus = upp;
      b.theta_minus = theta;
      b.low_minus = low;
    }
  }
  return b;
}

Eta2Breakdown eta2_impl(const Workspace& ws, const std::vector<double>& y,
                        const std::vector<double>& g, const std::vector<double>& r_primal) {
  const std::size_t n = ws.p.n();
  const std::vector<double> u = ws.strain(y);
  const std::vector<double> v = apply_difference(g);
  const std::vector<double> pu = ws.apply_p(u);
  const std::vector<double> pv = ws.apply_p(v);
  const std::vector<double> deu = ws.apply_de(u);
  const std::vector<double> dev = ws.apply_de(v);

  Eta2Breakdown out;
  out.at.resize(n);
  out.el.resize(n);
  out.tot.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.at[i] = std::fabs(g[i] * r_primal[i]);
  for (std::size_t i = 0; i < n; ++i)
    out.el[i] = 0.5 * std::fabs(pu[i] * deu[i]) + 0.5 * std::fabs(pv[i] * dev[i]);
  for (std::size_t i = 0; i < n; ++i)
    out.tot[i] = out.at[i] + 0.5 * (out.el[(i + n - 1) % n] + out.el[i]);

  const double rho = dot(g, r_primal);
  out.value = std::fabs(rho) + weighted_norm(pu, ws.ea) * weighted_norm(pv, ws.ea);
  return out;
}

}  // namespace

QuantityOfInterest::QuantityOfInterest(ChainVector weights) : q(std::move(weights)) {
  for (double v : q.data())
    if (v != 0.0) return;
  throw std::invalid_argument("QuantityOfInterest: all weights are zero");
}

QuantityOfInterest QuantityOfInterest::indicator(int m, int lo, int hi) {
  if (lo > hi || lo < -m + 1 || hi > m)
    throw std::invalid_argument("QuantityOfInterest: bad label range");
  ChainVector q(m);
  for (int i = lo; i <= hi; ++i) q.at_label(i) = 1.0;
  return QuantityOfInterest(std::move(q));
}

ChainVector residual_primal(const ModelParams& params, const Partition& partition,
                            const ChainVector& y_ac) {
  (void)partition;
  const AssembledSystem sys = assemble_system(params, Partition::all_atomistic(params.M),
                                              BondRole::Ea);
  const std::vector<double> my = sys.matrix.apply(y_ac.data());
  ChainVector r(params.M);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = sys.f[i] - my[i];
  return r;
}

ChainVector residual_dual(const ModelParams& params, const QuantityOfInterest& qoi,
                          const ChainVector& g_ac) {
  const AssembledSystem sys = assemble_system(params, Partition::all_atomistic(params.M),
                                              BondRole::Ea);
  const std::vector<double> mg = sys.matrix.apply(g_ac.data());
  ChainVector r(params.M);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = qoi.q[i] - mg[i];
  return r;
}

std::vector<double> apply_P(const ModelParams& params, const Partition& partition,
                            const std::vector<double>& z) {
  const Workspace ws(params, partition);
  return ws.apply_p(z);
}

double compute_sigma(const ModelParams& params, const Partition& partition,
                     const ChainVector& y_ac, const ChainVector& g_ac) {
  const Workspace ws(params, partition);
  const std::vector<double> u = ws.strain(y_ac.data());
  const std::vector<double> v = apply_difference(g_ac.data());
  return sigma_from(ws, u, v, ws.apply_p(u), ws.apply_p(v));
}

BoundSet bounds_at_sigma(const ModelParams& params, const Partition& partition,
                         const ChainVector& y_ac, const ChainVector& g_ac,
                         const QuantityOfInterest& qoi, double sigma) {
  const Workspace ws(params, partition);
  const ChainVector rp = residual_primal(params, partition, y_ac);
  const ChainVector rd = residual_dual(params, qoi, g_ac);
  return bounds_impl(ws, y_ac.data(), g_ac.data(), rp.data(), rd.data(), sigma);
}

BoundSet compute_bounds(const ModelParams& params, const Partition& partition,
                        const ChainVector& y_ac, const ChainVector& g_ac,
                        const QuantityOfInterest& qoi) {
  return bounds_at_sigma(params, partition, y_ac, g_ac, qoi,
                         compute_sigma(params, partition, y_ac, g_ac));
}

double combine_eta1(double residual_term, const BoundSet& b) {
  const double lo = residual_term + 0.25 * b.low_plus * b.low_plus -
                    0.25 * b.upp_minus * b.upp_minus;
  const double hi = residual_term + 0.25 * b.upp_plus * b.upp_plus -
                    0.25 * b.low_minus * b.low_minus;
  return std::max(std::fabs(lo), std::fabs(hi));
}

Eta2Breakdown eta2(const ModelParams& params, const Partition& partition,
                   const ChainVector& y_ac, const ChainVector& g_ac) {
  const Workspace ws(params, partition);
  const ChainVector rp = residual_primal(params, partition, y_ac);
  return eta2_impl(ws, y_ac.data(), g_ac.data(), rp.data());
}

double exact_error(const ModelParams& params, const Partition& partition,
                   const QuantityOfInterest& qoi) {
  const Workspace ws(params, partition);
  const std::vector<double> ya = factorize(ws.sys_a.matrix).solve(ws.sys_a.f.data());
  const std::vector<double> yac = factorize(ws.sys_ac.matrix).solve(ws.sys_ac.f.data());
  return std::fabs(dot(qoi.q.data(), sub(ya, yac)));
}

EstimatorReport estimate(const ModelParams& params, const Partition& partition,
                         const QuantityOfInterest& qoi) {
  const Workspace ws(params, partition);
  const Factorization fac_ac = factorize(ws.sys_ac.matrix);
  const std::vector<double> y = fac_ac.solve(ws.sys_ac.f.data());
  const std::vector<double> g = fac_ac.solve(qoi.q.data());

  // Residuals in the interface-supported form -D^T (E^a - E^ac) D (.), valid
  // because y and g solve the mixed systems exactly. Off the interface the
  // entries are exact zeros, which keeps the late cancellation in eta1 at the
  // level of extended-precision evaluation.
  const std::vector<double> u = ws.strain(y);
  const std::vector<double> v = apply_difference(g);
  std::vector<double> rp = apply_difference_transpose(ws.apply_de(u));
  std::vector<double> rd = apply_difference_transpose(ws.apply_de(v));
  for (auto& x : rp) x = -x;
  for (auto& x : rd) x = -x;

  const std::vector<double> pu = ws.apply_p(u);
  const std::vector<double> pv = ws.apply_p(v);

  EstimatorReport rep;
  rep.sigma = sigma_from(ws, u, v, pu, pv);
  const BoundSet b = bounds_impl(ws, y, g, rp, rd, rep.sigma);
  rep.theta_plus = b.theta_plus;
  rep.theta_minus = b.theta_minus;
  rep.eta_upp_plus = b.upp_plus;
  rep.eta_upp_minus = b.upp_minus;
  rep.eta_low_plus = b.low_plus;
  rep.eta_low_minus = b.low_minus;
  rep.residual_term = dot(g, rp);
  rep.eta1 = combine_eta1(rep.residual_term, b);

  Eta2Breakdown e2 = eta2_impl(ws, y, g, rp);
  rep.eta2 = e2.value;
  rep.eta2_at = std::move(e2.at);
  rep.eta2_el = std::move(e2.el);
  rep.eta2_tot = std::move(e2.tot);
  return rep;
}

}  // namespace fkqc
