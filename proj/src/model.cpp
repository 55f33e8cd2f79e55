#include "fkqc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fkqc {

int centered_mod(long long i, int m) {
  const long long n = 2LL * m;
  long long r = i % n;
  if (r < -m + 1) r += n;
  if (r > m) r -= n;
  return static_cast<int>(r);
}

ModelParams::ModelParams(int M_, double a0_, double k0_, double k1_, double k2_)
    : M(M_), a0(a0_), k0(k0_), k1(k1_), k2(k2_) {
  if (M < 2) throw std::invalid_argument("ModelParams: M must be >= 2");
  if (!(a0 > 0.0)) throw std::invalid_argument("ModelParams: a0 must be positive");
  if (!(k0 > 0.0)) throw std::invalid_argument("ModelParams: k0 must be positive");
  if (!(k1 + 2.0 * k2 > 2.0 * std::fabs(k2)))
    throw std::invalid_argument("ModelParams: need k1 + 2*k2 > 2*|k2|");
}

ChainVector::ChainVector(int m, std::vector<double> v) : m_(m), v_(std::move(v)) {
  if (v_.size() != static_cast<std::size_t>(2 * m))
    throw DimensionMismatch("ChainVector: expected length " + std::to_string(2 * m));
}

std::size_t Partition::count_atomistic() const {
  std::size_t c = 0;
  for (char x : f_) c += (x != 0);
  return c;
}

std::vector<int> Partition::atomistic_labels() const {
  std::vector<int> out;
  for (std::size_t s = 0; s < f_.size(); ++s)
    if (f_[s]) out.push_back(static_cast<int>(s) - m_ + 1);
  return out;
}

CyclicBandedMatrix BondMatrix::to_operator() const {
  CyclicBandedMatrix e(diag.size(), 1);
  for (std::size_t t = 0; t < diag.size(); ++t) {
    e.diag(t) = diag[t];
    e.super(1, t) = off[t];
  }
  return e;
}

std::pair<ChainVector, ChainVector> build_reference_vectors(const ModelParams& p) {
  ChainVector a(p.M), b(p.M);
  const double stretch = static_cast<double>(2 * p.M + 1) / static_cast<double>(2 * p.M);
  for (int i = -p.M + 1; i <= p.M; ++i) {
    a.at_label(i) = i * stretch * p.a0;
    b.at_label(i) = (i <= 0 ? i - 1 : i) * p.a0;
  }
  return {std::move(a), std::move(b)};
}

BondMatrix assemble_bond_matrix(const ModelParams& p, const Partition& part, BondRole role) {
  if (part.size() != p.n())
    throw DimensionMismatch("assemble_bond_matrix: partition length mismatch");
  const std::size_t n = p.n();
  BondMatrix e{role, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (role == BondRole::Ea) {
    for (std::size_t t = 0; t < n; ++t) {
      e.diag[t] = p.k1 + 2.0 * p.k2;
      e.off[t] = p.k2;
    }
    return e;
  }
  for (std::size_t t = 0; t < n; ++t) {
    const auto da = [&](long long d) {
      return part.atomistic_slot((t + n + static_cast<std::size_t>(d + n)) % n) ? 1.0 : 0.0;
    };
    const double a0p = da(0), a1 = da(1), am1 = da(-1), a2 = da(2);
    const double c0 = 1.0 - a0p, c1 = 1.0 - a1;
    e.diag[t] = 0.5 * p.k1 * (a0p + a1) + 0.5 * p.k2 * (am1 + a0p + a1 + a2) +
                (0.5 * p.k1 + 2.0 * p.k2) * (c0 + c1);
    e.off[t] = 0.5 * p.k2 * (a0p + a2);
  }
  return e;
}

std::vector<double> apply_difference(const std::vector<double>& z) {
  const std::size_t n = z.size();
  std::vector<double> w(n);
  for (std::size_t t = 0; t < n; ++t) w[t] = z[(t + 1) % n] - z[t];
  return w;
}

std::vector<double> apply_difference_transpose(const std::vector<double>& w) {
  const std::size_t n = w.size();
  std::vector<double> z(n);
  for (std::size_t t = 0; t < n; ++t) z[t] = w[(t + n - 1) % n] - w[t];
  return z;
}

AssembledSystem assemble_system(const ModelParams& p, const Partition& part, BondRole role) {
  const BondMatrix e = assemble_bond_matrix(p, part, role);
  const std::size_t n = p.n();

  CyclicBandedMatrix m(n, 2);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t tm = (t + n - 1) % n;
    m.diag(t) = e.diag[tm] + e.diag[t] - 2.0 * e.off[tm] + p.k0;
    m.super(1, t) = e.off[tm] + e.off[t] - e.diag[t];
    m.super(2, t) = -e.off[t];
  }

  auto [a, b] = build_reference_vectors(p);
  const CyclicBandedMatrix eop = e.to_operator();
  std::vector<double> f =
      apply_difference_transpose(eop.apply(apply_difference(a.data())));
  for (std::size_t t = 0; t < n; ++t) f[t] += p.k0 * b[t];

  return AssembledSystem{std::move(m), ChainVector(p.M, std::move(f))};
}

namespace {

// strain of the (i, i+d) pair against the stretched reference spacing,
// label arithmetic reduced by centered_mod as in the per-atom energy formulas
double pair_strain(const ModelParams& p, const ChainVector& y, long long i, int d) {
  const double stretch = static_cast<double>(2 * p.M + 1) / static_cast<double>(2 * p.M);
  const int ir = centered_mod(i, p.M);
  const int jr = centered_mod(i + d, p.M);
  return (d > 0 ? y.at_label(jr) - y.at_label(ir) : y.at_label(ir) - y.at_label(jr)) -
         stretch * static_cast<double>(d > 0 ? jr - ir : ir - jr) * p.a0;
}

double misfit_term(const ModelParams& p, const ChainVector& y, const ChainVector& b, int i) {
  const double d = y.at_label(i) - b.at_label(i);
  return 0.5 * p.k0 * d * d;
}

double atom_energy_atomistic(const ModelParams& p, const ChainVector& y, const ChainVector& b,
                             int i) {
  const double snl = pair_strain(p, y, i, -1), snr = pair_strain(p, y, i, +1);
  const double swl = pair_strain(p, y, i, -2), swr = pair_strain(p, y, i, +2);
  return 0.25 * p.k1 * (snl * snl + snr * snr) + 0.25 * p.k2 * (swl * swl + swr * swr) +
         misfit_term(p, y, b, i);
}

double atom_energy_continuum(const ModelParams& p, const ChainVector& y, const ChainVector& b,
                             int i) {
  const double snl = pair_strain(p, y, i, -1), snr = pair_strain(p, y, i, +1);
  return (0.25 * p.k1 + p.k2) * (snl * snl + snr * snr) + misfit_term(p, y, b, i);
}

double matrix_form_energy(const ModelParams& p, const Partition& part, const ChainVector& y,
                          BondRole role) {
  auto [a, b] = build_reference_vectors(p);
  std::vector<double> z(y.size());
  for (std::size_t s = 0; s < z.size(); ++s) z[s] = y[s] - a[s];
  const std::vector<double> w = apply_difference(z);
  const CyclicBandedMatrix e = assemble_bond_matrix(p, part, role).to_operator();
  double elastic = 0.5 * quadratic_form(w, e);
  double misfit = 0.0;
  for (std::size_t s = 0; s < y.size(); ++s) {
    const double d = y[s] - b[s];
    misfit += d * d;
  }
  return elastic + 0.5 * p.k0 * misfit;
}

}  // namespace

double energy(const ModelParams& p, const Partition& part, const ChainVector& y,
              EnergyForm form) {
  if (part.size() != p.n() || y.size() != p.n())
    throw DimensionMismatch("energy: size mismatch");
  switch (form) {
    case EnergyForm::atomistic_matrix:
      return matrix_form_energy(p, part, y, BondRole::Ea);
    case EnergyForm::mixed_matrix:
      return matrix_form_energy(p, part, y, BondRole::Eac);
    case EnergyForm::atomistic_atomwise: {
      auto [a, b] = build_reference_vectors(p);
      (void)a;
      double acc = 0.0;
      for (int i = -p.M + 1; i <= p.M; ++i) acc += atom_energy_atomistic(p, y, b, i);
      return acc;
    }
    case EnergyForm::mixed_atomwise: {
      auto [a, b] = build_reference_vectors(p);
      (void)a;
      double acc = 0.0;
      for (int i = -p.M + 1; i <= p.M; ++i)
        acc += part.atomistic_label(i) ? atom_energy_atomistic(p, y, b, i)
                                       : atom_energy_continuum(p, y, b, i);
      return acc;
    }
    case EnergyForm::misfit_floor: {
      double acc = 0.0;
      for (std::size_t s = 0; s < y.size(); ++s) {
        const double d = y[s] - p.a0 * std::floor(y[s] / p.a0 + 0.5);
        acc += d * d;
      }
      return 0.5 * p.k0 * acc;
    }
  }
  throw std::invalid_argument("energy: unknown form");
}

}  // namespace fkqc
