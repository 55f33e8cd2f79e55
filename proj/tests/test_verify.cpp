#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "fkqc/verify.hpp"

using namespace fkqc;

namespace {

Partition random_partition(std::mt19937_64& rng, int m) {
  std::bernoulli_distribution flip(0.5);
  Partition p = Partition::all_continuum(m);
  for (std::size_t s = 0; s < p.size(); ++s) p.set_slot(s, flip(rng));
  return p;
}

double rel_inf(const std::vector<double>& got, const std::vector<double>& want) {
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < got.size(); ++t) {
    num = std::max(num, std::abs(got[t] - want[t]));
    den = std::max(den, std::abs(want[t]));
  }
  return num / std::max(den, 1e-300);
}

}  // namespace

TEST_CASE("dense elimination solves known systems") {
  std::vector<double> eye = {1.0, 0.0, 0.0, 1.0};
  std::vector<double> rhs = {3.0, -2.0};
  std::vector<double> x = dense_reference_solve(eye, rhs, 2);
  CHECK(x[0] == doctest::Approx(3.0));
  CHECK(x[1] == doctest::Approx(-2.0));

  // [[2,1],[1,3]] x = [3,5]  =>  x = [0.8, 1.4]
  std::vector<double> a = {2.0, 1.0, 1.0, 3.0};
  std::vector<double> b = {3.0, 5.0};
  std::vector<double> y = dense_reference_solve(a, b, 2);
  CHECK(y[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(y[1] == doctest::Approx(1.4).epsilon(1e-14));

  CHECK_THROWS_AS(dense_reference_solve(std::vector<double>(4, 0.0), rhs, 2),
                  SingularMatrix);
  CHECK_THROWS_AS(dense_reference_solve(std::vector<double>(3, 1.0), rhs, 2),
                  DimensionMismatch);
}

TEST_CASE("dense elimination handles row exchanges") {
  // zero leading pivot forces a permutation
  std::vector<double> a = {0.0, 1.0, 1.0, 1.0};
  std::vector<double> rhs = {2.0, 3.0};
  std::vector<double> x = dense_reference_solve(a, rhs, 2);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("densify reproduces the banded operator action") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CyclicBandedMatrix a(12, 2);
  for (std::size_t t = 0; t < 12; ++t) {
    a.diag(t) = 4.0 + u(rng);
    a.super(1, t) = u(rng);
    a.super(2, t) = u(rng);
  }
  std::vector<double> x(12);
  for (double& v : x) v = u(rng);
  std::vector<double> ax = a.apply(x);
  std::vector<double> dense = densify(a);
  for (std::size_t r = 0; r < 12; ++r) {
    double want = 0.0;
    for (std::size_t c = 0; c < 12; ++c) want += dense[r * 12 + c] * x[c];
    CHECK(ax[r] == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("banded solver agrees with the oracle on a nearly singular chain") {
  // k0 ~ 1e-9 pushes the smallest eigenvalue toward zero without crossing it
  ModelParams p(4, 1.0, 1e-9, 2.0, 2.0);
  AssembledSystem sys = assemble_system(p, Partition::all_continuum(p.M), BondRole::Eac);
  std::vector<double> rhs(p.n());
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : rhs) v = u(rng);

  std::vector<double> dense = densify(sys.matrix);
  std::vector<double> got = factorize(sys.matrix).solve(rhs);
  std::vector<double> want = dense_reference_solve(dense, rhs, p.n());

  // Each solver must stay backward stable despite the condition number ~ 4e10.
  auto backward_error = [&](const std::vector<double>& x) {
    double norm_a = 0.0, norm_x = 0.0, norm_b = 0.0, worst = 0.0;
    for (std::size_t r = 0; r < p.n(); ++r) {
      double row = 0.0, ax = 0.0;
      for (std::size_t c = 0; c < p.n(); ++c) {
        row += std::abs(dense[r * p.n() + c]);
        ax += dense[r * p.n() + c] * x[c];
      }
      norm_a = std::max(norm_a, row);
      worst = std::max(worst, std::abs(ax - rhs[r]));
      norm_x = std::max(norm_x, std::abs(x[r]));
      norm_b = std::max(norm_b, std::abs(rhs[r]));
    }
    return worst / (norm_a * norm_x + norm_b);
  };
  CHECK(backward_error(got) <= 1e-12);
  CHECK(backward_error(want) <= 1e-12);

  // Forward agreement between two backward stable solvers is limited by
  // cond * eps ~ 1e-5 here; a structural defect would land at O(1).
  CHECK(rel_inf(got, want) <= 1e-4);
}

TEST_CASE("error representation identity holds on small random chains") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uk0(0.3, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p(8, 1.0, uk0(rng), 2.0, 2.0);
    Partition part = random_partition(rng, p.M);
    QuantityOfInterest qoi = QuantityOfInterest::indicator(p.M, 2, 5);
    IdentityCheck check = check_identity(p, part, qoi);
    CHECK(check.rel_discrepancy <= 1e-10);
  }

  ModelParams p(8, 1.0, 1.0, 2.0, 2.0);
  IdentityCheck trivial =
      check_identity(p, Partition::all_atomistic(p.M), QuantityOfInterest::indicator(8, 2, 5));
  CHECK(std::abs(trivial.lhs) <= 1e-12);
  CHECK(std::abs(trivial.rhs) <= 1e-12);
}

TEST_CASE("identity left side is the goal error of the fully continuum chain") {
  ModelParams p(500, 1.0, 1.0, 2.0, 2.0);
  QuantityOfInterest qoi = QuantityOfInterest::indicator(p.M, 11, 30);
  IdentityCheck check = check_identity(p, Partition::all_continuum(p.M), qoi);
  CHECK(std::abs(check.lhs) == doctest::Approx(1.416421e-03).epsilon(1e-3).scale(0.0));
  CHECK(check.rel_discrepancy <= 1e-10);
}

TEST_CASE("bound sandwich holds at optimized and supplied scalings") {
  std::mt19937_64 rng(23);
  for (int m : {8, 16}) {
    ModelParams p(m, 1.0, 1.0, 2.0, 2.0);
    Partition part = random_partition(rng, m);
    QuantityOfInterest qoi = QuantityOfInterest::indicator(m, 1, 3);
    SandwichCheck check = check_sandwich(p, part, qoi, {0.1, 1.0, 10.0});
    CHECK(check.max_relative_violation <= 1e-10);
    CHECK(check.norm_plus >= 0.0);
    CHECK(check.norm_minus >= 0.0);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  ModelParams p(8, 1.0, 1.0, 2.0, 2.0);
  Partition part = random_partition(rng, p.M);

  auto [a, b] = build_reference_vectors(p);
  ChainVector y(p.M);
  for (std::size_t s = 0; s < y.size(); ++s) y[s] = a[s] + u(rng);

  GradientCheck check = check_gradient(p, part, y);
  CHECK(check.max_abs_difference <= 1e-6 * std::max(1.0, check.max_abs_gradient));
}

TEST_CASE("gradient vanishes at the mixed minimizer") {
  ModelParams p(8, 1.0, 1.0, 2.0, 2.0);
  std::mt19937_64 rng(37);
  Partition part = random_partition(rng, p.M);
  AssembledSystem sys = assemble_system(p, part, BondRole::Eac);
  ChainVector y(p.M, factorize(sys.matrix).solve(sys.f.data()));

  double scale = 0.0;
  for (std::size_t s = 0; s < p.n(); ++s) scale = std::max(scale, std::abs(sys.f[s]));
  GradientCheck check = check_gradient(p, part, y);
  CHECK(check.max_abs_gradient <= 1e-8 * scale);
}
