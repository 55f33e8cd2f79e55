#pragma once

#include <stdexcept>
#include <vector>

#include "fkqc/estimator.hpp"

namespace fkqc {

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense Gaussian elimination with partial pivoting; a is n x n row-major and
// is consumed. Deliberately shares no code with the banded solver so the two
// can cross-check each other. Throws SingularMatrix on a vanishing pivot.
std::vector<double> dense_reference_solve(std::vector<double> a, std::vector<double> rhs,
                                          std::size_t n);

// dense row-major image of a banded operator
std::vector<double> densify(const CyclicBandedMatrix& matrix);

struct IdentityCheck {
  double lhs = 0.0;  // q^T (y_a - y_ac)
  double rhs = 0.0;  // g_ac^T R(y_ac) + (g_a - g_ac)^T M^a (y_a - y_ac)
  // |lhs - rhs| over max(|lhs|, |rhs|, |q| (|y_a| + |y_ac|))
  double rel_discrepancy = 0.0;
};

// error representation identity behind the estimator
IdentityCheck check_identity(const ModelParams& params, const Partition& partition,
                             const QuantityOfInterest& qoi);

struct SandwichCheck {
  double norm_plus = 0.0;   // |sigma e + sigma^-1 ehat|_{M^a} at optimized sigma
  double norm_minus = 0.0;
  // worst breach of low <= norm <= upp over both signs and all sigmas,
  // relative to the upper bound; <= 0 when every bound holds
  double max_relative_violation = 0.0;
};

// Checks the bound sandwich at the optimized sigma and at each extra sigma.
// The true errors come from a full atomistic solve.
SandwichCheck check_sandwich(const ModelParams& params, const Partition& partition,
                             const QuantityOfInterest& qoi,
                             const std::vector<double>& extra_sigmas);

struct GradientCheck {
  double max_abs_difference = 0.0;  // analytic vs central finite differences
  double max_abs_gradient = 0.0;
};

// gradient of the mixed energy at y against central differences with the
// given step
GradientCheck check_gradient(const ModelParams& params, const Partition& partition,
                             const ChainVector& y, double step = 1e-6);

}  // namespace fkqc
