#pragma once

#include <vector>

#include "fkqc/model.hpp"

namespace fkqc {

// Linear goal functional Q(y) = q^T y.
struct QuantityOfInterest {
  ChainVector q;

  explicit QuantityOfInterest(ChainVector weights);  // rejects all-zero q

  // unit weight on labels lo..hi inclusive
  static QuantityOfInterest indicator(int m, int lo, int hi);
};

struct BoundSet {
  double upp_plus = 0.0;
  double upp_minus = 0.0;
  double low_plus = 0.0;
  double low_minus = 0.0;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
};

struct EstimatorReport {
  double sigma = 1.0;
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  double eta_upp_plus = 0.0;
  double eta_upp_minus = 0.0;
  double eta_low_plus = 0.0;
  double eta_low_minus = 0.0;
  double residual_term = 0.0;  // g_ac^T R(y_ac)
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::vector<double> eta2_at;
  std::vector<double> eta2_el;
  std::vector<double> eta2_tot;
};

struct Eta2Breakdown {
  double value = 0.0;
  std::vector<double> at;
  std::vector<double> el;
  std::vector<double> tot;
};

// R(y) = f^a - M^a y. The partition does not enter the value; it is part of
// the call shape shared with the mixed-solve pipeline.
ChainVector residual_primal(const ModelParams& params, const Partition& partition,
                            const ChainVector& y_ac);

// Rhat(g) = q - M^a g
ChainVector residual_dual(const ModelParams& params, const QuantityOfInterest& qoi,
                          const ChainVector& g_ac);

// P z = z - (E^a)^-1 (E^ac z) on bond-space vectors, via a factorized solve
std::vector<double> apply_P(const ModelParams& params, const Partition& partition,
                            const std::vector<double>& z);

// sigma = sqrt(|P D g_ac|_Ea / |P D (y_ac - a)|_Ea), falling back to 1 when a
// norm vanishes (both bounds vanish with it)
double compute_sigma(const ModelParams& params, const Partition& partition,
                     const ChainVector& y_ac, const ChainVector& g_ac);

// upper/lower bounds and test-vector parameters for a given sigma
BoundSet bounds_at_sigma(const ModelParams& params, const Partition& partition,
                         const ChainVector& y_ac, const ChainVector& g_ac,
                         const QuantityOfInterest& qoi, double sigma);

// bounds at the optimized sigma from compute_sigma
BoundSet compute_bounds(const ModelParams& params, const Partition& partition,
                        const ChainVector& y_ac, const ChainVector& g_ac,
                        const QuantityOfInterest& qoi);

// max of the two bracket-endpoint magnitudes around the residual term
double combine_eta1(double residual_term, const BoundSet& bounds);

Eta2Breakdown eta2(const ModelParams& params, const Partition& partition,
                   const ChainVector& y_ac, const ChainVector& g_ac);

// |q^T (y_a - y_ac)| from the two primal solves
double exact_error(const ModelParams& params, const Partition& partition,
                   const QuantityOfInterest& qoi);

// Full pipeline: mixed primal and dual solves, then every report field.
EstimatorReport estimate(const ModelParams& params, const Partition& partition,
                         const QuantityOfInterest& qoi);

}  // namespace fkqc
