#pragma once

#include <string>
#include <vector>

#include "fkqc/estimator.hpp"

namespace fkqc {

struct AdaptiveConfig {
  double tau_gl;
  double tau_div = 10.0;
  int max_iterations = 50;

  AdaptiveConfig(double tau_gl_, double tau_div_ = 10.0, int max_iterations_ = 50);
};

struct IterationRecord {
  int iteration = 0;
  std::vector<int> atomistic_region;  // sorted atom labels
  bool contiguous = true;
  double tau_at = 0.0;
  double eta1 = 0.0;

  // "none" for an empty region, otherwise "lo..hi"
  std::string region_text() const;
};

struct AdaptiveResult {
  std::vector<IterationRecord> trace;
  Partition final_partition;
  bool converged = false;
};

// previous union {i : eta2_tot_i >= tau_at}; atoms never revert to continuum
Partition mark_atoms(const std::vector<double>& eta2_tot, double tau_at,
                     const Partition& previous);

// All-continuum start, tau_at = tau_gl. Each pass solves the mixed primal and
// dual problems, records eta1, stops once eta1 <= tau_gl, otherwise divides
// tau_at by tau_div and marks atoms by the local indicator threshold.
AdaptiveResult run_adaptive(const ModelParams& params, const QuantityOfInterest& qoi,
                            const AdaptiveConfig& config);

}  // namespace fkqc
