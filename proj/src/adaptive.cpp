#include "fkqc/adaptive.hpp"

#include <stdexcept>

namespace fkqc {

AdaptiveConfig::AdaptiveConfig(double tau_gl_, double tau_div_, int max_iterations_)
    : tau_gl(tau_gl_), tau_div(tau_div_), max_iterations(max_iterations_) {
  if (!(tau_gl > 0.0)) throw std::invalid_argument("adaptive: tau_gl must be positive");
  if (!(tau_div > 1.0)) throw std::invalid_argument("adaptive: tau_div must exceed 1");
  if (max_iterations < 1) throw std::invalid_argument("adaptive: max_iterations must be >= 1");
}

std::string IterationRecord::region_text() const {
  if (atomistic_region.empty()) return "none";
  if (contiguous) {
    return std::to_string(atomistic_region.front()) + ".." +
           std::to_string(atomistic_region.back());
  }
  std::string text;
  for (std::size_t j = 0; j < atomistic_region.size(); ++j) {
    if (j) text += ',';
    text += std::to_string(atomistic_region[j]);
  }
  return text;
}

Partition mark_atoms(const std::vector<double>& eta2_tot, double tau_at,
                     const Partition& previous) {
  if (eta2_tot.size() != static_cast<std::size_t>(previous.size()))
    throw std::invalid_argument("mark_atoms: indicator length mismatch");
  Partition next = previous;
  for (std::size_t s = 0; s < eta2_tot.size(); ++s)
    if (eta2_tot[s] >= tau_at) next.set_slot(s, true);
  return next;
}

namespace {

bool labels_contiguous(const std::vector<int>& labels) {
  for (std::size_t j = 1; j < labels.size(); ++j)
    if (labels[j] != labels[j - 1] + 1) return false;
  return true;
}

}  // namespace

AdaptiveResult run_adaptive(const ModelParams& params, const QuantityOfInterest& qoi,
                            const AdaptiveConfig& config) {
  std::vector<IterationRecord> trace;
  Partition partition = Partition::all_continuum(params.M);
  double tau_at = config.tau_gl;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    EstimatorReport report = estimate(params, partition, qoi);

    IterationRecord record;
    record.iteration = iter;
    record.atomistic_region = partition.atomistic_labels();
    record.contiguous = labels_contiguous(record.atomistic_region);
    record.tau_at = tau_at;
    record.eta1 = report.eta1;
    trace.push_back(std::move(record));

    if (report.eta1 <= config.tau_gl)
      return AdaptiveResult{std::move(trace), std::move(partition), true};

    tau_at /= config.tau_div;
    partition = mark_atoms(report.eta2_tot, tau_at, partition);
  }

  return AdaptiveResult{std::move(trace), std::move(partition), false};
}

}  // namespace fkqc
