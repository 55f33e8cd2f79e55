#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fkqc/adaptive.hpp"
#include "fkqc/estimator.hpp"

namespace {

struct CommonFlags {
  int M = 500;
  double a0 = 1.0;
  double k0 = 1.0;
  double k1 = 2.0;
  double k2 = 2.0;
  std::string qoi = "11..30";
  std::string out;
  std::string format;  // empty means the per-command default
};

bool parse_range(const std::string& text, int& lo, int& hi) {
  std::size_t pos = text.find("..");
  if (pos == std::string::npos || pos == 0 || pos + 2 >= text.size()) return false;
  try {
    std::size_t used = 0;
    lo = std::stoi(text.substr(0, pos), &used);
    if (used != pos) return false;
    std::string tail = text.substr(pos + 2);
    hi = std::stoi(tail, &used);
    if (used != tail.size()) return false;
  } catch (const std::exception&) {
    return false;
  }
  return lo <= hi;
}

fkqc::Partition region_partition(const fkqc::ModelParams& params, const std::string& text) {
  if (text == "none") return fkqc::Partition::all_continuum(params.M);
  int lo = 0, hi = 0;
  if (!parse_range(text, lo, hi) || lo < -params.M + 1 || hi > params.M)
    throw std::invalid_argument("bad region '" + text + "', expected lo..hi or none");
  fkqc::Partition p = fkqc::Partition::all_continuum(params.M);
  for (int i = lo; i <= hi; ++i) p.set_label(i, true);
  return p;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string ratio_text(double num, double den) {
  if (den <= 1e-300) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.7g", num / den);
  return buf;
}

struct Table {
  char sep;
  std::string text;

  explicit Table(char sep_) : sep(sep_) {}

  void row(const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) text += sep;
      text += cells[j];
    }
    text += '\n';
  }
};

char separator(const CommonFlags& flags, const char* command_default) {
  const std::string& fmt = flags.format.empty() ? command_default : flags.format;
  return fmt == "csv" ? ',' : '\t';
}

int emit(const std::string& text, const std::string& out_path) {
  std::fputs(text.c_str(), stdout);
  if (out_path.empty()) return 0;
  std::ofstream file(out_path, std::ios::binary);
  file << text;
  file.close();
  if (!file) {
    std::fprintf(stderr, "fkchain: cannot write %s\n", out_path.c_str());
    return 4;
  }
  return 0;
}

int cmd_adaptive(const CommonFlags& flags, const fkqc::ModelParams& params,
                 const fkqc::QuantityOfInterest& qoi, double tau_gl, double tau_div,
                 int max_iter) {
  fkqc::AdaptiveConfig config(tau_gl, tau_div, max_iter);
  fkqc::AdaptiveResult result = fkqc::run_adaptive(params, qoi, config);

  Table table(separator(flags, "tsv"));
  table.row({"iteration", "region", "tau_at", "eta1"});
  for (const fkqc::IterationRecord& rec : result.trace)
    table.row({std::to_string(rec.iteration), rec.region_text(), sci(rec.tau_at),
               sci(rec.eta1)});

  int io = emit(table.text, flags.out);
  if (io) return io;
  return result.converged ? 0 : 1;
}

int cmd_efficiency(const CommonFlags& flags, const fkqc::ModelParams& params,
                   const fkqc::QuantityOfInterest& qoi,
                   const std::vector<std::string>& regions) {
  Table table(separator(flags, "tsv"));
  table.row({"region", "qerr", "eta1", "eta1_over_err", "eta2", "eta2_over_err"});
  for (const std::string& region : regions) {
    fkqc::Partition partition = region_partition(params, region);
    double qerr = fkqc::exact_error(params, partition, qoi);
    fkqc::EstimatorReport report = fkqc::estimate(params, partition, qoi);
    table.row({region, sci(qerr), sci(report.eta1), ratio_text(report.eta1, qerr),
               sci(report.eta2), ratio_text(report.eta2, qerr)});
  }
  return emit(table.text, flags.out);
}

int cmd_dump_local(const CommonFlags& flags, const fkqc::ModelParams& params,
                   const fkqc::QuantityOfInterest& qoi, const std::string& region) {
  fkqc::Partition partition = region_partition(params, region);
  fkqc::EstimatorReport report = fkqc::estimate(params, partition, qoi);

  Table table(separator(flags, "csv"));
  table.row({"i", "eta2_at", "eta2_el", "eta2_tot"});
  for (std::size_t s = 0; s < params.n(); ++s)
    table.row({std::to_string(static_cast<int>(s) - params.M + 1), sci(report.eta2_at[s]),
               sci(report.eta2_el[s]), sci(report.eta2_tot[s])});
  return emit(table.text, flags.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-oriented modeling-error experiments on a Frenkel-Kontorova chain"};
  app.require_subcommand(1);

  CommonFlags flags;
  double tau_gl = 1e-10;
  double tau_div = 10.0;
  int max_iter = 50;
  std::vector<std::string> regions;
  std::string region = "none";

  auto add_common = [&flags](CLI::App* cmd) {
    cmd->add_option("--M", flags.M, "half-chain size; the chain has 2M atoms")
        ->capture_default_str();
    cmd->add_option("--a0", flags.a0, "lattice constant")->capture_default_str();
    cmd->add_option("--k0", flags.k0, "misfit stiffness")->capture_default_str();
    cmd->add_option("--k1", flags.k1, "nearest-neighbor spring")->capture_default_str();
    cmd->add_option("--k2", flags.k2, "next-nearest-neighbor spring")->capture_default_str();
    cmd->add_option("--qoi", flags.qoi, "goal atoms lo..hi, unit weights")
        ->capture_default_str();
    cmd->add_option("--out", flags.out, "mirror output to this file");
    cmd->add_option("--format", flags.format, "tsv or csv")
        ->check(CLI::IsMember({"tsv", "csv"}));
  };

  CLI::App* adaptive =
      app.add_subcommand("adaptive", "grow the atomistic region until eta1 <= tau-gl");
  add_common(adaptive);
  adaptive->add_option("--tau-gl", tau_gl, "global tolerance")->capture_default_str();
  adaptive->add_option("--tau-div", tau_div, "marking threshold divisor per iteration")
      ->capture_default_str();
  adaptive->add_option("--max-iter", max_iter, "iteration cap")->capture_default_str();

  CLI::App* efficiency =
      app.add_subcommand("efficiency", "exact error and estimators per region");
  add_common(efficiency);
  efficiency->add_option("--region", regions, "atomistic region lo..hi or none, repeatable");

  CLI::App* dump =
      app.add_subcommand("dump-local", "per-atom indicator decomposition as CSV");
  add_common(dump);
  dump->add_option("--region", region, "atomistic region lo..hi or none")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    fkqc::ModelParams params(flags.M, flags.a0, flags.k0, flags.k1, flags.k2);
    int qlo = 0, qhi = 0;
    if (!parse_range(flags.qoi, qlo, qhi))
      throw std::invalid_argument("bad --qoi '" + flags.qoi + "', expected lo..hi");
    fkqc::QuantityOfInterest qoi = fkqc::QuantityOfInterest::indicator(params.M, qlo, qhi);

    if (adaptive->parsed()) return cmd_adaptive(flags, params, qoi, tau_gl, tau_div, max_iter);
    if (efficiency->parsed()) {
      if (regions.empty()) regions.push_back("none");
      return cmd_efficiency(flags, params, qoi, regions);
    }
    return cmd_dump_local(flags, params, qoi, region);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "fkchain: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fkchain: solver failure: %s\n", e.what());
    return 3;
  }
}
