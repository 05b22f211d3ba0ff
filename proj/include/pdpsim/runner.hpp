#pragma once

// Experiment orchestration: ensemble simulation, reference curves, CSV
// comparison and the P(j, m) table.
//
// Trajectories are processed in fixed chunks of consecutive indices; each
// chunk is accumulated sequentially and the chunk results are merged by a
// pairwise tree in chunk order, so the output does not depend on the number
// of workers.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pdpsim/config.hpp"
#include "pdpsim/csv.hpp"
#include "pdpsim/ensemble.hpp"

namespace pdp {

struct SimulationResult {
  EnsembleAccumulator accumulator;
  DensityEstimate estimate;
  std::vector<std::string> labels;
  /// Model-wide rate bound (JC only; the spin bound depends on the sampled j).
  std::optional<double> rate_bound;
  std::uint64_t jumps = 0;
};

/// Runs the ensemble. Throws an overflow error when the aborted fraction
/// exceeds cfg.max_abort_fraction.
SimulationResult simulate(const RunConfig& cfg);
CsvTable simulation_table(const SimulationResult& result);
/// Simulates and writes the CSV to cfg.output, or to `out` when no path is set.
void run_simulate(const RunConfig& cfg, std::ostream& out);

struct ReferenceResult {
  CsvTable table;
  double discarded_weight = 0.0;  // spin_block only
};

ReferenceResult reference(const RunConfig& cfg);
void run_reference(const RunConfig& cfg, std::ostream& out);

struct CompareOptions {
  double z_threshold = 4.0;
  double required_fraction = 0.95;
  double max_abs_z = std::numeric_limits<double>::infinity();
  /// Absolute uncertainty of the reference, added in quadrature to the SE.
  double reference_tolerance = 0.0;
  /// Restrict to these entry labels; empty compares all shared entries.
  std::vector<std::string> entries;
};

struct CompareReport {
  std::vector<std::string> entries;
  std::vector<double> t;
  // z scores indexed [entry][grid point].
  std::vector<std::vector<double>> z_re;
  std::vector<std::vector<double>> z_im;
  double max_abs_z = 0.0;
  double fraction_within = 1.0;
  std::size_t values = 0;
  bool pass = true;
};

/// (sim - ref) / sqrt(se_sim^2 + se_ref^2 + tol^2). A zero denominator gives
/// 0 when the values agree to 1e-12 relative, otherwise +-inf.
double z_score(double sim, double se_sim, double ref, double se_ref, double tol = 0.0);

CompareReport compare(const CsvTable& sim, const CsvTable& ref, const CompareOptions& opt = {});
void print_report(std::ostream& out, const CompareReport& report, const CompareOptions& opt);

/// CSV with columns j, p (per (j, m) pair), cumulative.
void run_pjm_table(int n_spins, std::ostream& out);

}  // namespace pdp
