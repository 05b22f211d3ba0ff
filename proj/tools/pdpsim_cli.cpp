// pdpsim: simulate | reference | compare | pjm-table

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "pdpsim/config.hpp"
#include "pdpsim/error.hpp"
#include "pdpsim/runner.hpp"
#include "pdpsim/simd/kernels.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trajectories;
  std::optional<unsigned> workers;
  std::optional<std::string> output;
  std::optional<std::string> stepper;
  std::optional<std::string> reference;
  std::vector<std::string> set;

  pdp::RunConfig resolve() const {
    pdp::RunConfig cfg;
    if (!config.empty()) cfg = pdp::load_config(config);
    for (const auto& kv : set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        pdp::fail(pdp::ErrorKind::Configuration, "--set expects key=value, got '" + kv + "'");
      pdp::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (trajectories) cfg.n_trajectories = *trajectories;
    if (workers) cfg.workers = *workers;
    if (output) cfg.output = *output;
    if (stepper) cfg.stepper = pdp::parse_stepper(*stepper);
    if (reference) cfg.reference = pdp::parse_reference(*reference);
    return cfg;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Flat key = value configuration file");
  cmd->add_option("--set", o.set, "Override a config key (key=value), repeatable");
  cmd->add_option("--output", o.output, "Output CSV path (stdout if omitted)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pair-state jump-process simulator for open quantum systems"};
  app.require_subcommand(1);

  Overrides sim_o;
  auto* sim = app.add_subcommand("simulate", "Run a trajectory ensemble and write the mean density matrix");
  add_common(sim, sim_o);
  sim->add_option("--seed", sim_o.seed, "Master seed");
  sim->add_option("--trajectories", sim_o.trajectories, "Number of trajectories");
  sim->add_option("--workers", sim_o.workers, "Worker threads");
  sim->add_option("--stepper", sim_o.stepper, "euler | thinning");

  Overrides ref_o;
  auto* ref = app.add_subcommand("reference", "Write a deterministic reference curve");
  add_common(ref, ref_o);
  ref->add_option("--reference", ref_o.reference, "jc_exact | born_markov | tcl2 | spin_block | dense");

  std::string cmp_sim;
  std::string cmp_ref;
  pdp::CompareOptions cmp_opt;
  auto* cmp = app.add_subcommand("compare", "z-scores of a simulation against a reference");
  cmp->add_option("sim", cmp_sim, "Simulation CSV")->required();
  cmp->add_option("ref", cmp_ref, "Reference CSV")->required();
  cmp->add_option("--threshold", cmp_opt.z_threshold, "|z| threshold")->capture_default_str();
  cmp->add_option("--fraction", cmp_opt.required_fraction, "Required fraction within threshold")->capture_default_str();
  cmp->add_option("--max-z", cmp_opt.max_abs_z, "Largest allowed |z|");
  cmp->add_option("--ref-tolerance", cmp_opt.reference_tolerance,
                  "Absolute reference uncertainty added in quadrature");
  cmp->add_option("--entries", cmp_opt.entries, "Entry labels to compare (default: all shared)");

  int pjm_n = 0;
  auto* pjm = app.add_subcommand("pjm-table", "P(j, m) table for N unpolarized spins");
  pjm->add_option("N", pjm_n, "Number of bath spins")->required();

  bool show_isa = false;
  app.add_flag("--isa", show_isa, "Print the selected SIMD kernel variant to stderr");

  CLI11_PARSE(app, argc, argv);
  if (show_isa) std::cerr << "isa: " << pdp::simd::to_string(pdp::simd::active_kernels().isa) << '\n';

  try {
    if (*sim) {
      pdp::run_simulate(sim_o.resolve(), std::cout);
    } else if (*ref) {
      const pdp::RunConfig cfg = ref_o.resolve();
      const auto res = pdp::reference(cfg);
      if (cfg.output.empty() || cfg.output == "-") {
        pdp::write_csv(std::cout, res.table);
      } else {
        pdp::write_csv_file(cfg.output, res.table);
      }
      if (cfg.reference == pdp::ReferenceKind::SpinBlock)
        std::cerr << "discarded_weight: " << pdp::format_real(res.discarded_weight) << '\n';
    } else if (*cmp) {
      const auto report =
          pdp::compare(pdp::read_csv_file(cmp_sim), pdp::read_csv_file(cmp_ref), cmp_opt);
      pdp::print_report(std::cout, report, cmp_opt);
      return report.pass ? 0 : 1;
    } else if (*pjm) {
      pdp::run_pjm_table(pjm_n, std::cout);
    }
  } catch (const pdp::Error& e) {
    std::cerr << "pdpsim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
