#pragma once

// Run configuration: a flat `key = value` text file ('#' starts a comment)
// plus command-line overrides.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdpsim/engine.hpp"
#include "pdpsim/spin_bath.hpp"

namespace pdp {

enum class ModelKind { Jc, SpinBath };
enum class ReferenceKind { JcExact, BornMarkov, Tcl2, SpinBlock, Dense };

struct RunConfig {
  ModelKind model = ModelKind::Jc;

  // jc
  double gamma0 = 5.0;
  double lambda = 1.0;
  double window_factor = 20.0;
  std::size_t n_modes = 400;

  // spin_bath
  int n_spins = 1000;
  double a_over_omega0 = 0.5;
  double omega0 = 1.0;
  spin::InitialCondition spin_initial = spin::InitialCondition::PlusMinus;

  // grid and stepping
  double t_max = 5.0;
  std::size_t n_grid = 25;
  std::optional<double> dt;
  std::optional<std::size_t> steps_per_grid;
  double rate_dt = 0.01;
  double max_rate_dt = 0.05;
  Stepper stepper = Stepper::Euler;

  // ensemble
  std::uint64_t n_trajectories = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::size_t chunk_size = 256;
  double log_weight_cap = 700.0;
  double max_abort_fraction = 1e-6;

  // reference
  ReferenceKind reference = ReferenceKind::JcExact;
  double eps_cut = 1e-4;
  double reference_dt = 0.005;

  std::string output;

  /// Throws a configuration error naming the offending key.
  void validate() const;

  std::vector<double> grid() const;
  EvolveOptions evolve_options() const;
};

/// Applies one `key = value` setting. Unknown keys and malformed values throw.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Reads a config file on top of `base`.
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Same, from text; `origin` names the source in error messages.
RunConfig parse_config(const std::string& text, RunConfig base = {},
                       const std::string& origin = "<config>");

const char* to_string(ModelKind m) noexcept;
const char* to_string(ReferenceKind r) noexcept;
ReferenceKind parse_reference(const std::string& s);
Stepper parse_stepper(const std::string& s);

}  // namespace pdp
