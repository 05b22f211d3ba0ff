#include "pdpsim/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pdp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x))
    fail(ErrorKind::Configuration, key + ": expected a real number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size())
    fail(ErrorKind::Configuration, key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

}  // namespace

const char* to_string(ModelKind m) noexcept {
  return m == ModelKind::Jc ? "jc" : "spin_bath";
}

const char* to_string(ReferenceKind r) noexcept {
  switch (r) {
    case ReferenceKind::JcExact: return "jc_exact";
    case ReferenceKind::BornMarkov: return "born_markov";
    case ReferenceKind::Tcl2: return "tcl2";
    case ReferenceKind::SpinBlock: return "spin_block";
    case ReferenceKind::Dense: return "dense";
  }
  return "?";
}

ReferenceKind parse_reference(const std::string& s) {
  if (s == "jc_exact") return ReferenceKind::JcExact;
  if (s == "born_markov") return ReferenceKind::BornMarkov;
  if (s == "tcl2") return ReferenceKind::Tcl2;
  if (s == "spin_block") return ReferenceKind::SpinBlock;
  if (s == "dense") return ReferenceKind::Dense;
  fail(ErrorKind::Configuration,
       "reference: expected jc_exact|born_markov|tcl2|spin_block|dense, got '" + s + "'");
}

Stepper parse_stepper(const std::string& s) {
  if (s == "euler") return Stepper::Euler;
  if (s == "thinning") return Stepper::Thinning;
  fail(ErrorKind::Configuration, "stepper: expected euler|thinning, got '" + s + "'");
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key == "model") {
    if (v == "jc") cfg.model = ModelKind::Jc;
    else if (v == "spin_bath") cfg.model = ModelKind::SpinBath;
    else fail(ErrorKind::Configuration, "model: expected jc|spin_bath, got '" + v + "'");
  } else if (key == "gamma0") {
    cfg.gamma0 = to_double(key, v);
  } else if (key == "lambda") {
    cfg.lambda = to_double(key, v);
  } else if (key == "window_factor") {
    cfg.window_factor = to_double(key, v);
  } else if (key == "n_modes") {
    cfg.n_modes = to_u64(key, v);
  } else if (key == "n_spins") {
    const auto n = to_u64(key, v);
    if (n > 1u << 20) fail(ErrorKind::Configuration, "n_spins: too large");
    cfg.n_spins = static_cast<int>(n);
  } else if (key == "a_over_omega0") {
    cfg.a_over_omega0 = to_double(key, v);
  } else if (key == "omega0") {
    cfg.omega0 = to_double(key, v);
  } else if (key == "spin_initial") {
    if (v == "plus_minus") cfg.spin_initial = spin::InitialCondition::PlusMinus;
    else if (v == "plus_plus") cfg.spin_initial = spin::InitialCondition::PlusPlus;
    else fail(ErrorKind::Configuration, "spin_initial: expected plus_minus|plus_plus, got '" + v + "'");
  } else if (key == "t_max") {
    cfg.t_max = to_double(key, v);
  } else if (key == "n_grid") {
    cfg.n_grid = to_u64(key, v);
  } else if (key == "dt") {
    cfg.dt = to_double(key, v);
  } else if (key == "steps_per_grid") {
    cfg.steps_per_grid = to_u64(key, v);
  } else if (key == "rate_dt") {
    cfg.rate_dt = to_double(key, v);
  } else if (key == "max_rate_dt") {
    cfg.max_rate_dt = to_double(key, v);
  } else if (key == "stepper") {
    cfg.stepper = parse_stepper(v);
  } else if (key == "n_trajectories") {
    cfg.n_trajectories = to_u64(key, v);
  } else if (key == "seed") {
    cfg.seed = to_u64(key, v);
  } else if (key == "workers") {
    const auto w = to_u64(key, v);
    if (w > 4096) fail(ErrorKind::Configuration, "workers: too many");
    cfg.workers = static_cast<unsigned>(w);
  } else if (key == "chunk_size") {
    cfg.chunk_size = to_u64(key, v);
  } else if (key == "log_weight_cap") {
    cfg.log_weight_cap = to_double(key, v);
  } else if (key == "max_abort_fraction") {
    cfg.max_abort_fraction = to_double(key, v);
  } else if (key == "reference") {
    cfg.reference = parse_reference(v);
  } else if (key == "eps_cut") {
    cfg.eps_cut = to_double(key, v);
  } else if (key == "reference_dt") {
    cfg.reference_dt = to_double(key, v);
  } else if (key == "output") {
    cfg.output = v;
  } else {
    fail(ErrorKind::Configuration, "unknown config key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Configuration,
           origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(ErrorKind::Configuration, origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base), path);
}

void RunConfig::validate() const {
  auto positive = [](double x, const char* key) {
    if (!(x > 0.0) || !std::isfinite(x))
      fail(ErrorKind::Configuration, std::string(key) + " must be positive");
  };
  if (model == ModelKind::Jc) {
    positive(gamma0, "gamma0");
    positive(lambda, "lambda");
    positive(window_factor, "window_factor");
    if (n_modes < 2) fail(ErrorKind::Configuration, "n_modes must be at least 2");
  } else {
    if (n_spins < 1) fail(ErrorKind::Configuration, "n_spins must be at least 1");
    if (!(a_over_omega0 >= 0.0)) fail(ErrorKind::Configuration, "a_over_omega0 must be >= 0");
    positive(omega0, "omega0");
  }
  positive(t_max, "t_max");
  if (n_grid < 2) fail(ErrorKind::Configuration, "n_grid must be at least 2");
  if (dt && steps_per_grid)
    fail(ErrorKind::Configuration, "set at most one of dt and steps_per_grid");
  if (dt) positive(*dt, "dt");
  if (steps_per_grid && *steps_per_grid == 0)
    fail(ErrorKind::Configuration, "steps_per_grid must be positive");
  positive(rate_dt, "rate_dt");
  positive(max_rate_dt, "max_rate_dt");
  if (rate_dt > max_rate_dt)
    fail(ErrorKind::Configuration, "rate_dt must not exceed max_rate_dt");
  if (max_rate_dt > 0.05)
    fail(ErrorKind::Configuration, "max_rate_dt must not exceed 0.05");
  if (n_trajectories == 0) fail(ErrorKind::Configuration, "n_trajectories must be positive");
  if (workers == 0) fail(ErrorKind::Configuration, "workers must be positive");
  if (chunk_size == 0) fail(ErrorKind::Configuration, "chunk_size must be positive");
  positive(log_weight_cap, "log_weight_cap");
  if (!(max_abort_fraction >= 0.0 && max_abort_fraction <= 1.0))
    fail(ErrorKind::Configuration, "max_abort_fraction must lie in [0, 1]");
  if (!(eps_cut >= 0.0 && eps_cut <= 0.01))
    fail(ErrorKind::Configuration, "eps_cut must lie in [0, 0.01]");
  positive(reference_dt, "reference_dt");
}

std::vector<double> RunConfig::grid() const {
  std::vector<double> g(n_grid);
  const double h = t_max / static_cast<double>(n_grid - 1);
  for (std::size_t i = 0; i < n_grid; ++i) g[i] = static_cast<double>(i) * h;
  g.back() = t_max;
  return g;
}

EvolveOptions RunConfig::evolve_options() const {
  EvolveOptions o;
  o.stepper = stepper;
  o.rate_dt = rate_dt;
  o.max_rate_dt = max_rate_dt;
  o.log_weight_cap = log_weight_cap;
  if (dt) o.dt = *dt;
  if (steps_per_grid)
    o.dt = t_max / static_cast<double>(n_grid - 1) / static_cast<double>(*steps_per_grid);
  return o;
}

}  // namespace pdp
