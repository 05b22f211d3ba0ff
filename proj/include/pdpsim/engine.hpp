#pragma once

// Pair-state piecewise-deterministic jump process.
//
// Each branch nu carries a system vector psi (norm 1, changed only by jumps),
// a normalized bath vector `unit` and a log-weight Lambda; the physical bath
// vector is exp(Lambda) * unit. Between jumps Lambda grows at the total rate
// Gamma_nu; a jump through channel alpha maps
//   psi  -> -i A_alpha psi / |A_alpha psi|
//   unit ->    B_alpha unit / |B_alpha unit|
// and fires with rate Gamma_alpha,nu = |A psi| |B chi| / (|psi| |chi|).
// The ensemble mean of |psi_1><psi_2| exp(Lambda_1 + Lambda_2) <unit_2|unit_1>
// is the reduced density matrix.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdpsim/error.hpp"
#include "pdpsim/rng.hpp"

namespace pdp {

inline constexpr std::size_t kMaxChannels = 8;

template <class M>
concept PairModel = requires(const M& m, std::size_t alpha, double t,
                             const typename M::SystemVector& psi,
                             const typename M::BathState& chi, typename M::BathState& chi_mut,
                             Complex s) {
  { M::kSystemDim } -> std::convertible_to<int>;
  { m.channel_count() } -> std::convertible_to<std::size_t>;
  // System operator A_alpha(t) applied to psi.
  { m.apply_A(alpha, t, psi) } -> std::same_as<typename M::SystemVector>;
  // Bath operator B_alpha(t) applied to chi (unnormalized result).
  { m.apply_B(alpha, t, chi) } -> std::same_as<typename M::BathState>;
  // |B_alpha(t) chi| without necessarily materializing the result.
  { m.bath_action_norm(alpha, t, chi) } -> std::convertible_to<double>;
  { m.bath_norm(chi) } -> std::convertible_to<double>;
  // <bra|ket>
  { m.bath_overlap(chi, chi) } -> std::convertible_to<Complex>;
  { m.scale_bath(chi_mut, s) };
  // Upper bound on the total rate of a branch whose bath started at chi,
  // valid for all later times.
  { m.rate_bound(chi) } -> std::convertible_to<double>;
};

// Plain data; unconstrained so a model can name its own pair type.
template <class M>
struct Branch {
  typename M::SystemVector psi;
  typename M::BathState unit;
  double log_weight = 0.0;
};

template <class M>
struct TrajectoryPair {
  std::array<Branch<M>, 2> branch;
  double t = 0.0;
};

template <class M>
using ContributionMatrix = Eigen::Matrix<Complex, M::kSystemDim, M::kSystemDim>;

struct RateSet {
  std::array<double, kMaxChannels> channel{};
  std::size_t count = 0;
  double total = 0.0;
};

enum class Stepper { Euler, Thinning };

struct EvolveOptions {
  Stepper stepper = Stepper::Euler;
  /// Target value of (rate bound) * dt when no explicit dt is given.
  double rate_dt = 0.01;
  /// Hard limit on Gamma_nu * dt, checked against the bound and every step.
  double max_rate_dt = 0.05;
  std::optional<double> dt;
  double log_weight_cap = 700.0;
};

/// Rates Gamma_alpha for one branch at time t. A channel whose system
/// operator annihilates psi has rate exactly 0 and its bath operator is not
/// evaluated.
template <PairModel M>
RateSet compute_rates(const M& model, const Branch<M>& b, double t) {
  RateSet rates;
  rates.count = model.channel_count();
  if (rates.count > kMaxChannels) fail(ErrorKind::Configuration, "too many jump channels");

  const double psi_norm = b.psi.norm();
  const double chi_norm = model.bath_norm(b.unit);
  if (!std::isfinite(psi_norm) || !std::isfinite(chi_norm) || psi_norm == 0.0 || chi_norm == 0.0)
    fail(ErrorKind::InvalidState, "branch state has non-finite or zero norm");

  for (std::size_t a = 0; a < rates.count; ++a) {
    const double a_norm = model.apply_A(a, t, b.psi).norm();
    if (a_norm == 0.0) continue;
    const double b_norm = model.bath_action_norm(a, t, b.unit);
    const double rate = (a_norm / psi_norm) * (b_norm / chi_norm);
    if (!std::isfinite(rate)) fail(ErrorKind::InvalidState, "non-finite jump rate");
    rates.channel[a] = rate;
    rates.total += rate;
  }
  return rates;
}

/// Instantaneous jump through channel alpha at time t. Norms of psi and unit
/// are 1 afterwards; the log-weight is untouched.
template <PairModel M>
void apply_jump(const M& model, Branch<M>& b, std::size_t alpha, double t) {
  typename M::SystemVector a_psi = model.apply_A(alpha, t, b.psi);
  const double a_norm = a_psi.norm();
  if (a_norm == 0.0)
    fail(ErrorKind::ZeroNorm, "jump through channel " + std::to_string(alpha) +
                                  " whose system operator annihilates the state");
  typename M::BathState b_chi = model.apply_B(alpha, t, b.unit);
  const double b_norm = model.bath_norm(b_chi);
  if (b_norm == 0.0)
    fail(ErrorKind::ZeroNorm, "jump through channel " + std::to_string(alpha) +
                                  " whose bath operator annihilates the state");
  b.psi = (-kImag / a_norm) * a_psi;
  model.scale_bath(b_chi, Complex{1.0 / b_norm, 0.0});
  b.unit = std::move(b_chi);
}

/// Drift between jumps: psi and unit are constant, Lambda grows by rate * dt.
template <PairModel M>
void advance_no_jump(Branch<M>& b, double dt, double rate) noexcept {
  b.log_weight += rate * dt;
}

/// Single-uniform partition of [0, Gamma*dt): returns the channel whose
/// sub-interval contains u, or -1 when u >= Gamma*dt (no jump).
inline int select_channel(const RateSet& rates, double u, double dt) noexcept {
  double edge = 0.0;
  for (std::size_t a = 0; a < rates.count; ++a) {
    edge += rates.channel[a] * dt;
    if (u < edge) return static_cast<int>(a);
  }
  return -1;
}

/// Index of the channel picked by a uniform u in [0, total), for thinning.
inline std::size_t pick_channel(const RateSet& rates, double u) noexcept {
  double edge = 0.0;
  std::size_t last = 0;
  for (std::size_t a = 0; a < rates.count; ++a) {
    if (rates.channel[a] <= 0.0) continue;
    last = a;
    edge += rates.channel[a];
    if (u < edge) return a;
  }
  return last;
}

struct StepOutcome {
  std::array<int, 2> fired{-1, -1};
};

/// One Euler-Bernoulli step of length dt from pair.t. Rates are evaluated at
/// the step midpoint; each branch consumes one uniform from its own stream.
template <PairModel M>
StepOutcome step(const M& model, TrajectoryPair<M>& pair, double dt,
                 std::array<RandomStream*, 2> streams, double max_rate_dt = 0.05) {
  StepOutcome out;
  const double t_mid = pair.t + 0.5 * dt;
  for (std::size_t nu = 0; nu < 2; ++nu) {
    Branch<M>& b = pair.branch[nu];
    const RateSet rates = compute_rates(model, b, t_mid);
    if (rates.total * dt > max_rate_dt)
      fail(ErrorKind::Configuration,
           "rate * dt = " + std::to_string(rates.total * dt) + " exceeds " +
               std::to_string(max_rate_dt) + "; reduce dt");
    const double u = streams[nu]->uniform();
    const int alpha = select_channel(rates, u, dt);
    if (alpha >= 0) {
      apply_jump(model, b, static_cast<std::size_t>(alpha), t_mid);
    } else {
      advance_no_jump(b, dt, rates.total);
    }
    out.fired[nu] = alpha;
  }
  pair.t += dt;
  return out;
}

/// Single-trajectory estimator |psi_1><psi_2| e^(Lambda_1 + Lambda_2) <unit_2|unit_1>.
template <PairModel M>
ContributionMatrix<M> contribution(const M& model, const TrajectoryPair<M>& pair) {
  const Branch<M>& b1 = pair.branch[0];
  const Branch<M>& b2 = pair.branch[1];
  const Complex factor =
      std::exp(b1.log_weight + b2.log_weight) * Complex(model.bath_overlap(b2.unit, b1.unit));
  return factor * (b1.psi * b2.psi.adjoint());
}

/// Number of Euler sub-steps used on a grid interval of length h.
inline std::size_t substeps_for_interval(double h, double rate_bound, const EvolveOptions& opt) {
  if (!(h > 0.0)) fail(ErrorKind::Configuration, "time grid must be strictly increasing");
  double n = 1.0;
  if (opt.dt) {
    if (!(*opt.dt > 0.0)) fail(ErrorKind::Configuration, "dt must be positive");
    n = std::ceil(h / *opt.dt * (1.0 - 1e-12));
  } else if (rate_bound > 0.0) {
    n = std::ceil(h * rate_bound / opt.rate_dt * (1.0 - 1e-12));
  }
  n = std::max(n, 1.0);
  if (rate_bound * (h / n) > opt.max_rate_dt)
    fail(ErrorKind::Configuration,
         "rate bound " + std::to_string(rate_bound) + " times dt " + std::to_string(h / n) +
             " exceeds " + std::to_string(opt.max_rate_dt) + "; use dt <= " +
             std::to_string(opt.max_rate_dt / rate_bound));
  return static_cast<std::size_t>(n);
}

/// Start time of sub-step s on the interval starting at t0. Shared by the
/// stepper and by models that tabulate their time dependence, so both see
/// bit-identical times.
inline double substep_start(double t0, std::size_t s, double dt) noexcept {
  return t0 + static_cast<double>(s) * dt;
}

/// All midpoint times the Euler stepper will evaluate rates at.
inline std::vector<double> euler_midpoints(std::span<const double> grid, double rate_bound,
                                           const EvolveOptions& opt) {
  std::vector<double> times;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const std::size_t n = substeps_for_interval(h, rate_bound, opt);
    const double dt = h / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) times.push_back(substep_start(grid[i], s, dt) + 0.5 * dt);
  }
  return times;
}

struct ThinningEvent {
  double time = 0.0;
  int channel = -1;  // -1: no jump before the horizon
};

/// Exact next-jump sampling for time-dependent rates by thinning against a
/// constant bound. Candidate times are drawn from Exp(bound); a candidate at
/// tau is accepted with probability Gamma_nu(tau) / bound.
template <PairModel M>
ThinningEvent sample_next_jump_thinning(const M& model, const Branch<M>& b, double t,
                                        double bound, double horizon, RandomStream& rng) {
  if (!(bound > 0.0)) return {horizon, -1};
  double tau = t;
  for (;;) {
    tau += rng.exponential(bound);
    if (tau >= horizon) return {horizon, -1};
    const RateSet rates = compute_rates(model, b, tau);
    if (rates.total > bound * (1.0 + 1e-9))
      fail(ErrorKind::BoundViolation, "rate " + std::to_string(rates.total) +
                                          " exceeds thinning bound " + std::to_string(bound));
    const double u = rng.uniform() * bound;
    if (u < rates.total) return {tau, static_cast<int>(pick_channel(rates, u))};
  }
}

template <PairModel M>
struct TrajectoryResult {
  std::vector<ContributionMatrix<M>> contributions;
  bool aborted = false;
  std::size_t jumps = 0;
};

namespace detail {

// Midpoint-rule accrual of Lambda over [a, b] in pieces no longer than dt.
template <PairModel M>
void accrue_drift(const M& model, Branch<M>& br, double a, double b, double dt) {
  if (!(b > a)) return;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / dt * (1.0 - 1e-12))));
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double tm = a + (static_cast<double>(s) + 0.5) * h;
    advance_no_jump(br, h, compute_rates(model, br, tm).total);
  }
}

}  // namespace detail

/// Evolves a pair across `grid` (strictly increasing, starting at the pair's
/// time) and returns the estimator at each grid point. A trajectory whose
/// Lambda_1 + Lambda_2 exceeds the cap is aborted and returns no usable data.
template <PairModel M>
TrajectoryResult<M> evolve_trajectory(const M& model, TrajectoryPair<M> pair,
                                      std::span<const double> grid, const EvolveOptions& opt,
                                      RandomStream& stream1, RandomStream& stream2) {
  TrajectoryResult<M> result;
  if (grid.empty()) return result;
  if (grid.front() != pair.t)
    fail(ErrorKind::Configuration, "time grid must start at the initial pair's time");
  const double bound =
      std::max(model.rate_bound(pair.branch[0].unit), model.rate_bound(pair.branch[1].unit));
  std::array<RandomStream*, 2> streams{&stream1, &stream2};

  result.contributions.reserve(grid.size());
  result.contributions.push_back(contribution(model, pair));

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const std::size_t n = substeps_for_interval(h, bound, opt);
    const double dt = h / static_cast<double>(n);

    if (opt.stepper == Stepper::Euler) {
      for (std::size_t s = 0; s < n; ++s) {
        pair.t = substep_start(grid[i], s, dt);
        const StepOutcome o = step(model, pair, dt, streams, opt.max_rate_dt);
        result.jumps += static_cast<std::size_t>(o.fired[0] >= 0) +
                        static_cast<std::size_t>(o.fired[1] >= 0);
      }
    } else {
      for (std::size_t nu = 0; nu < 2; ++nu) {
        Branch<M>& b = pair.branch[nu];
        double t = grid[i];
        for (;;) {
          const ThinningEvent ev =
              sample_next_jump_thinning(model, b, t, bound, grid[i + 1], *streams[nu]);
          detail::accrue_drift(model, b, t, ev.time, dt);
          if (ev.channel < 0) break;
          apply_jump(model, b, static_cast<std::size_t>(ev.channel), ev.time);
          ++result.jumps;
          t = ev.time;
        }
      }
    }
    pair.t = grid[i + 1];

    const double total_log = pair.branch[0].log_weight + pair.branch[1].log_weight;
    if (!(total_log <= opt.log_weight_cap)) {
      result.aborted = true;
      result.contributions.clear();
      return result;
    }
    result.contributions.push_back(contribution(model, pair));
  }
  return result;
}

}  // namespace pdp
