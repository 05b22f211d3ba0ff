#pragma once

// Central spin coupled uniformly to N bath spins:
//   H_I(t) = sigma_3 B_3 + sigma_+ B_-(t) + sigma_- B_+(t),
//   B_3 = (2A/sqrt N) J_3,  B_+-(t) = (2A/sqrt N) J_+- exp(-+ i omega_0 t).
// Uniform couplings keep the bath inside one total-spin block j, and every
// channel maps a |j, m> basis state to another one, so a bath state is a
// label plus a complex amplitude.
//
// Spin quantum numbers are stored doubled (twice_j, twice_m) to stay integral.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "pdpsim/engine.hpp"
#include "pdpsim/error.hpp"
#include "pdpsim/rng.hpp"

namespace pdp::spin {

struct SpinBathParams {
  int n_spins = 1000;
  double a = 0.5;       // rms coupling A
  double omega0 = 1.0;  // central-spin transition frequency

  void validate() const;
  /// 2A / sqrt(N): prefactor shared by all three channels.
  double channel_scale() const noexcept;
};

struct CollectiveLabel {
  int twice_j = 0;
  int twice_m = 0;

  double j() const noexcept { return 0.5 * twice_j; }
  double m() const noexcept { return 0.5 * twice_m; }
  bool valid_for(int n_spins) const noexcept;
  friend bool operator==(const CollectiveLabel&, const CollectiveLabel&) = default;
};

/// Probability of each individual (j, m) pair in the unpolarized mixture of
/// N spins, 2^-N [C(N, N/2+j) - C(N, N/2+j+1)]. Exact integer arithmetic up
/// to N = 60, log-space above.
double pjm(int n_spins, int twice_j);

/// Table of allowed j values (ascending) with per-pair probabilities and the
/// cumulative block weight sum (2j+1) P(j).
struct PjmTable {
  int n_spins = 0;
  std::vector<int> twice_j;
  std::vector<double> probability;  // P(j, m) for any m
  std::vector<double> cumulative;   // compensated running sum of (2j+1) P(j)

  explicit PjmTable(int n_spins);
  double total() const noexcept { return cumulative.empty() ? 0.0 : cumulative.back(); }
  /// Expected value of j under the mixture.
  double mean_j() const;
};

/// Draws (j, m) from the unpolarized mixture: j by inverse CDF over the block
/// weights, then m uniformly, two uniforms from `rng`.
CollectiveLabel sample_initial_label(const PjmTable& table, RandomStream& rng);

struct LadderBathState {
  CollectiveLabel label;
  Complex amplitude{1.0, 0.0};
};

enum class Channel : std::size_t {
  Dephasing = 0,  // sigma_3 (x) B_3
  Lower = 1,      // sigma_+ (x) B_-(t): bath m -> m - 1, phase e^{+i omega_0 t}
  Raise = 2,      // sigma_- (x) B_+(t): bath m -> m + 1, phase e^{-i omega_0 t}
};

/// Unnormalized image of chi under the bath operator of channel alpha.
/// Ladder edges give amplitude 0 with the label left in place.
LadderBathState apply_channel(const SpinBathParams& p, Channel alpha, double t,
                              const LadderBathState& chi);

enum class InitialCondition {
  PlusMinus,  // rho(0) = |+><-| (x) 2^-N I
  PlusPlus,   // rho(0) = |+><+| (x) 2^-N I
};

class SpinBathModel {
 public:
  static constexpr int kSystemDim = 2;
  using SystemVector = Eigen::Matrix<Complex, 2, 1>;
  using BathState = LadderBathState;

  static constexpr int kPlus = 0;
  static constexpr int kMinus = 1;

  explicit SpinBathModel(SpinBathParams params);

  const SpinBathParams& params() const noexcept { return params_; }
  const PjmTable& pjm_table() const noexcept { return table_; }

  std::size_t channel_count() const noexcept { return 3; }
  SystemVector apply_A(std::size_t alpha, double t, const SystemVector& psi) const;
  LadderBathState apply_B(std::size_t alpha, double t, const LadderBathState& chi) const;
  double bath_action_norm(std::size_t alpha, double t, const LadderBathState& chi) const;
  double bath_norm(const LadderBathState& chi) const noexcept { return std::abs(chi.amplitude); }
  Complex bath_overlap(const LadderBathState& bra, const LadderBathState& ket) const noexcept;
  void scale_bath(LadderBathState& chi, Complex s) const noexcept { chi.amplitude *= s; }

  /// c (2j + 1/2) with c = 2A/sqrt N. Bounds the total rate of a branch whose
  /// system vector is a sigma_3 eigenstate, which every jump preserves: at most
  /// one ladder channel is open, c sqrt(j(j+1) - m(m +- 1)) <= c (j + 1/2),
  /// and the dephasing rate is c |m| <= c j.
  double rate_bound(const LadderBathState& chi) const noexcept;

  /// Samples one label and shares it between both branches.
  TrajectoryPair<SpinBathModel> initial_pair(RandomStream& rng,
                                             InitialCondition ic = InitialCondition::PlusMinus) const;

 private:
  SpinBathParams params_;
  PjmTable table_;
};

}  // namespace pdp::spin
