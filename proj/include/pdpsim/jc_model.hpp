#pragma once

// Two-level atom coupled to a zero-temperature bosonic reservoir with a
// Lorentzian spectral density, H_I(t) = sigma_+ B(t) + sigma_- B^dag(t),
// B(t) = sum_k g_k exp(i delta_k t) b_k with delta_k = omega_0 - omega_k.
//
// Starting from |e> (x) |0>, jumps alternate strictly between the emission
// channel (sigma_-, B^dag) and the absorption channel (sigma_+, B), so the
// bath never leaves the {vacuum, one photon} sector. The bath is stored in
// that sector only: a vacuum amplitude or M one-photon amplitudes.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "pdpsim/engine.hpp"
#include "pdpsim/error.hpp"
#include "pdpsim/simd/kernels.hpp"

namespace pdp::jc {

struct LorentzianSpectrum {
  double gamma0 = 5.0;  // Markovian decay rate
  double lambda = 1.0;  // spectral width, inverse correlation time

  void validate() const;
  /// J at detuning delta = omega_0 - omega.
  double density(double detuning) const noexcept;
};

struct DiscretizedReservoir {
  std::vector<double> detuning;  // delta_k
  std::vector<double> coupling;  // g_k >= 0
  double spacing = 0.0;

  std::size_t size() const noexcept { return detuning.size(); }
  double coupling_norm2() const noexcept;
  /// sum_k g_k^2 exp(i delta_k tau), the discretized <0|B(t+tau) B^dag(t)|0>.
  Complex correlation(double tau) const noexcept;
  double recurrence_time() const noexcept;
};

/// Smallest mode count whose recurrence time exceeds `horizon`.
std::size_t minimal_modes(double half_window, double horizon);

/// Midpoint grid of `modes` detunings on [-W, W], W = window_factor * lambda,
/// g_k = sqrt(J * spacing). Throws if the recurrence time 2 pi / spacing does
/// not exceed `horizon`.
DiscretizedReservoir discretize(const LorentzianSpectrum& spec, double window_factor,
                                std::size_t modes, double horizon);

/// Continuum correlation integral of J(omega) exp(i (omega_0 - omega) tau),
/// by adaptive quadrature.
Complex bath_correlation(const LorentzianSpectrum& spec, double tau);

struct JcBathState {
  enum class Sector { Vacuum, OnePhoton };

  Sector sector = Sector::Vacuum;
  Complex vacuum{1.0, 0.0};
  // One-photon amplitudes f_k (split complex); only meaningful in OnePhoton.
  std::vector<double> re;
  std::vector<double> im;

  static JcBathState vacuum_state(Complex amplitude = {1.0, 0.0});
  static JcBathState one_photon(std::vector<double> re, std::vector<double> im);
};

class JcModel {
 public:
  static constexpr int kSystemDim = 2;
  using SystemVector = Eigen::Matrix<Complex, 2, 1>;
  using BathState = JcBathState;

  static constexpr int kExcited = 0;
  static constexpr int kGround = 1;
  static constexpr std::size_t kAbsorb = 0;  // sigma_+ (x) B(t)
  static constexpr std::size_t kEmit = 1;    // sigma_- (x) B^dag(t)

  JcModel(LorentzianSpectrum spec, DiscretizedReservoir reservoir,
          const simd::Kernels& kernels = simd::active_kernels());

  const LorentzianSpectrum& spectrum() const noexcept { return spec_; }
  const DiscretizedReservoir& reservoir() const noexcept { return reservoir_; }
  const simd::Kernels& kernels() const noexcept { return *kernels_; }

  /// Precomputes g_k exp(i delta_k t) for these times; any other time is
  /// evaluated on the fly. Not thread-safe; call before sharing the model.
  void tabulate(std::span<const double> times);
  std::size_t tabulated_times() const noexcept { return table_times_.size(); }

  /// B(t) chi: vacuum amplitude sum_k g_k e^{i delta_k t} f_k, no photon part.
  JcBathState apply_B(double t, const JcBathState& chi) const;
  /// B^dag(t) chi: f_k = g_k e^{-i delta_k t} c_0. Requires chi in the vacuum sector.
  JcBathState apply_Bdag(double t, const JcBathState& chi) const;

  // Engine interface.
  std::size_t channel_count() const noexcept { return 2; }
  SystemVector apply_A(std::size_t alpha, double t, const SystemVector& psi) const;
  JcBathState apply_B(std::size_t alpha, double t, const JcBathState& chi) const;
  double bath_action_norm(std::size_t alpha, double t, const JcBathState& chi) const;
  double bath_norm(const JcBathState& chi) const;
  Complex bath_overlap(const JcBathState& bra, const JcBathState& ket) const;
  void scale_bath(JcBathState& chi, Complex s) const;
  double rate_bound(const JcBathState&) const noexcept { return coupling_norm_; }

  /// Both branches |e> (x) |0>, zero log-weight.
  TrajectoryPair<JcModel> initial_pair() const;

 private:
  struct CouplingRow {
    const double* re;
    const double* im;
  };
  CouplingRow couplings_at(double t) const;

  LorentzianSpectrum spec_;
  DiscretizedReservoir reservoir_;
  const simd::Kernels* kernels_;
  double coupling_norm_ = 0.0;

  std::vector<double> table_times_;
  std::vector<double> table_re_;
  std::vector<double> table_im_;
};

}  // namespace pdp::jc
