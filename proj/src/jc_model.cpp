#include "pdpsim/jc_model.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>

namespace pdp::jc {

void LorentzianSpectrum::validate() const {
  if (!(gamma0 > 0.0) || !(lambda > 0.0))
    fail(ErrorKind::Configuration, "Lorentzian spectrum needs gamma0 > 0 and lambda > 0");
}

double LorentzianSpectrum::density(double detuning) const noexcept {
  return gamma0 * lambda * lambda / (2.0 * std::numbers::pi * (detuning * detuning + lambda * lambda));
}

double DiscretizedReservoir::coupling_norm2() const noexcept {
  double s = 0.0;
  for (double g : coupling) s += g * g;
  return s;
}

Complex DiscretizedReservoir::correlation(double tau) const noexcept {
  Complex s{};
  for (std::size_t k = 0; k < detuning.size(); ++k)
    s += coupling[k] * coupling[k] * std::polar(1.0, detuning[k] * tau);
  return s;
}

double DiscretizedReservoir::recurrence_time() const noexcept {
  return 2.0 * std::numbers::pi / spacing;
}

std::size_t minimal_modes(double half_window, double horizon) {
  // 2 pi / (2 W / M) > T  <=>  M > W T / pi
  return static_cast<std::size_t>(std::floor(half_window * horizon / std::numbers::pi)) + 1;
}

DiscretizedReservoir discretize(const LorentzianSpectrum& spec, double window_factor,
                                std::size_t modes, double horizon) {
  spec.validate();
  if (modes < 2) fail(ErrorKind::Configuration, "need at least 2 reservoir modes");
  if (!(window_factor > 0.0)) fail(ErrorKind::Configuration, "window_factor must be positive");

  const double half_window = window_factor * spec.lambda;
  DiscretizedReservoir r;
  r.spacing = 2.0 * half_window / static_cast<double>(modes);
  if (!(r.recurrence_time() > horizon))
    fail(ErrorKind::Configuration,
         "recurrence time " + std::to_string(r.recurrence_time()) + " does not exceed horizon " +
             std::to_string(horizon) + "; use n_modes >= " +
             std::to_string(minimal_modes(half_window, horizon)));

  r.detuning.resize(modes);
  r.coupling.resize(modes);
  for (std::size_t k = 0; k < modes; ++k) {
    const double d = -half_window + (static_cast<double>(k) + 0.5) * r.spacing;
    r.detuning[k] = d;
    r.coupling[k] = std::sqrt(spec.density(d) * r.spacing);
  }
  return r;
}

namespace {

double density_thunk(double x, void* p) {
  return static_cast<const LorentzianSpectrum*>(p)->density(x);
}

struct GslHandlerGuard {
  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  ~GslHandlerGuard() { gsl_set_error_handler(previous); }
};

}  // namespace

Complex bath_correlation(const LorentzianSpectrum& spec, double tau) {
  spec.validate();
  GslHandlerGuard guard;
  constexpr std::size_t kLimit = 2000;
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
      gsl_integration_workspace_alloc(kLimit), gsl_integration_workspace_free);

  gsl_function f;
  f.function = density_thunk;
  f.params = const_cast<LorentzianSpectrum*>(&spec);

  // J is even about omega_0, so the sine part vanishes and the integral is
  // twice the one-sided cosine transform.
  double half = 0.0;
  double err = 0.0;
  int status = 0;
  const double w = std::abs(tau);
  if (w == 0.0) {
    status = gsl_integration_qagiu(&f, 0.0, 1e-14, 1e-12, kLimit, ws.get(), &half, &err);
  } else {
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> cyc(
        gsl_integration_workspace_alloc(kLimit), gsl_integration_workspace_free);
    std::unique_ptr<gsl_integration_qawo_table, decltype(&gsl_integration_qawo_table_free)> tab(
        gsl_integration_qawo_table_alloc(w, 1.0, GSL_INTEG_COSINE, 50),
        gsl_integration_qawo_table_free);
    status = gsl_integration_qawf(&f, 0.0, 1e-14, kLimit, ws.get(), cyc.get(), tab.get(), &half,
                                  &err);
  }
  if (status != GSL_SUCCESS && status != GSL_EROUND)
    fail(ErrorKind::Domain, std::string("correlation quadrature failed: ") + gsl_strerror(status));
  return {2.0 * half, 0.0};
}

JcBathState JcBathState::vacuum_state(Complex amplitude) {
  JcBathState s;
  s.sector = Sector::Vacuum;
  s.vacuum = amplitude;
  return s;
}

JcBathState JcBathState::one_photon(std::vector<double> re, std::vector<double> im) {
  if (re.size() != im.size()) fail(ErrorKind::InvalidState, "mismatched amplitude arrays");
  JcBathState s;
  s.sector = Sector::OnePhoton;
  s.vacuum = {};
  s.re = std::move(re);
  s.im = std::move(im);
  return s;
}

JcModel::JcModel(LorentzianSpectrum spec, DiscretizedReservoir reservoir,
                 const simd::Kernels& kernels)
    : spec_(spec), reservoir_(std::move(reservoir)), kernels_(&kernels) {
  spec_.validate();
  if (reservoir_.size() == 0 || reservoir_.coupling.size() != reservoir_.size())
    fail(ErrorKind::Configuration, "empty or inconsistent reservoir");
  coupling_norm_ = std::sqrt(reservoir_.coupling_norm2());
}

void JcModel::tabulate(std::span<const double> times) {
  const std::size_t m = reservoir_.size();
  table_times_.assign(times.begin(), times.end());
  std::sort(table_times_.begin(), table_times_.end());
  table_times_.erase(std::unique(table_times_.begin(), table_times_.end()), table_times_.end());
  table_re_.resize(table_times_.size() * m);
  table_im_.resize(table_times_.size() * m);
  for (std::size_t r = 0; r < table_times_.size(); ++r) {
    const double t = table_times_[r];
    for (std::size_t k = 0; k < m; ++k) {
      const Complex h = std::polar(reservoir_.coupling[k], reservoir_.detuning[k] * t);
      table_re_[r * m + k] = h.real();
      table_im_[r * m + k] = h.imag();
    }
  }
}

JcModel::CouplingRow JcModel::couplings_at(double t) const {
  const std::size_t m = reservoir_.size();
  const auto it = std::lower_bound(table_times_.begin(), table_times_.end(), t);
  if (it != table_times_.end() && *it == t) {
    const auto r = static_cast<std::size_t>(it - table_times_.begin());
    return {table_re_.data() + r * m, table_im_.data() + r * m};
  }
  thread_local std::vector<double> re;
  thread_local std::vector<double> im;
  re.resize(m);
  im.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Complex h = std::polar(reservoir_.coupling[k], reservoir_.detuning[k] * t);
    re[k] = h.real();
    im[k] = h.imag();
  }
  return {re.data(), im.data()};
}

JcBathState JcModel::apply_B(double t, const JcBathState& chi) const {
  if (chi.sector == JcBathState::Sector::Vacuum) return JcBathState::vacuum_state(Complex{});
  if (chi.re.size() != reservoir_.size())
    fail(ErrorKind::InvalidState, "one-photon state has the wrong mode count");
  const CouplingRow h = couplings_at(t);
  return JcBathState::vacuum_state(
      kernels_->dotu(h.re, h.im, chi.re.data(), chi.im.data(), reservoir_.size()));
}

JcBathState JcModel::apply_Bdag(double t, const JcBathState& chi) const {
  if (chi.sector != JcBathState::Sector::Vacuum)
    fail(ErrorKind::SectorViolation,
         "creating a photon on a one-photon state leaves the single-excitation sector");
  const std::size_t m = reservoir_.size();
  std::vector<double> re(m), im(m);
  const CouplingRow h = couplings_at(t);
  kernels_->scale_conj(h.re, h.im, chi.vacuum, re.data(), im.data(), m);
  return JcBathState::one_photon(std::move(re), std::move(im));
}

JcModel::SystemVector JcModel::apply_A(std::size_t alpha, double, const SystemVector& psi) const {
  SystemVector out = SystemVector::Zero();
  if (alpha == kAbsorb) {
    out(kExcited) = psi(kGround);  // sigma_+ = |e><g|
  } else {
    out(kGround) = psi(kExcited);  // sigma_- = |g><e|
  }
  return out;
}

JcBathState JcModel::apply_B(std::size_t alpha, double t, const JcBathState& chi) const {
  return alpha == kAbsorb ? apply_B(t, chi) : apply_Bdag(t, chi);
}

double JcModel::bath_action_norm(std::size_t alpha, double t, const JcBathState& chi) const {
  if (alpha == kAbsorb) {
    if (chi.sector == JcBathState::Sector::Vacuum) return 0.0;
    return std::abs(apply_B(t, chi).vacuum);
  }
  if (chi.sector != JcBathState::Sector::Vacuum)
    fail(ErrorKind::SectorViolation,
         "creating a photon on a one-photon state leaves the single-excitation sector");
  // |B^dag(t) c_0 |0>| = |c_0| sqrt(sum g_k^2); the phases are unimodular.
  return std::abs(chi.vacuum) * coupling_norm_;
}

double JcModel::bath_norm(const JcBathState& chi) const {
  if (chi.sector == JcBathState::Sector::Vacuum) return std::abs(chi.vacuum);
  return std::sqrt(kernels_->norm2(chi.re.data(), chi.im.data(), chi.re.size()));
}

Complex JcModel::bath_overlap(const JcBathState& bra, const JcBathState& ket) const {
  if (bra.sector != ket.sector) return {};
  if (bra.sector == JcBathState::Sector::Vacuum) return std::conj(bra.vacuum) * ket.vacuum;
  return kernels_->dotc(bra.re.data(), bra.im.data(), ket.re.data(), ket.im.data(),
                        bra.re.size());
}

void JcModel::scale_bath(JcBathState& chi, Complex s) const {
  if (chi.sector == JcBathState::Sector::Vacuum) {
    chi.vacuum *= s;
  } else {
    kernels_->scale(chi.re.data(), chi.im.data(), s, chi.re.size());
  }
}

TrajectoryPair<JcModel> JcModel::initial_pair() const {
  TrajectoryPair<JcModel> pair;
  for (auto& b : pair.branch) {
    b.psi = SystemVector::Zero();
    b.psi(kExcited) = 1.0;
    b.unit = JcBathState::vacuum_state();
    b.log_weight = 0.0;
  }
  pair.t = 0.0;
  return pair;
}

}  // namespace pdp::jc
