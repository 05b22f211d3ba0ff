#include "pdpsim/spin_bath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdp::spin {

void SpinBathParams::validate() const {
  if (n_spins < 1) fail(ErrorKind::Configuration, "n_spins must be at least 1");
  if (!(a >= 0.0) || !std::isfinite(a)) fail(ErrorKind::Configuration, "coupling A must be >= 0");
  if (!std::isfinite(omega0)) fail(ErrorKind::Configuration, "omega0 must be finite");
}

double SpinBathParams::channel_scale() const noexcept {
  return 2.0 * a / std::sqrt(static_cast<double>(n_spins));
}

bool CollectiveLabel::valid_for(int n_spins) const noexcept {
  return twice_j >= 0 && twice_j <= n_spins && (n_spins - twice_j) % 2 == 0 &&
         std::abs(twice_m) <= twice_j && (twice_j - twice_m) % 2 == 0;
}

namespace {

std::uint64_t binomial_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  // c * num / i is integral; splitting c = q i + r keeps it inside 64 bits.
  for (int i = 1; i <= k; ++i) {
    const auto num = static_cast<std::uint64_t>(n - k + i);
    c = c / static_cast<std::uint64_t>(i) * num +
        c % static_cast<std::uint64_t>(i) * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

constexpr int kExactLimit = 60;

}  // namespace

double pjm(int n_spins, int twice_j) {
  if (n_spins < 1) fail(ErrorKind::Domain, "N must be at least 1");
  if (twice_j < 0 || twice_j > n_spins || (n_spins - twice_j) % 2 != 0)
    fail(ErrorKind::Domain, "j = " + std::to_string(twice_j) + "/2 is incompatible with N = " +
                                std::to_string(n_spins));
  const int k = (n_spins + twice_j) / 2;  // N/2 + j
  if (n_spins <= kExactLimit) {
    const std::uint64_t diff = binomial_exact(n_spins, k) - binomial_exact(n_spins, k + 1);
    return std::ldexp(static_cast<double>(diff), -n_spins);
  }
  // C(N,k) - C(N,k+1) = C(N,k) (2j+1)/(k+1)
  const long double n = n_spins;
  const long double lc = std::lgamma(n + 1.0L) - std::lgamma(static_cast<long double>(k) + 1.0L) -
                         std::lgamma(n - k + 1.0L);
  const long double lp = lc - n * std::log(2.0L) +
                         std::log(static_cast<long double>(twice_j + 1) / (k + 1));
  return static_cast<double>(std::exp(lp));
}

PjmTable::PjmTable(int n) : n_spins(n) {
  if (n < 1) fail(ErrorKind::Domain, "N must be at least 1");
  double sum = 0.0;
  double comp = 0.0;
  for (int tj = n % 2; tj <= n; tj += 2) {
    const double p = pjm(n, tj);
    twice_j.push_back(tj);
    probability.push_back(p);
    const double w = (tj + 1) * p;
    const double s = sum + w;
    comp += std::abs(sum) >= std::abs(w) ? (sum - s) + w : (w - s) + sum;
    sum = s;
    cumulative.push_back(sum + comp);
  }
}

double PjmTable::mean_j() const {
  double s = 0.0;
  for (std::size_t i = 0; i < twice_j.size(); ++i)
    s += 0.5 * twice_j[i] * (twice_j[i] + 1) * probability[i];
  return s;
}

CollectiveLabel sample_initial_label(const PjmTable& table, RandomStream& rng) {
  const double u = rng.uniform() * table.total();
  auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), u);
  if (it == table.cumulative.end()) --it;
  const auto idx = static_cast<std::size_t>(it - table.cumulative.begin());
  CollectiveLabel label;
  label.twice_j = table.twice_j[idx];
  const auto multiplicity = static_cast<std::uint64_t>(label.twice_j + 1);
  const auto step = static_cast<int>(rng.next_u64() % multiplicity);
  label.twice_m = -label.twice_j + 2 * step;
  return label;
}

namespace {

// sqrt(j(j+1) - m(m + s)) in doubled units, s = +-1.
double ladder_factor(int twice_j, int twice_m, int s) {
  const double v = 0.25 * (static_cast<double>(twice_j) * (twice_j + 2) -
                           static_cast<double>(twice_m) * (twice_m + 2 * s));
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace

LadderBathState apply_channel(const SpinBathParams& p, Channel alpha, double t,
                              const LadderBathState& chi) {
  const double c = p.channel_scale();
  LadderBathState out = chi;
  switch (alpha) {
    case Channel::Dephasing:
      out.amplitude *= c * chi.label.m();
      break;
    case Channel::Lower: {
      if (chi.label.twice_m <= -chi.label.twice_j) {
        out.amplitude = {};
        break;
      }
      const double f = c * ladder_factor(chi.label.twice_j, chi.label.twice_m, -1);
      out.amplitude *= f * std::polar(1.0, p.omega0 * t);
      out.label.twice_m -= 2;
      break;
    }
    case Channel::Raise: {
      if (chi.label.twice_m >= chi.label.twice_j) {
        out.amplitude = {};
        break;
      }
      const double f = c * ladder_factor(chi.label.twice_j, chi.label.twice_m, +1);
      out.amplitude *= f * std::polar(1.0, -p.omega0 * t);
      out.label.twice_m += 2;
      break;
    }
    default:
      fail(ErrorKind::Configuration, "unknown spin-bath channel");
  }
  return out;
}

SpinBathModel::SpinBathModel(SpinBathParams params) : params_(params), table_(params.n_spins) {
  params_.validate();
}

SpinBathModel::SystemVector SpinBathModel::apply_A(std::size_t alpha, double,
                                                   const SystemVector& psi) const {
  SystemVector out = SystemVector::Zero();
  switch (static_cast<Channel>(alpha)) {
    case Channel::Dephasing:
      out(kPlus) = psi(kPlus);
      out(kMinus) = -psi(kMinus);
      break;
    case Channel::Lower:  // sigma_+ = |+><-|
      out(kPlus) = psi(kMinus);
      break;
    case Channel::Raise:  // sigma_- = |-><+|
      out(kMinus) = psi(kPlus);
      break;
    default:
      fail(ErrorKind::Configuration, "unknown spin-bath channel");
  }
  return out;
}

LadderBathState SpinBathModel::apply_B(std::size_t alpha, double t,
                                       const LadderBathState& chi) const {
  return apply_channel(params_, static_cast<Channel>(alpha), t, chi);
}

double SpinBathModel::bath_action_norm(std::size_t alpha, double,
                                       const LadderBathState& chi) const {
  const double c = params_.channel_scale();
  const CollectiveLabel& l = chi.label;
  switch (static_cast<Channel>(alpha)) {
    case Channel::Dephasing:
      return c * std::abs(l.m()) * std::abs(chi.amplitude);
    case Channel::Lower:
      return c * ladder_factor(l.twice_j, l.twice_m, -1) * std::abs(chi.amplitude);
    case Channel::Raise:
      return c * ladder_factor(l.twice_j, l.twice_m, +1) * std::abs(chi.amplitude);
  }
  fail(ErrorKind::Configuration, "unknown spin-bath channel");
}

Complex SpinBathModel::bath_overlap(const LadderBathState& bra,
                                    const LadderBathState& ket) const noexcept {
  if (!(bra.label == ket.label)) return {};
  return std::conj(bra.amplitude) * ket.amplitude;
}

double SpinBathModel::rate_bound(const LadderBathState& chi) const noexcept {
  return params_.channel_scale() * (chi.label.j() * 2.0 + 0.5);
}

TrajectoryPair<SpinBathModel> SpinBathModel::initial_pair(RandomStream& rng,
                                                          InitialCondition ic) const {
  const CollectiveLabel label = sample_initial_label(table_, rng);
  TrajectoryPair<SpinBathModel> pair;
  for (auto& b : pair.branch) {
    b.psi = SystemVector::Zero();
    b.unit = LadderBathState{label, {1.0, 0.0}};
    b.log_weight = 0.0;
  }
  pair.branch[0].psi(kPlus) = 1.0;
  pair.branch[1].psi(ic == InitialCondition::PlusMinus ? kMinus : kPlus) = 1.0;
  pair.t = 0.0;
  return pair;
}

}  // namespace pdp::spin
