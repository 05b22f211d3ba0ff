#include "pdpsim/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace pdp::ref {

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.empty()) fail(ErrorKind::Configuration, "empty time grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i + 1] > grid[i]))
      fail(ErrorKind::Configuration, "time grid must be strictly increasing");
}

std::size_t rk_steps(double h, double dt) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(h / dt * (1.0 - 1e-12))));
}

// H_I(t) = sum_f e^{i f t} H_f, stored as triplets grouped by frequency.
class PhasedSparse {
 public:
  struct Triplet {
    Eigen::Index row;
    Eigen::Index col;
    Complex value;
  };

  explicit PhasedSparse(const DenseModel& m) : dim_(m.system_dim() * m.bath_dim()) {
    const int ds = m.system_dim();
    const int db = m.bath_dim();
    std::map<double, std::vector<Triplet>> groups;
    for (const auto& ch : m.channels) {
      for (int i = 0; i < ds; ++i)
        for (int j = 0; j < ds; ++j) {
          const Complex s = ch.system_op(i, j);
          if (s == Complex{}) continue;
          const double fs = m.system_energies(i) - m.system_energies(j);
          for (int a = 0; a < db; ++a)
            for (int b = 0; b < db; ++b) {
              const Complex v = ch.bath_op(a, b);
              if (v == Complex{}) continue;
              const double f = fs + m.bath_energies(a) - m.bath_energies(b);
              groups[f].push_back({static_cast<Eigen::Index>(i) * db + a,
                                   static_cast<Eigen::Index>(j) * db + b, s * v});
            }
        }
    }
    for (auto& [f, trips] : groups) {
      freqs_.push_back(f);
      groups_.push_back(std::move(trips));
    }
  }

  Eigen::Index dim() const noexcept { return dim_; }

  // out = -i H(t) x
  void derivative(double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) const {
    out.setZero(dim_);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Complex ph = -kImag * std::polar(1.0, freqs_[g] * t);
      for (const Triplet& tr : groups_[g]) out(tr.row) += ph * tr.value * x(tr.col);
    }
  }

 private:
  Eigen::Index dim_;
  std::vector<double> freqs_;
  std::vector<std::vector<Triplet>> groups_;
};

// Classic RK4 over the grid; calls sink(grid index, state) at each grid point.
template <class Deriv, class Vec, class Sink>
void rk4_over_grid(const Deriv& f, Vec x, std::span<const double> grid, double dt,
                   double norm_tol, Sink&& sink) {
  const double n0 = x.norm();
  Vec k1 = x, k2 = x, k3 = x, k4 = x, tmp = x;
  sink(0, x);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h_int = grid[i + 1] - grid[i];
    const std::size_t n = rk_steps(h_int, dt);
    const double h = h_int / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double t = grid[i] + static_cast<double>(s) * h;
      f(t, x, k1);
      tmp = x + (0.5 * h) * k1;
      f(t + 0.5 * h, tmp, k2);
      tmp = x + (0.5 * h) * k2;
      f(t + 0.5 * h, tmp, k3);
      tmp = x + h * k3;
      f(t + h, tmp, k4);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (std::abs(x.norm() - n0) > norm_tol * std::max(1.0, n0))
      fail(ErrorKind::Domain, "RK4 norm drift " + std::to_string(std::abs(x.norm() - n0)) +
                                  " exceeds tolerance; reduce dt");
    sink(i + 1, x);
  }
}

}  // namespace

Eigen::VectorXcd product_state(const Eigen::VectorXcd& system, const Eigen::VectorXcd& bath) {
  Eigen::VectorXcd out(system.size() * bath.size());
  for (Eigen::Index i = 0; i < system.size(); ++i)
    out.segment(i * bath.size(), bath.size()) = system(i) * bath;
  return out;
}

std::vector<Eigen::MatrixXcd> von_neumann_dense(const DenseModel& model,
                                                std::span<const PurePair> initial,
                                                std::span<const double> grid,
                                                const RkOptions& opt) {
  model.validate();
  check_grid(grid);
  if (!(opt.dt > 0.0)) fail(ErrorKind::Configuration, "RK4 dt must be positive");
  const int ds = model.system_dim();
  const int db = model.bath_dim();
  const auto dim = static_cast<std::size_t>(ds) * static_cast<std::size_t>(db);
  if (dim > opt.dim_cap)
    fail(ErrorKind::Configuration, "dense dimension " + std::to_string(dim) + " exceeds cap " +
                                       std::to_string(opt.dim_cap));

  const PhasedSparse h(model);
  auto deriv = [&h](double t, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) {
    h.derivative(t, x, out);
  };

  std::vector<Eigen::MatrixXcd> rho(grid.size(), Eigen::MatrixXcd::Zero(ds, ds));
  using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  std::vector<Eigen::VectorXcd> phi1(grid.size());

  for (const PurePair& pp : initial) {
    if (static_cast<std::size_t>(pp.phi1.size()) != dim ||
        static_cast<std::size_t>(pp.phi2.size()) != dim)
      fail(ErrorKind::Configuration, "initial vector has the wrong dimension");
    rk4_over_grid(deriv, pp.phi1, grid, opt.dt, opt.norm_tolerance,
                  [&](std::size_t g, const Eigen::VectorXcd& x) { phi1[g] = x; });
    rk4_over_grid(deriv, pp.phi2, grid, opt.dt, opt.norm_tolerance,
                  [&](std::size_t g, const Eigen::VectorXcd& x) {
                    const Eigen::Map<const RowMajor> a(phi1[g].data(), ds, db);
                    const Eigen::Map<const RowMajor> b(x.data(), ds, db);
                    rho[g] += pp.weight * (a * b.adjoint());
                  });
  }
  return rho;
}

DenseModel dense_jc_model(const jc::DiscretizedReservoir& reservoir) {
  const auto m = static_cast<Eigen::Index>(reservoir.size());
  DenseModel d;
  d.system_energies = Eigen::VectorXd::Zero(2);
  d.bath_energies = Eigen::VectorXd::Zero(m + 1);
  for (Eigen::Index k = 0; k < m; ++k)
    d.bath_energies(k + 1) = -reservoir.detuning[static_cast<std::size_t>(k)];

  Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(2, 2);
  sp(jc::JcModel::kExcited, jc::JcModel::kGround) = 1.0;
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m + 1, m + 1);
  for (Eigen::Index k = 0; k < m; ++k) b(0, k + 1) = reservoir.coupling[static_cast<std::size_t>(k)];

  d.channels.push_back({sp, b});
  d.channels.push_back({sp.adjoint(), b.adjoint()});
  return d;
}

DenseModel dense_spin_model(const spin::SpinBathParams& params) {
  params.validate();
  const int n = params.n_spins;
  if (n > 20) fail(ErrorKind::Configuration, "dense spin model limited to small N");
  const Eigen::Index db = Eigen::Index{1} << n;
  const double scale = params.a / std::sqrt(static_cast<double>(n));

  // Bit k of a bath index is 0 for spin k up.
  Eigen::MatrixXcd b3 = Eigen::MatrixXcd::Zero(db, db);
  Eigen::MatrixXcd bplus = Eigen::MatrixXcd::Zero(db, db);
  for (Eigen::Index s = 0; s < db; ++s) {
    for (int k = 0; k < n; ++k) {
      const Eigen::Index bit = Eigen::Index{1} << k;
      const bool down = (s & bit) != 0;
      b3(s, s) += down ? -scale : scale;
      if (down) bplus(s ^ bit, s) += 2.0 * scale;
    }
  }

  DenseModel d;
  d.system_energies = Eigen::VectorXd(2);
  d.system_energies << 0.5 * params.omega0, -0.5 * params.omega0;
  d.bath_energies = Eigen::VectorXd::Zero(db);

  Eigen::MatrixXcd s3 = Eigen::MatrixXcd::Zero(2, 2);
  s3(0, 0) = 1.0;
  s3(1, 1) = -1.0;
  Eigen::MatrixXcd sp = Eigen::MatrixXcd::Zero(2, 2);
  sp(0, 1) = 1.0;

  d.channels.push_back({s3, b3});
  d.channels.push_back({sp, bplus.adjoint()});
  d.channels.push_back({sp.adjoint(), bplus});
  return d;
}

std::vector<PurePair> spin_mixed_initial(int n_spins, spin::InitialCondition ic) {
  if (n_spins < 1 || n_spins > 20) fail(ErrorKind::Configuration, "N out of range for dense spin");
  const Eigen::Index db = Eigen::Index{1} << n_spins;
  Eigen::VectorXcd plus = Eigen::VectorXcd::Zero(2);
  plus(0) = 1.0;
  Eigen::VectorXcd second = Eigen::VectorXcd::Zero(2);
  second(ic == spin::InitialCondition::PlusMinus ? 1 : 0) = 1.0;

  std::vector<PurePair> out;
  out.reserve(static_cast<std::size_t>(db));
  for (Eigen::Index s = 0; s < db; ++s) {
    Eigen::VectorXcd bath = Eigen::VectorXcd::Zero(db);
    bath(s) = 1.0;
    out.push_back({product_state(plus, bath), product_state(second, bath),
                   std::ldexp(1.0, -n_spins)});
  }
  return out;
}

std::vector<double> AmplitudeSolution::population() const {
  std::vector<double> p(amplitude.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amplitude[i]);
  return p;
}

AmplitudeSolution jc_exact(const jc::LorentzianSpectrum& spec, std::span<const double> grid) {
  spec.validate();
  const double lam = spec.lambda;
  const Complex d = std::sqrt(Complex(lam * lam - 2.0 * spec.gamma0 * lam, 0.0));
  AmplitudeSolution sol;
  sol.t.assign(grid.begin(), grid.end());
  sol.amplitude.reserve(grid.size());
  for (double t : grid) {
    const double decay = std::exp(-0.5 * lam * t);
    Complex g;
    if (std::abs(d) < 1e-12 * lam) {
      g = decay * (1.0 + 0.5 * lam * t);
    } else {
      const Complex x = 0.5 * d * t;
      g = decay * (std::cosh(x) + (lam / d) * std::sinh(x));
    }
    sol.amplitude.push_back(g);
  }
  return sol;
}

std::vector<double> born_markov_p(double gamma0, std::span<const double> grid) {
  if (!(gamma0 > 0.0)) fail(ErrorKind::Configuration, "gamma0 must be positive");
  std::vector<double> p;
  p.reserve(grid.size());
  for (double t : grid) p.push_back(std::exp(-gamma0 * t));
  return p;
}

std::vector<double> tcl2_jc_p(const jc::LorentzianSpectrum& spec, std::span<const double> grid) {
  spec.validate();
  std::vector<double> p;
  p.reserve(grid.size());
  for (double t : grid) {
    const double integral = spec.gamma0 * (t + std::expm1(-spec.lambda * t) / spec.lambda);
    p.push_back(std::exp(-integral));
  }
  return p;
}

namespace {

// Amplitudes of the pair {|+, m>, |-, m+1>} with diagonal c m, -c (m+1) and
// off-diagonal kappa e^{+-i omega_0 t}.
std::vector<Eigen::Vector2cd> two_level_orbit(double c, double m, double kappa, double omega0,
                                              const Eigen::Vector2cd& start,
                                              std::span<const double> grid, double dt) {
  const double e_plus = c * m;
  const double e_minus = -c * (m + 1.0);
  auto deriv = [&](double t, const Eigen::Vector2cd& x, Eigen::Vector2cd& out) {
    const Complex up = kappa * std::polar(1.0, omega0 * t);
    out(0) = -kImag * (e_plus * x(0) + up * x(1));
    out(1) = -kImag * (std::conj(up) * x(0) + e_minus * x(1));
  };
  std::vector<Eigen::Vector2cd> orbit(grid.size());
  rk4_over_grid(deriv, start, grid, dt, 1e-8,
                [&](std::size_t g, const Eigen::Vector2cd& x) { orbit[g] = x; });
  return orbit;
}

double raise_factor(double j, double m) {
  const double v = j * (j + 1.0) - m * (m + 1.0);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace

SpinBlockResult spin_block_exact(const spin::SpinBathParams& params, std::span<const double> grid,
                                 double eps_cut, double dt, std::size_t dim_cap) {
  params.validate();
  check_grid(grid);
  if (!(eps_cut >= 0.0 && eps_cut <= 0.01))
    fail(ErrorKind::Configuration, "eps_cut must lie in [0, 0.01]");
  if (!(dt > 0.0)) fail(ErrorKind::Configuration, "RK4 dt must be positive");

  const spin::PjmTable table(params.n_spins);
  std::vector<std::size_t> order(table.twice_j.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.probability[a] > table.probability[b];
  });

  const double c = params.channel_scale();
  SpinBlockResult res;
  res.t.assign(grid.begin(), grid.end());
  res.rho_pm.assign(grid.size(), Complex{});

  double kept = 0.0;
  double discarded = 0.0;
  bool done = false;
  for (std::size_t idx : order) {
    const int tj = table.twice_j[idx];
    const double p = table.probability[idx];
    for (int tm = -tj; tm <= tj; tm += 2) {
      if (done || (eps_cut > 0.0 && kept >= 1.0 - eps_cut)) {
        done = true;
        discarded += p;
        continue;
      }
      const auto block_dim = static_cast<std::size_t>(2 * (tj + 1));
      if (block_dim > dim_cap)
        fail(ErrorKind::Configuration,
             "block dimension " + std::to_string(block_dim) + " exceeds cap; raise eps_cut");
      const double j = 0.5 * tj;
      const double m = 0.5 * tm;
      // |+, m> within {|+, m>, |-, m+1>}
      const auto up = two_level_orbit(c, m, c * raise_factor(j, m), params.omega0,
                                      Eigen::Vector2cd(1.0, 0.0), grid, dt);
      // |-, m> within {|+, m-1>, |-, m>}
      const auto down = two_level_orbit(c, m - 1.0, c * raise_factor(j, m - 1.0), params.omega0,
                                        Eigen::Vector2cd(0.0, 1.0), grid, dt);
      for (std::size_t g = 0; g < grid.size(); ++g)
        res.rho_pm[g] += p * up[g](0) * std::conj(down[g](1));
      kept += p;
      ++res.labels_used;
    }
  }
  res.discarded_weight = discarded;
  return res;
}

}  // namespace pdp::ref
