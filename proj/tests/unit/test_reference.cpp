#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "pdpsim/reference.hpp"

using namespace pdp;

namespace {

const jc::LorentzianSpectrum kSpec{5.0, 1.0};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

DenseModel xx_model() {
  DenseModel m;
  m.system_energies = Eigen::VectorXd::Zero(2);
  m.bath_energies = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXcd sx(2, 2);
  sx << 0, 1, 1, 0;
  m.channels.push_back({sx, sx});
  return m;
}

// G' = -int_0^t f(t - s) G(s) ds with f(tau) = (gamma0 lambda / 2) e^{-lambda tau},
// trapezoid product integration on a fine grid.
std::vector<double> volterra_amplitude(double gamma0, double lambda, double t_end, double h) {
  const auto n = static_cast<std::size_t>(std::lround(t_end / h));
  std::vector<double> g(n + 1), dg(n + 1);
  g[0] = 1.0;
  auto f = [&](double tau) { return 0.5 * gamma0 * lambda * std::exp(-lambda * tau); };
  auto memory = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += (k == 0 || k == i ? 0.5 : 1.0) * f((i - k) * h) * g[k];
    return -h * s;
  };
  dg[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Heun predictor-corrector
    g[i + 1] = g[i] + h * dg[i];
    const double pred = memory(i + 1);
    g[i + 1] = g[i] + 0.5 * h * (dg[i] + pred);
    dg[i + 1] = memory(i + 1);
  }
  return g;
}

}  // namespace

TEST_CASE("dense integrator: zero Hamiltonian leaves the state unchanged") {
  DenseModel m = xx_model();
  m.channels.clear();
  const Eigen::VectorXcd phi = ref::product_state(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 1));
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  const auto out = ref::von_neumann_dense(m, init, linspace(0, 3, 7));
  for (const auto& r : out) {
    CHECK(r(0, 0) == Complex(1.0, 0.0));
    CHECK(std::abs(r(1, 1)) == 0.0);
  }
}

TEST_CASE("dense integrator: sigma_x sigma_x Rabi flopping") {
  const Eigen::VectorXcd phi = ref::product_state(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 0));
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  const auto grid = linspace(0, 3, 13);
  const auto out = ref::von_neumann_dense(xx_model(), init, grid);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(out[g](0, 0).real() == doctest::Approx(std::cos(grid[g]) * std::cos(grid[g])).epsilon(1e-9));
    CHECK(out[g].trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("dense integrator is fourth order") {
  DenseModel m = xx_model();
  m.system_energies << 0.7, -0.7;
  m.bath_energies << 0.0, 1.3;
  const Eigen::VectorXcd phi = ref::product_state(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 0));
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  const std::vector<double> grid{0.0, 2.0};
  auto at = [&](double dt) {
    ref::RkOptions o;
    o.dt = dt;
    return ref::von_neumann_dense(m, init, grid, o).back();
  };
  const Eigen::MatrixXcd fine = at(0.1 / 64);
  const double e1 = (at(0.1) - fine).cwiseAbs().maxCoeff();
  const double e2 = (at(0.05) - fine).cwiseAbs().maxCoeff();
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("dense integrator reports norm drift and oversized spaces") {
  const Eigen::VectorXcd phi = ref::product_state(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(2, 0));
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  ref::RkOptions coarse;
  coarse.dt = 1.0;
  coarse.norm_tolerance = 1e-12;
  CHECK_THROWS_AS(ref::von_neumann_dense(xx_model(), init, std::vector<double>{0.0, 5.0}, coarse), Error);

  ref::RkOptions small;
  small.dim_cap = 2;
  CHECK_THROWS_AS(ref::von_neumann_dense(xx_model(), init, std::vector<double>{0.0, 1.0}, small), Error);
  CHECK_THROWS_AS(ref::dense_spin_model(spin::SpinBathParams{21, 0.5, 1.0}), Error);
}

TEST_CASE("exact JC amplitude solves the memory equation") {
  const auto grid = linspace(0, 5, 21);
  const auto exact = ref::jc_exact(kSpec, grid);
  const double h = 1e-3;
  const auto g = volterra_amplitude(5.0, 1.0, 5.0, h);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(std::lround(grid[i] / h));
    CAPTURE(grid[i]);
    CHECK(std::abs(exact.amplitude[i] - g[k]) < 1e-5);
  }
}

TEST_CASE("exact JC population: first zero and revival") {
  auto p_at = [](double t) {
    const std::vector<double> g{t};
    return ref::jc_exact(kSpec, g).amplitude[0].real();
  };
  double a = 1.0, b = 1.5;
  REQUIRE(p_at(a) > 0.0);
  REQUIRE(p_at(b) < 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (a + b);
    (p_at(mid) > 0.0 ? a : b) = mid;
  }
  CHECK(a == doctest::Approx(1.2616979207943591).epsilon(1e-12));

  const auto grid = linspace(1.3, 3.0, 1701);
  const auto pop = ref::jc_exact(kSpec, grid).population();
  std::size_t best = 0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (pop[i] > pop[best]) best = i;
  CHECK(grid[best] == doctest::Approx(2.0944).epsilon(2e-3));
  CHECK(pop[best] == doctest::Approx(0.1231).epsilon(2e-3));
}

TEST_CASE("Born-Markov and TCL2 populations") {
  const std::vector<double> g{0.0, 0.2, 1.0};
  const auto bm = ref::born_markov_p(5.0, g);
  CHECK(bm[0] == 1.0);
  CHECK(bm[1] == doctest::Approx(std::exp(-1.0)));

  // weak coupling: TCL2 is close to exact
  const jc::LorentzianSpectrum weak{0.1, 5.0};
  const auto grid = linspace(0, 10, 21);
  const auto tcl = ref::tcl2_jc_p(weak, grid);
  const auto ex = ref::jc_exact(weak, grid).population();
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(tcl[i] - ex[i]) < 1e-2);

  // strong coupling: TCL2 never goes through zero
  for (double p : ref::tcl2_jc_p(kSpec, linspace(0, 5, 26))) CHECK(p > 0.0);
}

TEST_CASE("exact JC amplitude against a dense 64-mode reservoir") {
  const auto res = jc::discretize(kSpec, 10.0, 64, 3.0);
  const DenseModel dm = ref::dense_jc_model(res);
  const Eigen::VectorXcd phi = ref::product_state(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(dm.bath_dim(), 0));
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  const auto grid = linspace(0, 3, 13);
  const auto dense = ref::von_neumann_dense(dm, init, grid);
  const auto pop = ref::jc_exact(kSpec, grid).population();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(dense[i](0, 0).real() - pop[i]));
  MESSAGE("max deviation, 64 modes: " << worst);
  CHECK(worst < 1e-2);
}

TEST_CASE("exact JC amplitude against the dense 400-mode reservoir") {
  const auto res = jc::discretize(kSpec, 20.0, 400, 5.0);
  const DenseModel dm = ref::dense_jc_model(res);
  const Eigen::VectorXcd phi = ref::product_state(Eigen::VectorXcd::Unit(2, 0), Eigen::VectorXcd::Unit(dm.bath_dim(), 0));
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  const auto grid = linspace(0, 3, 13);
  ref::RkOptions o;
  o.dt = 0.002;
  const auto dense = ref::von_neumann_dense(dm, init, grid, o);
  const auto pop = ref::jc_exact(kSpec, grid).population();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CAPTURE(grid[i]);
    CHECK(std::abs(dense[i](0, 0).real() - pop[i]) < 1e-2);
  }
}

TEST_CASE("spin block reference") {
  const spin::SpinBathParams p{1000, 0.5, 1.0};
  const auto grid = linspace(0, 2, 9);
  const auto r = ref::spin_block_exact(p, grid, 1e-4);
  CHECK(r.discarded_weight <= 1e-4);
  CHECK(r.discarded_weight > 0.0);
  CHECK(r.rho_pm[0].real() == doctest::Approx(1.0 - r.discarded_weight).epsilon(1e-12));

  const auto half = ref::spin_block_exact(p, grid, 1e-4, 0.0025);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(half.rho_pm[i] - r.rho_pm[i]) < 1e-6);

  CHECK_THROWS_AS(ref::spin_block_exact(p, grid, 0.5), Error);
}
