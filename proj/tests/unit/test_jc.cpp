#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "pdpsim/engine.hpp"
#include "pdpsim/ensemble.hpp"
#include "pdpsim/jc_model.hpp"
#include "pdpsim/reference.hpp"
#include "pdpsim/simd/kernels.hpp"

using namespace pdp;
using jc::JcBathState;
using jc::JcModel;

namespace {

const jc::LorentzianSpectrum kSpec{5.0, 1.0};

}  // namespace

TEST_CASE("discretization refuses a recurrence inside the horizon") {
  const std::size_t need = jc::minimal_modes(20.0, 5.0);
  // spacing 2W/M, recurrence 2 pi M / 2W > 5  =>  M > 5 * 40 / (2 pi) = 31.8
  CHECK(need == 32);
  CHECK_NOTHROW(jc::discretize(kSpec, 20.0, need, 5.0));
  try {
    jc::discretize(kSpec, 20.0, need - 1, 5.0);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
    CHECK(std::string(e.what()).find(std::to_string(need)) != std::string::npos);
  }
  const auto res = jc::discretize(kSpec, 20.0, 400, 5.0);
  CHECK(res.recurrence_time() == doctest::Approx(2.0 * std::numbers::pi / res.spacing));
  CHECK(res.recurrence_time() > 60.0);
}

TEST_CASE("discrete coupling weight approaches the window integral of J") {
  const auto res = jc::discretize(kSpec, 20.0, 400, 5.0);
  // (gamma0 lambda / pi) atan(W / lambda) / 2 * 2
  const double window = kSpec.gamma0 * kSpec.lambda / (2.0 * std::numbers::pi) * 2.0 * std::atan(20.0);
  CHECK(res.coupling_norm2() == doctest::Approx(window).epsilon(1e-4));
  for (std::size_t k = 0; k < res.size(); ++k) REQUIRE(res.coupling[k] >= 0.0);
  CHECK(res.detuning.front() == doctest::Approx(-20.0 + 0.5 * res.spacing));
}

TEST_CASE("continuum bath correlation is the Lorentzian kernel") {
  for (double tau : {0.0, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0}) {
    const Complex c = jc::bath_correlation(kSpec, tau);
    const double want = 0.5 * kSpec.gamma0 * kSpec.lambda * std::exp(-kSpec.lambda * tau);
    CAPTURE(tau);
    CHECK(std::abs(c - want) <= 1e-3 * want + 1e-12);
  }
}

TEST_CASE("discrete correlation tracks the continuum one inside the horizon") {
  const auto res = jc::discretize(kSpec, 20.0, 400, 5.0);
  for (double tau : {0.2, 1.0, 3.0, 5.0}) {
    const Complex d = res.correlation(tau);
    const double want = 0.5 * kSpec.gamma0 * kSpec.lambda * std::exp(-kSpec.lambda * tau);
    CAPTURE(tau);
    // window truncation leaves a ~1/(pi W) tail of fast oscillation
    CHECK(std::abs(d - want) < 0.05 * 0.5 * kSpec.gamma0);
  }
}

TEST_CASE("B^dag on a one-photon state is a sector violation") {
  const JcModel model(kSpec, jc::discretize(kSpec, 20.0, 400, 5.0));
  const JcBathState photon = model.apply_Bdag(0.3, JcBathState::vacuum_state());
  REQUIRE(photon.sector == JcBathState::Sector::OnePhoton);
  try {
    model.apply_Bdag(0.4, photon);
    FAIL("expected a sector violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SectorViolation);
  }
  // B on the vacuum gives zero
  const JcBathState z = model.apply_B(0.4, JcBathState::vacuum_state());
  CHECK(model.bath_norm(z) == 0.0);
}

TEST_CASE("B(t) B^dag(s)|0> is the discrete correlation") {
  const JcModel model(kSpec, jc::discretize(kSpec, 20.0, 400, 5.0));
  const JcBathState photon = model.apply_Bdag(0.7, JcBathState::vacuum_state());
  const JcBathState back = model.apply_B(2.2, photon);
  REQUIRE(back.sector == JcBathState::Sector::Vacuum);
  CHECK(std::abs(back.vacuum - model.reservoir().correlation(1.5)) < 1e-12);
}

TEST_CASE("tabulated couplings equal the on-the-fly ones") {
  const auto res = jc::discretize(kSpec, 20.0, 400, 5.0);
  const JcModel plain(kSpec, res);
  JcModel table(kSpec, res);
  const std::vector<double> times{0.0, 0.25, 1.1, 4.9};
  table.tabulate(times);
  CHECK(table.tabulated_times() == times.size());

  JcBathState photon = plain.apply_Bdag(0.3, JcBathState::vacuum_state());
  for (double t : {0.0, 0.25, 1.1, 4.9, 2.0}) {
    const JcBathState a = plain.apply_Bdag(t, JcBathState::vacuum_state());
    const JcBathState b = table.apply_Bdag(t, JcBathState::vacuum_state());
    for (std::size_t k = 0; k < res.size(); ++k) {
      REQUIRE(a.re[k] == b.re[k]);
      REQUIRE(a.im[k] == b.im[k]);
    }
    CHECK(plain.apply_B(t, photon).vacuum == table.apply_B(t, photon).vacuum);
  }
}

TEST_CASE("JC trajectories agree across kernel variants") {
  const auto res = jc::discretize(kSpec, 20.0, 400, 5.0);
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.3 * i);
  const JcModel ref(kSpec, res, simd::scalar_kernels());
  for (const simd::Kernels* k : simd::available_kernels()) {
    CAPTURE(simd::to_string(k->isa));
    const JcModel model(kSpec, res, *k);
    for (std::uint64_t traj = 0; traj < 20; ++traj) {
      RandomStream a1(8, traj, StreamId::Branch1), a2(8, traj, StreamId::Branch2);
      RandomStream b1(8, traj, StreamId::Branch1), b2(8, traj, StreamId::Branch2);
      const auto ra = evolve_trajectory(ref, ref.initial_pair(), grid, EvolveOptions{}, a1, a2);
      const auto rb = evolve_trajectory(model, model.initial_pair(), grid, EvolveOptions{}, b1, b2);
      // Rounding differences only move the rates; with rate*dt = 0.01 a
      // decision flip needs a uniform within ~1e-15 of a boundary.
      REQUIRE(ra.jumps == rb.jumps);
      for (std::size_t g = 0; g < grid.size(); ++g)
        REQUIRE((ra.contributions[g] - rb.contributions[g]).cwiseAbs().maxCoeff() <
                1e-10 * std::max(1.0, ra.contributions[g].cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("JC ensemble matches the dense single-excitation oracle") {
  // Small reservoir so the dense oracle is cheap; same discrete model on both sides.
  const auto res = jc::discretize(kSpec, 20.0, 64, 3.0);
  const JcModel model(kSpec, res);
  std::vector<double> grid;
  for (int i = 0; i <= 6; ++i) grid.push_back(0.25 * i);

  EnsembleAccumulator acc(grid, 2);
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    RandomStream s1(31, k, StreamId::Branch1), s2(31, k, StreamId::Branch2);
    acc.accumulate(evolve_trajectory(model, model.initial_pair(), grid, EvolveOptions{}, s1, s2).contributions);
  }
  const DensityEstimate est = estimate(acc);

  const DenseModel dm = ref::dense_jc_model(res);
  Eigen::VectorXcd e = Eigen::VectorXcd::Unit(2, 0);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Unit(dm.bath_dim(), 0);
  const Eigen::VectorXcd phi = ref::product_state(e, vac);
  const std::vector<ref::PurePair> init{{phi, phi, 1.0}};
  const auto exact = ref::von_neumann_dense(dm, init, grid);

  int outside = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double diff = est.mean[g](0, 0).real() - exact[g](0, 0).real();
    CAPTURE(grid[g]);
    CAPTURE(diff);
    CAPTURE(est.se_re[g](0, 0));
    outside += std::abs(diff) > 4.0 * est.se_re[g](0, 0);
  }
  CHECK(outside == 0);
}
