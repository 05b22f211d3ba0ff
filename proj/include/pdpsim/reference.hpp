#pragma once

// Deterministic oracles: dense Schroedinger/von Neumann integration, the
// closed-form damped JC amplitude, Born-Markov and TCL2 JC populations, and
// the block-sum solution of the central spin model.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "pdpsim/dense_model.hpp"
#include "pdpsim/error.hpp"
#include "pdpsim/jc_model.hpp"
#include "pdpsim/spin_bath.hpp"

namespace pdp::ref {

struct RkOptions {
  double dt = 0.005;             // upper bound on the RK4 step
  double norm_tolerance = 1e-6;  // allowed drift of |Phi|
  std::size_t dim_cap = 4096;
};

/// One weighted term w |Phi_1><Phi_2| of the initial total operator.
struct PurePair {
  Eigen::VectorXcd phi1;
  Eigen::VectorXcd phi2;
  double weight = 1.0;
};

/// Integrates i d|Phi>/dt = H_I(t)|Phi> with fixed-step RK4 for both vectors
/// of every pair and returns sum_w w tr_B |Phi_1><Phi_2| at each grid point.
std::vector<Eigen::MatrixXcd> von_neumann_dense(const DenseModel& model,
                                                std::span<const PurePair> initial,
                                                std::span<const double> grid,
                                                const RkOptions& opt = {});

/// Product state |s> (x) |b> in the system-major layout used by DenseModel.
Eigen::VectorXcd product_state(const Eigen::VectorXcd& system, const Eigen::VectorXcd& bath);

/// JC model on {|0>, |1_k>}: bath energies E_0 = 0, E_1k = -delta_k.
DenseModel dense_jc_model(const jc::DiscretizedReservoir& reservoir);

/// Central spin with the full 2^N bath built from explicit Pauli sums.
DenseModel dense_spin_model(const spin::SpinBathParams& params);

/// All pure pairs of rho(0) = |s1><s2| (x) 2^-N I over the computational bath basis.
std::vector<PurePair> spin_mixed_initial(int n_spins, spin::InitialCondition ic);

struct AmplitudeSolution {
  std::vector<double> t;
  std::vector<Complex> amplitude;  // G(t)
  std::vector<double> population() const;
};

/// Excited amplitude for the Lorentzian kernel (gamma0 lambda / 2) e^{-lambda |tau|}:
/// G'' + lambda G' + (gamma0 lambda / 2) G = 0, G(0) = 1, G'(0) = 0.
AmplitudeSolution jc_exact(const jc::LorentzianSpectrum& spec, std::span<const double> grid);

std::vector<double> born_markov_p(double gamma0, std::span<const double> grid);

/// exp(-int_0^t gamma0 (1 - e^{-lambda s}) ds).
std::vector<double> tcl2_jc_p(const jc::LorentzianSpectrum& spec, std::span<const double> grid);

struct SpinBlockResult {
  std::vector<double> t;
  std::vector<Complex> rho_pm;  // <+| rho_S(t) |->
  double discarded_weight = 0.0;
  std::size_t labels_used = 0;
};

/// rho_{+-}(t) for rho(0) = |+><-| (x) 2^-N I as a sum over (j, m) labels in
/// decreasing P(j, m) order until the kept weight reaches 1 - eps_cut. Each
/// label couples only |+, m> <-> |-, m+1> and |-, m> <-> |+, m-1>, which are
/// integrated with RK4 (step <= dt).
SpinBlockResult spin_block_exact(const spin::SpinBathParams& params, std::span<const double> grid,
                                 double eps_cut, double dt = 0.005, std::size_t dim_cap = 4096);

}  // namespace pdp::ref
