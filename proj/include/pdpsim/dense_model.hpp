#pragma once

// Explicit-matrix description of an interaction Hamiltonian
//   H_I(t) = sum_alpha A_alpha(t) (x) B_alpha(t),
// where the time dependence comes from diagonal free Hamiltonians:
//   X(t)_{ab} = X_{ab} exp(i (E_a - E_b) t).
// Used by the dense reference integrator and, through DenseProductModel, as a
// small engine model for exact cross-checks.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "pdpsim/engine.hpp"
#include "pdpsim/error.hpp"

namespace pdp {

struct DenseChannel {
  Eigen::MatrixXcd system_op;
  Eigen::MatrixXcd bath_op;
};

struct DenseModel {
  Eigen::VectorXd system_energies;
  Eigen::VectorXd bath_energies;
  std::vector<DenseChannel> channels;

  int system_dim() const { return static_cast<int>(system_energies.size()); }
  int bath_dim() const { return static_cast<int>(bath_energies.size()); }

  /// Throws if operator shapes disagree with the energy vectors.
  void validate() const;

  Eigen::MatrixXcd system_op(std::size_t alpha, double t) const;
  Eigen::MatrixXcd bath_op(std::size_t alpha, double t) const;

  /// Full interaction-picture Hamiltonian on the product space, system index major.
  Eigen::MatrixXcd hamiltonian(double t) const;
};

namespace detail {

inline Eigen::MatrixXcd rotate(const Eigen::MatrixXcd& op, const Eigen::VectorXd& energies,
                               double t) {
  Eigen::MatrixXcd out = op;
  for (Eigen::Index c = 0; c < op.cols(); ++c)
    for (Eigen::Index r = 0; r < op.rows(); ++r)
      if (op(r, c) != Complex{}) out(r, c) *= std::polar(1.0, (energies(r) - energies(c)) * t);
  return out;
}

}  // namespace detail

inline void DenseModel::validate() const {
  const auto ds = system_energies.size();
  const auto db = bath_energies.size();
  if (ds == 0 || db == 0) fail(ErrorKind::Configuration, "dense model has an empty factor");
  for (const auto& ch : channels) {
    if (ch.system_op.rows() != ds || ch.system_op.cols() != ds || ch.bath_op.rows() != db ||
        ch.bath_op.cols() != db)
      fail(ErrorKind::Configuration, "dense model channel has mismatched operator shape");
  }
}

inline Eigen::MatrixXcd DenseModel::system_op(std::size_t alpha, double t) const {
  return detail::rotate(channels.at(alpha).system_op, system_energies, t);
}

inline Eigen::MatrixXcd DenseModel::bath_op(std::size_t alpha, double t) const {
  return detail::rotate(channels.at(alpha).bath_op, bath_energies, t);
}

inline Eigen::MatrixXcd DenseModel::hamiltonian(double t) const {
  const int ds = system_dim();
  const int db = bath_dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(ds * db, ds * db);
  for (std::size_t a = 0; a < channels.size(); ++a) {
    const Eigen::MatrixXcd sa = system_op(a, t);
    const Eigen::MatrixXcd ba = bath_op(a, t);
    for (int i = 0; i < ds; ++i)
      for (int j = 0; j < ds; ++j)
        if (sa(i, j) != Complex{}) h.block(i * db, j * db, db, db) += sa(i, j) * ba;
  }
  return h;
}

/// Engine adapter for a DenseModel whose system dimension is the compile-time D.
template <int D>
class DenseProductModel {
 public:
  static constexpr int kSystemDim = D;
  using SystemVector = Eigen::Matrix<Complex, D, 1>;
  using BathState = Eigen::VectorXcd;

  explicit DenseProductModel(DenseModel model) : model_(std::move(model)) {
    model_.validate();
    if (model_.system_dim() != D)
      fail(ErrorKind::Configuration, "system dimension does not match the engine model");
    if (model_.channels.size() > kMaxChannels)
      fail(ErrorKind::Configuration, "too many jump channels");
    bound_ = 0.0;
    for (const auto& ch : model_.channels) bound_ += ch.system_op.norm() * ch.bath_op.norm();
  }

  const DenseModel& dense() const noexcept { return model_; }

  std::size_t channel_count() const noexcept { return model_.channels.size(); }

  SystemVector apply_A(std::size_t alpha, double t, const SystemVector& psi) const {
    return SystemVector(model_.system_op(alpha, t) * psi);
  }

  BathState apply_B(std::size_t alpha, double t, const BathState& chi) const {
    return model_.bath_op(alpha, t) * chi;
  }

  double bath_action_norm(std::size_t alpha, double t, const BathState& chi) const {
    return apply_B(alpha, t, chi).norm();
  }

  double bath_norm(const BathState& chi) const { return chi.norm(); }
  Complex bath_overlap(const BathState& bra, const BathState& ket) const { return bra.dot(ket); }
  void scale_bath(BathState& chi, Complex s) const { chi *= s; }

  // Frobenius norms bound the operator norms, so this bounds every rate.
  double rate_bound(const BathState&) const noexcept { return bound_; }

 private:
  DenseModel model_;
  double bound_ = 0.0;
};

}  // namespace pdp
