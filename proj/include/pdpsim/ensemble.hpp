#pragma once

// Mergeable accumulation of per-trajectory contribution matrices into the
// mean reduced density matrix with per-entry standard errors.
//
// For every grid point the accumulator tracks d*d entries, the trace, and the
// d*d entries of D - D^dag; each slot keeps compensated sums of the real and
// imaginary parts and of their squares.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pdpsim/error.hpp"

namespace pdp {

/// Neumaier summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) noexcept {
    const double s = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - s) + x : (x - s) + sum;
    sum = s;
  }
  void merge(const CompensatedSum& o) noexcept {
    add(o.sum);
    comp += o.comp;
  }
  double value() const noexcept { return sum + comp; }
};

class EnsembleAccumulator {
 public:
  EnsembleAccumulator() = default;
  EnsembleAccumulator(std::vector<double> grid, int dim);

  const std::vector<double>& grid() const noexcept { return grid_; }
  int dim() const noexcept { return dim_; }
  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t aborted() const noexcept { return aborted_; }
  bool empty() const noexcept { return grid_.empty(); }

  /// Adds one trajectory; `contributions` holds one matrix per grid point.
  template <class Mat>
  void accumulate(const std::vector<Mat>& contributions);

  void record_abort() noexcept { ++aborted_; }

  /// Sums of one slot at one grid point (for tests and diagnostics).
  const CompensatedSum& raw(std::size_t g, std::size_t slot, std::size_t part) const;

  /// Field-wise sum. An empty (default-constructed) side acts as identity.
  friend EnsembleAccumulator merge(const EnsembleAccumulator& a, const EnsembleAccumulator& b);

  std::size_t slots() const noexcept { return 2 * static_cast<std::size_t>(dim_ * dim_) + 1; }

 private:
  void add_value(std::size_t g, std::size_t slot, Complex v) noexcept;
  std::size_t index(std::size_t g, std::size_t slot, std::size_t part) const noexcept {
    return (g * slots() + slot) * 4 + part;
  }

  std::vector<double> grid_;
  int dim_ = 0;
  std::uint64_t count_ = 0;
  std::uint64_t aborted_ = 0;
  std::vector<CompensatedSum> sums_;  // re, im, re^2, im^2 per slot
};

/// Pairwise tree reduction in index order: ((a0 a1) (a2 a3)) ...
EnsembleAccumulator merge_ordered(std::vector<EnsembleAccumulator> parts);

struct DensityEstimate {
  std::vector<double> t;
  int dim = 0;
  std::uint64_t n = 0;
  std::uint64_t aborted = 0;

  std::vector<Eigen::MatrixXcd> mean;
  std::vector<Eigen::MatrixXd> se_re;
  std::vector<Eigen::MatrixXd> se_im;

  std::vector<Complex> trace;
  std::vector<double> trace_se_re;
  std::vector<double> trace_se_im;

  std::vector<Eigen::MatrixXcd> hermiticity_defect;  // mean of D - D^dag
  std::vector<Eigen::MatrixXd> hermiticity_se_re;
  std::vector<Eigen::MatrixXd> hermiticity_se_im;

  /// Sum over entries of the sample variances of the real and imaginary parts.
  std::vector<double> total_variance;
};

/// Means and standard errors (sample SD / sqrt n). With n = 1 the standard
/// errors are NaN; n = 0 is an error.
DensityEstimate estimate(const EnsembleAccumulator& acc);

struct GrowthFit {
  double log_variance_slope = 0.0;  // d ln(total variance) / dt
  double sd_rate = 0.0;             // growth rate of the SD, half the slope
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of ln(total variance) on grid points with t in
/// [t_lo, t_hi] and positive variance. All-zero variance gives rate 0; fewer
/// than 5 usable points otherwise is an error.
GrowthFit variance_growth(const DensityEstimate& est, double t_lo, double t_hi);
/// Same over the latter half of the grid.
GrowthFit variance_growth(const DensityEstimate& est);

template <class Mat>
void EnsembleAccumulator::accumulate(const std::vector<Mat>& contributions) {
  if (contributions.size() != grid_.size())
    fail(ErrorKind::GridMismatch, "contribution count " + std::to_string(contributions.size()) +
                                      " does not match grid size " + std::to_string(grid_.size()));
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    const Mat& m = contributions[g];
    if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d)
      fail(ErrorKind::GridMismatch, "contribution matrix has the wrong dimension");
    Complex tr{};
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const Complex v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        add_value(g, i * d + j, v);
        add_value(g, d * d + 1 + i * d + j,
                  v - std::conj(m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i))));
      }
      tr += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    }
    add_value(g, d * d, tr);
  }
  ++count_;
}

}  // namespace pdp
