#include "pdpsim/ensemble.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pdp {

EnsembleAccumulator::EnsembleAccumulator(std::vector<double> grid, int dim)
    : grid_(std::move(grid)), dim_(dim) {
  if (dim_ < 1) fail(ErrorKind::Configuration, "matrix dimension must be positive");
  if (grid_.empty()) fail(ErrorKind::Configuration, "accumulator needs a non-empty grid");
  sums_.resize(grid_.size() * slots() * 4);
}

void EnsembleAccumulator::add_value(std::size_t g, std::size_t slot, Complex v) noexcept {
  CompensatedSum* s = &sums_[index(g, slot, 0)];
  s[0].add(v.real());
  s[1].add(v.imag());
  s[2].add(v.real() * v.real());
  s[3].add(v.imag() * v.imag());
}

const CompensatedSum& EnsembleAccumulator::raw(std::size_t g, std::size_t slot,
                                               std::size_t part) const {
  if (g >= grid_.size() || slot >= slots() || part >= 4)
    fail(ErrorKind::Configuration, "accumulator index out of range");
  return sums_[index(g, slot, part)];
}

EnsembleAccumulator merge(const EnsembleAccumulator& a, const EnsembleAccumulator& b) {
  if (b.empty() && b.count_ == 0 && b.aborted_ == 0) return a;
  if (a.empty() && a.count_ == 0 && a.aborted_ == 0) return b;
  if (a.dim_ != b.dim_ || a.grid_ != b.grid_)
    fail(ErrorKind::GridMismatch, "cannot merge accumulators on different grids");
  EnsembleAccumulator out = a;
  for (std::size_t i = 0; i < out.sums_.size(); ++i) out.sums_[i].merge(b.sums_[i]);
  out.count_ += b.count_;
  out.aborted_ += b.aborted_;
  return out;
}

EnsembleAccumulator merge_ordered(std::vector<EnsembleAccumulator> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<EnsembleAccumulator> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(merge(parts[i], parts[i + 1]));
    if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
    parts = std::move(next);
  }
  return std::move(parts.front());
}

namespace {

struct Moments {
  double mean;
  double variance;
  double se;
};

Moments moments(const CompensatedSum& s1, const CompensatedSum& s2, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  const double mean = s1.value() / nn;
  if (n < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {mean, nan, nan};
  }
  double var = (s2.value() - s1.value() * mean) / (nn - 1.0);
  if (!(var > 0.0)) var = 0.0;
  return {mean, var, std::sqrt(var / nn)};
}

}  // namespace

DensityEstimate estimate(const EnsembleAccumulator& acc) {
  if (acc.count() == 0) fail(ErrorKind::Domain, "no trajectories to estimate from");
  const int d = acc.dim();
  const auto du = static_cast<std::size_t>(d);
  const std::size_t ng = acc.grid().size();
  const std::uint64_t n = acc.count();

  DensityEstimate e;
  e.t = acc.grid();
  e.dim = d;
  e.n = n;
  e.aborted = acc.aborted();
  e.mean.assign(ng, Eigen::MatrixXcd::Zero(d, d));
  e.se_re.assign(ng, Eigen::MatrixXd::Zero(d, d));
  e.se_im.assign(ng, Eigen::MatrixXd::Zero(d, d));
  e.hermiticity_defect.assign(ng, Eigen::MatrixXcd::Zero(d, d));
  e.hermiticity_se_re.assign(ng, Eigen::MatrixXd::Zero(d, d));
  e.hermiticity_se_im.assign(ng, Eigen::MatrixXd::Zero(d, d));
  e.trace.resize(ng);
  e.trace_se_re.resize(ng);
  e.trace_se_im.resize(ng);
  e.total_variance.assign(ng, 0.0);

  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t i = 0; i < du; ++i) {
      for (std::size_t j = 0; j < du; ++j) {
        const auto r = static_cast<Eigen::Index>(i);
        const auto c = static_cast<Eigen::Index>(j);
        const std::size_t s = i * du + j;
        const Moments re = moments(acc.raw(g, s, 0), acc.raw(g, s, 2), n);
        const Moments im = moments(acc.raw(g, s, 1), acc.raw(g, s, 3), n);
        e.mean[g](r, c) = {re.mean, im.mean};
        e.se_re[g](r, c) = re.se;
        e.se_im[g](r, c) = im.se;
        e.total_variance[g] += re.variance + im.variance;

        const std::size_t h = du * du + 1 + s;
        const Moments hre = moments(acc.raw(g, h, 0), acc.raw(g, h, 2), n);
        const Moments him = moments(acc.raw(g, h, 1), acc.raw(g, h, 3), n);
        e.hermiticity_defect[g](r, c) = {hre.mean, him.mean};
        e.hermiticity_se_re[g](r, c) = hre.se;
        e.hermiticity_se_im[g](r, c) = him.se;
      }
    }
    const Moments tre = moments(acc.raw(g, du * du, 0), acc.raw(g, du * du, 2), n);
    const Moments tim = moments(acc.raw(g, du * du, 1), acc.raw(g, du * du, 3), n);
    e.trace[g] = {tre.mean, tim.mean};
    e.trace_se_re[g] = tre.se;
    e.trace_se_im[g] = tim.se;
  }
  return e;
}

GrowthFit variance_growth(const DensityEstimate& est, double t_lo, double t_hi) {
  std::vector<double> xs;
  std::vector<double> ys;
  bool any_positive = false;
  for (std::size_t g = 0; g < est.t.size(); ++g) {
    const double v = est.total_variance[g];
    if (v > 0.0) any_positive = true;
    if (est.t[g] < t_lo || est.t[g] > t_hi) continue;
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    xs.push_back(est.t[g]);
    ys.push_back(std::log(v));
  }
  GrowthFit fit;
  if (!any_positive) return fit;
  if (xs.size() < 5)
    fail(ErrorKind::Domain, "variance growth fit needs at least 5 points with positive variance, got " +
                                std::to_string(xs.size()));
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorKind::Domain, "degenerate variance growth fit");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    sse += r * r;
  }
  fit.log_variance_slope = slope;
  fit.sd_rate = 0.5 * slope;
  fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  fit.points = xs.size();
  return fit;
}

GrowthFit variance_growth(const DensityEstimate& est) {
  if (est.t.empty()) fail(ErrorKind::Domain, "empty estimate");
  const double mid = 0.5 * (est.t.front() + est.t.back());
  return variance_growth(est, mid, est.t.back());
}

}  // namespace pdp
