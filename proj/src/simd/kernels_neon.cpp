#include <arm_neon.h>

#include "pdpsim/simd/kernels.hpp"

namespace pdp::simd {
namespace {

Complex dotu_neon(const double* ar, const double* ai, const double* br, const double* bi,
                  std::size_t n) {
  float64x2_t re = vdupq_n_f64(0.0);
  float64x2_t re_neg = vdupq_n_f64(0.0);
  float64x2_t im = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t xr = vld1q_f64(ar + k);
    const float64x2_t xi = vld1q_f64(ai + k);
    const float64x2_t yr = vld1q_f64(br + k);
    const float64x2_t yi = vld1q_f64(bi + k);
    re = vfmaq_f64(re, xr, yr);
    re_neg = vfmaq_f64(re_neg, xi, yi);
    im = vfmaq_f64(im, xr, yi);
    im = vfmaq_f64(im, xi, yr);
  }
  double sr = vaddvq_f64(re) - vaddvq_f64(re_neg);
  double si = vaddvq_f64(im);
  for (; k < n; ++k) {
    sr += ar[k] * br[k] - ai[k] * bi[k];
    si += ar[k] * bi[k] + ai[k] * br[k];
  }
  return {sr, si};
}

Complex dotc_neon(const double* ar, const double* ai, const double* br, const double* bi,
                  std::size_t n) {
  float64x2_t re = vdupq_n_f64(0.0);
  float64x2_t im = vdupq_n_f64(0.0);
  float64x2_t im_neg = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t xr = vld1q_f64(ar + k);
    const float64x2_t xi = vld1q_f64(ai + k);
    const float64x2_t yr = vld1q_f64(br + k);
    const float64x2_t yi = vld1q_f64(bi + k);
    re = vfmaq_f64(re, xr, yr);
    re = vfmaq_f64(re, xi, yi);
    im = vfmaq_f64(im, xr, yi);
    im_neg = vfmaq_f64(im_neg, xi, yr);
  }
  double sr = vaddvq_f64(re);
  double si = vaddvq_f64(im) - vaddvq_f64(im_neg);
  for (; k < n; ++k) {
    sr += ar[k] * br[k] + ai[k] * bi[k];
    si += ar[k] * bi[k] - ai[k] * br[k];
  }
  return {sr, si};
}

double norm2_neon(const double* ar, const double* ai, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t xr = vld1q_f64(ar + k);
    const float64x2_t xi = vld1q_f64(ai + k);
    acc = vfmaq_f64(acc, xr, xr);
    acc = vfmaq_f64(acc, xi, xi);
  }
  double s = vaddvq_f64(acc);
  for (; k < n; ++k) s += ar[k] * ar[k] + ai[k] * ai[k];
  return s;
}

void scale_conj_neon(const double* hr, const double* hi, Complex s, double* outr, double* outi,
                     std::size_t n) {
  const float64x2_t sr = vdupq_n_f64(s.real());
  const float64x2_t si = vdupq_n_f64(s.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t xr = vld1q_f64(hr + k);
    const float64x2_t xi = vld1q_f64(hi + k);
    vst1q_f64(outr + k, vfmaq_f64(vmulq_f64(xi, si), xr, sr));
    vst1q_f64(outi + k, vfmsq_f64(vmulq_f64(xr, si), xi, sr));
  }
  for (; k < n; ++k) {
    outr[k] = hr[k] * s.real() + hi[k] * s.imag();
    outi[k] = hr[k] * s.imag() - hi[k] * s.real();
  }
}

void scale_neon(double* xr, double* xi, Complex s, std::size_t n) {
  const float64x2_t sr = vdupq_n_f64(s.real());
  const float64x2_t si = vdupq_n_f64(s.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t r = vld1q_f64(xr + k);
    const float64x2_t i = vld1q_f64(xi + k);
    vst1q_f64(xr + k, vfmsq_f64(vmulq_f64(r, sr), i, si));
    vst1q_f64(xi + k, vfmaq_f64(vmulq_f64(i, sr), r, si));
  }
  for (; k < n; ++k) {
    const double r = xr[k] * s.real() - xi[k] * s.imag();
    const double i = xr[k] * s.imag() + xi[k] * s.real();
    xr[k] = r;
    xi[k] = i;
  }
}

constexpr Kernels kNeon{Isa::Neon, dotu_neon, dotc_neon, norm2_neon, scale_conj_neon, scale_neon};

}  // namespace

const Kernels* neon_kernels() noexcept { return &kNeon; }

}  // namespace pdp::simd
