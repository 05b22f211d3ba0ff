#include <immintrin.h>

#include "pdpsim/simd/kernels.hpp"

namespace pdp::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

Complex dotu_avx2(const double* ar, const double* ai, const double* br, const double* bi,
                  std::size_t n) {
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  __m256d re_neg = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xr = _mm256_loadu_pd(ar + k);
    const __m256d xi = _mm256_loadu_pd(ai + k);
    const __m256d yr = _mm256_loadu_pd(br + k);
    const __m256d yi = _mm256_loadu_pd(bi + k);
    re = _mm256_fmadd_pd(xr, yr, re);
    re_neg = _mm256_fmadd_pd(xi, yi, re_neg);
    im = _mm256_fmadd_pd(xr, yi, im);
    im = _mm256_fmadd_pd(xi, yr, im);
  }
  double sr = hsum(re) - hsum(re_neg);
  double si = hsum(im);
  for (; k < n; ++k) {
    sr += ar[k] * br[k] - ai[k] * bi[k];
    si += ar[k] * bi[k] + ai[k] * br[k];
  }
  return {sr, si};
}

Complex dotc_avx2(const double* ar, const double* ai, const double* br, const double* bi,
                  std::size_t n) {
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  __m256d im_neg = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xr = _mm256_loadu_pd(ar + k);
    const __m256d xi = _mm256_loadu_pd(ai + k);
    const __m256d yr = _mm256_loadu_pd(br + k);
    const __m256d yi = _mm256_loadu_pd(bi + k);
    re = _mm256_fmadd_pd(xr, yr, re);
    re = _mm256_fmadd_pd(xi, yi, re);
    im = _mm256_fmadd_pd(xr, yi, im);
    im_neg = _mm256_fmadd_pd(xi, yr, im_neg);
  }
  double sr = hsum(re);
  double si = hsum(im) - hsum(im_neg);
  for (; k < n; ++k) {
    sr += ar[k] * br[k] + ai[k] * bi[k];
    si += ar[k] * bi[k] - ai[k] * br[k];
  }
  return {sr, si};
}

double norm2_avx2(const double* ar, const double* ai, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xr = _mm256_loadu_pd(ar + k);
    const __m256d xi = _mm256_loadu_pd(ai + k);
    acc0 = _mm256_fmadd_pd(xr, xr, acc0);
    acc1 = _mm256_fmadd_pd(xi, xi, acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += ar[k] * ar[k] + ai[k] * ai[k];
  return s;
}

void scale_conj_avx2(const double* hr, const double* hi, Complex s, double* outr, double* outi,
                     std::size_t n) {
  const __m256d sr = _mm256_set1_pd(s.real());
  const __m256d si = _mm256_set1_pd(s.imag());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xr = _mm256_loadu_pd(hr + k);
    const __m256d xi = _mm256_loadu_pd(hi + k);
    _mm256_storeu_pd(outr + k, _mm256_fmadd_pd(xr, sr, _mm256_mul_pd(xi, si)));
    _mm256_storeu_pd(outi + k, _mm256_fmsub_pd(xr, si, _mm256_mul_pd(xi, sr)));
  }
  for (; k < n; ++k) {
    outr[k] = hr[k] * s.real() + hi[k] * s.imag();
    outi[k] = hr[k] * s.imag() - hi[k] * s.real();
  }
}

void scale_avx2(double* xr, double* xi, Complex s, std::size_t n) {
  const __m256d sr = _mm256_set1_pd(s.real());
  const __m256d si = _mm256_set1_pd(s.imag());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d r = _mm256_loadu_pd(xr + k);
    const __m256d i = _mm256_loadu_pd(xi + k);
    _mm256_storeu_pd(xr + k, _mm256_fmsub_pd(r, sr, _mm256_mul_pd(i, si)));
    _mm256_storeu_pd(xi + k, _mm256_fmadd_pd(r, si, _mm256_mul_pd(i, sr)));
  }
  for (; k < n; ++k) {
    const double r = xr[k] * s.real() - xi[k] * s.imag();
    const double i = xr[k] * s.imag() + xi[k] * s.real();
    xr[k] = r;
    xi[k] = i;
  }
}

constexpr Kernels kAvx2{Isa::Avx2, dotu_avx2, dotc_avx2, norm2_avx2, scale_conj_avx2, scale_avx2};

}  // namespace

const Kernels* avx2_kernels() noexcept { return &kAvx2; }

}  // namespace pdp::simd
