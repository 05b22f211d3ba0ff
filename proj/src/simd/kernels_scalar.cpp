#include "pdpsim/simd/kernels.hpp"

namespace pdp::simd {
namespace {

Complex dotu_scalar(const double* ar, const double* ai, const double* br, const double* bi,
                    std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += ar[k] * br[k] - ai[k] * bi[k];
    im += ar[k] * bi[k] + ai[k] * br[k];
  }
  return {re, im};
}

Complex dotc_scalar(const double* ar, const double* ai, const double* br, const double* bi,
                    std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += ar[k] * br[k] + ai[k] * bi[k];
    im += ar[k] * bi[k] - ai[k] * br[k];
  }
  return {re, im};
}

double norm2_scalar(const double* ar, const double* ai, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += ar[k] * ar[k] + ai[k] * ai[k];
  return s;
}

void scale_conj_scalar(const double* hr, const double* hi, Complex s, double* outr, double* outi,
                       std::size_t n) {
  const double sr = s.real(), si = s.imag();
  for (std::size_t k = 0; k < n; ++k) {
    // (hr - i hi)(sr + i si)
    outr[k] = hr[k] * sr + hi[k] * si;
    outi[k] = hr[k] * si - hi[k] * sr;
  }
}

void scale_scalar(double* xr, double* xi, Complex s, std::size_t n) {
  const double sr = s.real(), si = s.imag();
  for (std::size_t k = 0; k < n; ++k) {
    const double r = xr[k] * sr - xi[k] * si;
    const double i = xr[k] * si + xi[k] * sr;
    xr[k] = r;
    xi[k] = i;
  }
}

constexpr Kernels kScalar{Isa::Scalar, dotu_scalar, dotc_scalar, norm2_scalar, scale_conj_scalar,
                          scale_scalar};

}  // namespace

const Kernels& scalar_kernels() noexcept { return kScalar; }

}  // namespace pdp::simd
