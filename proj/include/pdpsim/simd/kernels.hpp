#pragma once

// Split-complex (separate real/imaginary arrays) vector kernels used by the
// mode-resolved bath representations. Every instruction-set variant has the
// same contract as the scalar reference; results agree up to reduction order.

#include <cstddef>
#include <vector>

#include "pdpsim/error.hpp"

namespace pdp::simd {

enum class Isa { Scalar, Avx2, Neon };

const char* to_string(Isa isa) noexcept;

struct Kernels {
  Isa isa;

  /// sum_k a_k * b_k (no conjugation).
  Complex (*dotu)(const double* ar, const double* ai, const double* br, const double* bi,
                  std::size_t n);
  /// sum_k conj(a_k) * b_k.
  Complex (*dotc)(const double* ar, const double* ai, const double* br, const double* bi,
                  std::size_t n);
  /// sum_k |a_k|^2.
  double (*norm2)(const double* ar, const double* ai, std::size_t n);
  /// out_k = conj(h_k) * s.
  void (*scale_conj)(const double* hr, const double* hi, Complex s, double* outr, double* outi,
                     std::size_t n);
  /// x_k *= s.
  void (*scale)(double* xr, double* xi, Complex s, std::size_t n);
};

const Kernels& scalar_kernels() noexcept;

// nullptr when the variant was not compiled into this build.
const Kernels* avx2_kernels() noexcept;
const Kernels* neon_kernels() noexcept;

bool cpu_supports(Isa isa) noexcept;

/// Variants that are both compiled in and runnable on this CPU, scalar first.
std::vector<const Kernels*> available_kernels();

/// Best available variant. PDPSIM_ISA=scalar|avx2|neon in the environment
/// overrides the choice (an unsupported request falls back to scalar).
const Kernels& active_kernels();

}  // namespace pdp::simd
