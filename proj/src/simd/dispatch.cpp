#include <cstdlib>
#include <string_view>

#include "pdpsim/simd/kernels.hpp"

namespace pdp::simd {

#ifndef PDPSIM_HAVE_AVX2
const Kernels* avx2_kernels() noexcept { return nullptr; }
#endif
#ifndef PDPSIM_HAVE_NEON
const Kernels* neon_kernels() noexcept { return nullptr; }
#endif

const char* to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(PDPSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(PDPSIM_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

std::vector<const Kernels*> available_kernels() {
  std::vector<const Kernels*> out{&scalar_kernels()};
  if (const Kernels* k = avx2_kernels(); k && cpu_supports(Isa::Avx2)) out.push_back(k);
  if (const Kernels* k = neon_kernels(); k && cpu_supports(Isa::Neon)) out.push_back(k);
  return out;
}

namespace {

const Kernels& select() {
  const auto all = available_kernels();
  if (const char* env = std::getenv("PDPSIM_ISA")) {
    const std::string_view want{env};
    for (const Kernels* k : all)
      if (want == to_string(k->isa)) return *k;
    return scalar_kernels();
  }
  return *all.back();
}

}  // namespace

const Kernels& active_kernels() {
  static const Kernels& chosen = select();
  return chosen;
}

}  // namespace pdp::simd
