#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace pdp {

using Complex = std::complex<double>;
inline constexpr Complex kImag{0.0, 1.0};

enum class ErrorKind {
  InvalidState,
  ZeroNorm,
  Configuration,
  SectorViolation,
  BoundViolation,
  Domain,
  GridMismatch,
  Overflow,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace pdp
