#include "pdpsim/error.hpp"

namespace pdp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidState: return "invalid state";
    case ErrorKind::ZeroNorm: return "zero norm";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::SectorViolation: return "sector violation";
    case ErrorKind::BoundViolation: return "rate bound violation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pdp
