#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rankcert {

// Base of all domain errors. `code()` is the stable machine-readable name
// reported by the CLI; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define RANKCERT_ERROR(Name)                                          \
  class Name : public Error {                                         \
  public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  }

RANKCERT_ERROR(IoError);
RANKCERT_ERROR(BadFormat);
RANKCERT_ERROR(DimensionMismatch);
RANKCERT_ERROR(NotExact);
RANKCERT_ERROR(ZeroLine);
RANKCERT_ERROR(TooLarge);
RANKCERT_ERROR(InvalidParams);
RANKCERT_ERROR(InsufficientSupport);
RANKCERT_ERROR(GroupConstructionFailed);
RANKCERT_ERROR(NotHermitian);
RANKCERT_ERROR(DiagonalTooSmall);
RANKCERT_ERROR(NonUniformRows);
RANKCERT_ERROR(DegenerateInput);
RANKCERT_ERROR(NoSpecialLines);
RANKCERT_ERROR(InvalidAlpha);
RANKCERT_ERROR(NotPrime);
RANKCERT_ERROR(NotDivisible);
RANKCERT_ERROR(GeneralPositionFailed);
RANKCERT_ERROR(NonConvergence);

#undef RANKCERT_ERROR

}  // namespace rankcert
