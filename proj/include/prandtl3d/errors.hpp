#pragma once

#include <stdexcept>
#include <string>

namespace prandtl3d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PRANDTL3D_ERROR(Name)                      \
  class Name : public Error {                      \
   public:                                         \
    explicit Name(const std::string& what)         \
        : Error(std::string(#Name ": ") + what) {} \
  }

PRANDTL3D_ERROR(NonConvergence);
PRANDTL3D_ERROR(DomainError);
PRANDTL3D_ERROR(NonPositiveField);
PRANDTL3D_ERROR(DegenerateU);
PRANDTL3D_ERROR(CrossingDetected);
PRANDTL3D_ERROR(EnvelopeViolation);
PRANDTL3D_ERROR(InnerDivergence);
PRANDTL3D_ERROR(AdmissibilityLost);
PRANDTL3D_ERROR(PicardStall);
PRANDTL3D_ERROR(GridMismatch);
PRANDTL3D_ERROR(VersionMismatch);
PRANDTL3D_ERROR(UnknownQuantity);

#undef PRANDTL3D_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("ParseError: " + (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace prandtl3d
