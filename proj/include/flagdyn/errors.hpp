#pragma once

#include <stdexcept>
#include <string>

namespace flagdyn {

enum class Err {
  SingularInput,
  DegenerateJoin,
  DegenerateMeet,
  IncidenceViolation,
  NotRealDiagonalizable,
  NonConvergent,
  DomainViolation,
  AmbiguousLocus,
  NotLoxodromic,
  NotHyperbolic,
  NegativeEigenvalues,
  NotGeneralPosition,
  WordTooLong,
  InvalidWord,
  NearLimitSet,
  NoCertificateFound,
  NotInDomain,
  OnFixedSet,
  OutOfChartDomain,
  BadConfig,
};

inline const char* err_name(Err e) {
  switch (e) {
    case Err::SingularInput: return "SingularInput";
    case Err::DegenerateJoin: return "DegenerateJoin";
    case Err::DegenerateMeet: return "DegenerateMeet";
    case Err::IncidenceViolation: return "IncidenceViolation";
    case Err::NotRealDiagonalizable: return "NotRealDiagonalizable";
    case Err::NonConvergent: return "NonConvergent";
    case Err::DomainViolation: return "DomainViolation";
    case Err::AmbiguousLocus: return "AmbiguousLocus";
    case Err::NotLoxodromic: return "NotLoxodromic";
    case Err::NotHyperbolic: return "NotHyperbolic";
    case Err::NegativeEigenvalues: return "NegativeEigenvalues";
    case Err::NotGeneralPosition: return "NotGeneralPosition";
    case Err::WordTooLong: return "WordTooLong";
    case Err::InvalidWord: return "InvalidWord";
    case Err::NearLimitSet: return "NearLimitSet";
    case Err::NoCertificateFound: return "NoCertificateFound";
    case Err::NotInDomain: return "NotInDomain";
    case Err::OnFixedSet: return "OnFixedSet";
    case Err::OutOfChartDomain: return "OutOfChartDomain";
    case Err::BadConfig: return "BadConfig";
  }
  return "Unknown";
}

// Library failures are thrown; the C layer turns them into status codes.
class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

}  // namespace flagdyn
