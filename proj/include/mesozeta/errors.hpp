#pragma once

#include <stdexcept>
#include <string>

namespace mesozeta {

// Exit-code class used by the CLI: 1 for domain/config problems, 2 for
// missing resources and I/O.
enum class ErrorClass { domain = 1, resource = 2 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

#define MESOZETA_ERROR(Name, Cls)                                             \
  class Name : public Error {                                                 \
   public:                                                                    \
    explicit Name(const std::string& what) : Error(ErrorClass::Cls, what) {}  \
  };

MESOZETA_ERROR(DomainError, domain)
MESOZETA_ERROR(ParameterError, domain)
MESOZETA_ERROR(PoleError, domain)
MESOZETA_ERROR(AccuracyError, domain)
MESOZETA_ERROR(CertificationError, domain)
MESOZETA_ERROR(ConfigError, domain)
MESOZETA_ERROR(ParseError, domain)
MESOZETA_ERROR(CoverageError, resource)
MESOZETA_ERROR(ResourceError, resource)
MESOZETA_ERROR(IoError, resource)

#undef MESOZETA_ERROR

// Raised by zeta_logderiv when |zeta(s)| is too small to divide by.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double zeta_abs)
      : Error(ErrorClass::domain, what), zeta_abs_(zeta_abs) {}
  double zeta_abs() const noexcept { return zeta_abs_; }

 private:
  double zeta_abs_;
};

}  // namespace mesozeta
