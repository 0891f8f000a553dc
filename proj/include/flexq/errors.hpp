#ifndef FLEXQ_ERRORS_HPP
#define FLEXQ_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace flexq {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible range. `field()` names the
/// offending input ("rho", "k", "gamma", ...).
class DomainError : public Error {
  public:
    DomainError(std::string field, const std::string &reason)
        : Error(field + ": " + reason), m_field(std::move(field)) {}

    const std::string &field() const noexcept { return m_field; }

  private:
    std::string m_field;
};

class UnsupportedDesign : public Error {
  public:
    using Error::Error;
};

/// The generator has no unique stationary distribution reachable by a
/// linear solve (gamma = 0 with full flexibility).
class SingularChain : public Error {
  public:
    using Error::Error;
};

/// A closed form was requested outside its parameter restriction.
class CaseMismatch : public Error {
  public:
    CaseMismatch(std::string field, const std::string &reason)
        : Error(field + ": " + reason), m_field(std::move(field)) {}

    const std::string &field() const noexcept { return m_field; }

  private:
    std::string m_field;
};

class BracketError : public Error {
  public:
    using Error::Error;
};

class OrderingViolation : public Error {
  public:
    using Error::Error;
};

class TieBreakUnresolved : public Error {
  public:
    using Error::Error;
};

class InconsistentOrdering : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

} // namespace flexq

#endif
