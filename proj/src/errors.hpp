#pragma once

#include <stdexcept>
#include <string>

namespace hksym {

  // Base of everything the core throws; the C API maps each subclass to a
  // status code.
  class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
  };

  // Malformed arguments: dimension mismatch, bad space grammar, parameters
  // outside the admissible set.
  class InputError : public Error {
  public:
    using Error::Error;
  };

  // A scalar function was needed at a point outside its real domain.
  class DomainError : public Error {
  public:
    DomainError(const std::string& what, double at)
      : Error(what), m_at(at) {}
    double offendingValue() const noexcept { return m_at; }
  private:
    double m_at;
  };

  // The operator to invert has a (numerically) zero eigenvalue on the
  // support of the vector it is applied to.
  class SingularPointError : public Error {
  public:
    using Error::Error;
  };

  // A structural construction (basis, Cartan subalgebra, cascade) did not
  // reach the expected form.
  class ConstructionError : public Error {
  public:
    using Error::Error;
  };

  // A computed restricted root or root restriction lies outside the only
  // admissible set; reaching this means the structure theory was falsified.
  class MooreViolation : public Error {
  public:
    using Error::Error;
  };

}
