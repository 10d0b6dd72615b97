#pragma once

#include <stdexcept>
#include <string>

namespace mstwave {

/// Invalid argument outside an operation's domain (non-positive scale, bad packet, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A potential step whose two channel wave numbers sum to zero.
class SingularStepError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Source/destination region pair for which no Green function is available.
class UnsupportedRegionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Energy that is not a resonance of the inner region (k_u d != n pi).
class NotResonantError : public std::domain_error {
public:
  NotResonantError(const std::string& what, int nearest_n, double nearest_energy)
      : std::domain_error(what), nearest_n_(nearest_n), nearest_energy_(nearest_energy) {}

  int nearest_n() const noexcept { return nearest_n_; }
  double nearest_energy() const noexcept { return nearest_energy_; }

private:
  int nearest_n_;
  double nearest_energy_;
};

/// Adaptive quadrature ran out of panels before meeting its tolerance.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

private:
  double estimate_;
  double error_bound_;
};

/// Bad scenario or grid configuration (detected before any numerical work).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mstwave
