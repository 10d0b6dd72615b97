#pragma once

// Dimensionless scaling, the two-step potential and branch-resolved channel
// wave numbers.
//
// Units: lengths in d, energies in E_d = hbar^2 / (2 m d^2), times in
// t_d = hbar / E_d. In these units hbar = 1, m = 1/2, k = sqrt(E) and the
// group velocity is v = 2k.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "mstwave/errors.hpp"

namespace mstwave {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double electron_mass = 9.1093837015e-31;  // kg
inline constexpr double electron_volt = 1.602176634e-19;   // J
}  // namespace constants

struct PhysicalScales {
  double d_width = 0.0;  ///< m
  double mass = 0.0;     ///< kg
  double E_d = 0.0;      ///< J, hbar^2 / (2 m d^2)
  double t_d = 0.0;      ///< s, hbar / E_d

  double energy_to_physical(double e_tilde) const { return e_tilde * E_d; }
  double time_to_physical(double t_tilde) const { return t_tilde * t_d; }
  double length_to_physical(double x_tilde) const { return x_tilde * d_width; }
};

inline PhysicalScales make_scales(double d_width, double mass) {
  if (!(d_width > 0.0) || !(mass > 0.0) || !std::isfinite(d_width) || !std::isfinite(mass)) {
    throw DomainError("make_scales: width and mass must be positive and finite");
  }
  PhysicalScales s;
  s.d_width = d_width;
  s.mass = mass;
  s.E_d = constants::hbar * constants::hbar / (2.0 * mass * d_width * d_width);
  s.t_d = constants::hbar / s.E_d;
  return s;
}

/// Asymmetric rectangular profile: 0 for x < 0, U on (0, d), Delta for x > d.
struct PotentialSpec {
  double u_tilde = 0.0;
  double delta_tilde = 0.0;

  void validate() const {
    if (!std::isfinite(u_tilde)) throw DomainError("PotentialSpec: U must be finite");
    if (!std::isfinite(delta_tilde) || delta_tilde < 0.0) {
      throw DomainError("PotentialSpec: Delta must be finite and non-negative");
    }
  }

  bool is_free() const { return u_tilde == 0.0 && delta_tilde == 0.0; }

  /// Level at dimensionless position x; jump points take the left limit.
  double level_at(double x) const {
    if (x <= 0.0) return 0.0;
    if (x <= 1.0) return u_tilde;
    return delta_tilde;
  }
};

enum class ChannelKind { propagating, evanescent };

struct ChannelWaveNumber {
  cplx value{0.0, 0.0};
  ChannelKind kind = ChannelKind::evanescent;
  bool branch_point = false;  ///< energy sits exactly on the channel threshold

  bool propagating() const { return kind == ChannelKind::propagating; }
  /// Dimensionless velocity 2k (complex for evanescent channels).
  cplx velocity() const { return 2.0 * value; }
};

/// sqrt(e - v + i0): real positive above threshold, positive imaginary below.
inline ChannelWaveNumber wave_number(double e_tilde, double v_tilde) {
  if (!std::isfinite(e_tilde) || !std::isfinite(v_tilde)) throw DomainError("wave_number: non-finite input");
  ChannelWaveNumber k;
  const double diff = e_tilde - v_tilde;
  if (diff > 0.0) {
    k.value = cplx(std::sqrt(diff), 0.0);
    k.kind = ChannelKind::propagating;
  } else if (diff < 0.0) {
    k.value = cplx(0.0, std::sqrt(-diff));
    k.kind = ChannelKind::evanescent;
  } else {
    k.value = cplx(0.0, 0.0);
    k.kind = ChannelKind::evanescent;
    k.branch_point = true;
  }
  return k;
}

/// Principal square root of a wave number on the retarded sheet. Because
/// Im k >= 0, the result lies in the first quadrant.
inline cplx sqrt_wave(cplx k) { return std::sqrt(k); }

/// Smallest energy strictly above `e` that is safely off a branch point.
inline double nudge_above(double e) {
  const double scale = std::max(1.0, std::abs(e));
  return e + 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace mstwave
