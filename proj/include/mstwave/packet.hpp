#pragma once

#include <array>
#include <cmath>

#include "mstwave/errors.hpp"

namespace mstwave {

/// Gaussian initial packet in dimensionless units. `e_perp_tilde` is the
/// perpendicular energy k_i^2 (the parallel momentum is already folded out).
struct PacketSpec {
  double e_perp_tilde = 100.0;
  double sigma_tilde = 1.0 / 3.0;
  double x_i_tilde = -10.0;
  double t0_tilde = 0.0;
  // transverse data, only used by transverse_factor
  std::array<double, 2> k_par{0.0, 0.0};
  std::array<double, 2> rho_i{0.0, 0.0};

  double u_perp() const { return std::sqrt(e_perp_tilde); }

  void validate() const {
    if (!(e_perp_tilde > 0.0) || !std::isfinite(e_perp_tilde)) throw DomainError("PacketSpec: E_perp must be positive");
    if (!(sigma_tilde > 0.0) || !std::isfinite(sigma_tilde)) throw DomainError("PacketSpec: sigma must be positive");
    if (!(x_i_tilde < 0.0) || !std::isfinite(x_i_tilde)) throw DomainError("PacketSpec: x_i must be negative");
    if (!std::isfinite(t0_tilde)) throw DomainError("PacketSpec: t0 must be finite");
  }
};

}  // namespace mstwave
