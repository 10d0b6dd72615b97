#pragma once

// Dwell time in the potential region (0, 1): per-energy densities, the
// packet-weighted total and its resonant and narrowband limits.
//
// Times are in units of t_d. The inner-region state is
// phi(x) = t' e^{i k_u x} + r' e^{-i k_u x}; the per-energy dwell time is
// \int_0^1 |phi|^2 dx / |v_u| and the interference kernel is
// \int_0^1 phi^2 dx / v_u, with v_u = 2 k_u.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "mstwave/core_model.hpp"
#include "mstwave/errors.hpp"
#include "mstwave/packet.hpp"
#include "mstwave/quadrature.hpp"
#include "mstwave/scattering.hpp"
#include "mstwave/wavepacket.hpp"

namespace mstwave {

struct DwellEnergyDensity {
  double t_of_E = 0.0;
  cplx interference_kernel{0.0, 0.0};
  bool branch_point = false;
};

namespace detail {

/// (e^c - 1) / c without cancellation, 1 at c = 0.
inline cplx exp_ratio(cplx c) {
  if (c == cplx(0.0, 0.0)) return {1.0, 0.0};
  if (std::abs(c) < 1e-5) return 1.0 + c / 2.0 + c * c / 6.0;
  const double a = c.real(), b = c.imag();
  const double s = std::sin(0.5 * b);
  const cplx em1(std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b));
  return em1 / c;
}

/// x - sin x and sinh x - x, accurate for small x.
inline double x_minus_sin(double x) {
  if (std::abs(x) < 0.5) {
    const double x2 = x * x;
    double term = x * x2 / 6.0, sum = 0.0;
    for (int n = 1; n < 12; ++n) {
      sum += term;
      term *= -x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    }
    return sum;
  }
  return x - std::sin(x);
}

inline double sinh_minus_x(double x) {
  if (std::abs(x) < 0.5) {
    const double x2 = x * x;
    double term = x * x2 / 6.0, sum = 0.0;
    for (int n = 1; n < 12; ++n) {
      sum += term;
      term *= x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    }
    return sum;
  }
  return std::sinh(x) - x;
}

}  // namespace detail

inline DwellEnergyDensity dwell_energy_density(double e_tilde, const PotentialSpec& pot) {
  const ScatteringSet s = closed_amplitudes(e_tilde, pot);
  const cplx i(0.0, 1.0);
  const cplx ku = s.k_u.value;
  const double p = ku.real(), q = ku.imag();
  const cplx A = s.t_prime, B = s.r_prime;
  DwellEnergyDensity out;
  out.branch_point = s.branch_point;
  const double direct = std::norm(A) * detail::exp_ratio(cplx(-2.0 * q, 0.0)).real() +
                        std::norm(B) * detail::exp_ratio(cplx(2.0 * q, 0.0)).real() +
                        2.0 * (A * std::conj(B) * detail::exp_ratio(cplx(0.0, 2.0 * p))).real();
  out.t_of_E = direct / std::abs(2.0 * ku);
  out.interference_kernel =
      (A * A * detail::exp_ratio(2.0 * i * ku) + B * B * detail::exp_ratio(-2.0 * i * ku) + 2.0 * A * B) / (2.0 * ku);
  return out;
}

/// The same two x-integrals evaluated by adaptive quadrature over x.
inline DwellEnergyDensity dwell_energy_density_numeric(double e_tilde, const PotentialSpec& pot,
                                                       const QuadratureSpec& quad = {}) {
  const ScatteringSet s = closed_amplitudes(e_tilde, pot);
  const cplx i(0.0, 1.0);
  const cplx ku = s.k_u.value;
  auto f = [&](double x, cplx* out) {
    const cplx phi = s.t_prime * std::exp(i * ku * x) + s.r_prime * std::exp(-i * ku * x);
    out[0] = std::norm(phi) / std::abs(2.0 * ku);
    out[1] = phi * phi / (2.0 * ku);
  };
  QuadratureSpec q = quad;
  q.rel_tol = std::min(q.rel_tol, 1e-12);
  q.abs_tol = std::min(q.abs_tol, 1e-300);
  const auto panels = phase_capped_panels(0.0, 1.0, {}, 0.0, 2.0 * std::abs(ku), q.phase_per_panel);
  const auto r = integrate_panels(f, 2, panels, q);
  DwellEnergyDensity out;
  out.t_of_E = r[0].value.real();
  out.interference_kernel = r[1].value;
  out.branch_point = s.branch_point;
  return out;
}

struct DwellSample {
  double e_tilde = 0.0;
  double t_of_E = 0.0;
  double fwd = 0.0;           ///< t(E) |psi_>(E)|^2
  double bwd = 0.0;           ///< t(E) |psi_<(E)|^2
  double interference = 0.0;  ///< 2 Re[kernel psi_> psi_<^*]
};

struct DwellBreakdown {
  double tau_fwd = 0.0;
  double tau_bwd = 0.0;
  double tau_interference = 0.0;
  double tau_total = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
  std::vector<DwellSample> energy_density;
  /// Largest relative mismatch between closed and x-quadrature dwell densities at sampled energies.
  double closed_form_check = 0.0;
};

namespace detail {

inline double rel_diff(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

}  // namespace detail

/// Carries the unconverged breakdown.
class DwellQuadratureError : public QuadratureError {
public:
  explicit DwellQuadratureError(const DwellBreakdown& partial)
      : QuadratureError("dwell_total: quadrature did not converge", partial.tau_total, partial.error_estimate),
        partial_(partial) {}
  const DwellBreakdown& partial() const noexcept { return partial_; }

private:
  DwellBreakdown partial_;
};

inline DwellBreakdown dwell_total(const PacketSpec& packet, const PotentialSpec& pot, const QuadratureSpec& quad,
                                  std::size_t density_samples = 201) {
  packet.validate();
  pot.validate();
  quad.validate();
  const auto amps = spectral_amplitudes(packet);
  const auto branch = detail::branch_energies(pot);

  auto weight_f = [&](double u, cplx* out) {
    const double e = u * u;
    if (e <= 0.0) {
      out[0] = 0.0;
      return;
    }
    out[0] = 2.0 * u * dwell_energy_density(e, pot).t_of_E * std::norm(amps.psi_fwd(e));
  };
  auto weight_b = [&](double u, cplx* out) {
    const double e = u * u;
    out[0] = 2.0 * u * dwell_energy_density(e, pot).t_of_E * std::norm(amps.psi_bwd(e));
  };
  auto weight_i = [&](double u, cplx* out) {
    const double e = u * u;
    const cplx k = dwell_energy_density(e, pot).interference_kernel;
    out[0] = 2.0 * u * 2.0 * (k * amps.psi_fwd(e) * std::conj(amps.psi_bwd(e))).real();
  };

  const double xs = 2.0 * std::abs(packet.x_i_tilde);
  const auto rf = integrate_spectral_batch(weight_f, 1, packet, SpectralSide::forward, 0.0, 0.0, branch, quad).front();
  const auto rb = integrate_spectral_batch(weight_b, 1, packet, SpectralSide::backward, 0.0, 0.0, branch, quad).front();
  const auto ri = integrate_spectral_batch(weight_i, 1, packet, SpectralSide::backward, 0.0, xs, branch, quad).front();

  DwellBreakdown d;
  d.tau_fwd = rf.value.real();
  d.tau_bwd = rb.value.real();
  d.tau_interference = ri.value.real();
  d.tau_total = d.tau_fwd + d.tau_bwd + d.tau_interference;
  d.error_estimate = rf.error_estimate + rb.error_estimate + ri.error_estimate;
  d.converged = rf.converged && rb.converged && ri.converged;
  if (!d.converged) throw DwellQuadratureError(d);

  const Panel wb = spectral_window(packet, SpectralSide::backward, quad.window_w);
  const double u_lo = std::max(wb.a, 1e-6), u_hi = wb.b;
  for (std::size_t j = 0; j < density_samples; ++j) {
    const double u = u_lo + (u_hi - u_lo) * static_cast<double>(j) / static_cast<double>(std::max<std::size_t>(1, density_samples - 1));
    const double e = u * u;
    const auto ed = dwell_energy_density(e, pot);
    DwellSample s;
    s.e_tilde = e;
    s.t_of_E = ed.t_of_E;
    s.fwd = ed.t_of_E * std::norm(amps.psi_fwd(e));
    s.bwd = ed.t_of_E * std::norm(amps.psi_bwd(e));
    s.interference = 2.0 * (ed.interference_kernel * amps.psi_fwd(e) * std::conj(amps.psi_bwd(e))).real();
    d.energy_density.push_back(s);
  }

  // closed x-integrals against x-quadrature at a few energies around the packet
  for (double f : {0.3, 0.7, 0.95, 1.0, 1.05, 1.4, 2.0}) {
    const double e = f * packet.e_perp_tilde;
    if (e == pot.u_tilde || e == pot.delta_tilde) continue;
    const auto a = dwell_energy_density(e, pot);
    const auto b = dwell_energy_density_numeric(e, pot);
    d.closed_form_check = std::max(d.closed_form_check, detail::rel_diff(a.t_of_E, b.t_of_E));
  }
  return d;
}

/// Narrowband dwell time relative to the free time 1/v(E_perp). Uses the
/// oscillatory form above the top of the inner level and the hyperbolic
/// form below it, both rearranged so that the turning point E_perp = U is
/// reached continuously.
inline double relative_dwell_asymptotic(double e_perp_tilde, const PotentialSpec& pot) {
  pot.validate();
  const double e = e_perp_tilde, U = pot.u_tilde, D = pot.delta_tilde;
  if (!(e > D)) throw DomainError("dwell_asymptotic: requires E_perp > Delta");
  const double lead = std::pow(std::sqrt(e) + std::sqrt(e - D), 2);
  const double c = U - D;
  if (e >= U) {
    const double q = std::sqrt(e - U);
    const double osc = q > 0.0 ? detail::x_minus_sin(2.0 * q) / (q * q * q) : 4.0 / 3.0;
    const double sq = q > 0.0 ? std::sin(q) / q : 1.0;
    return e * (4.0 + c * osc) / (lead + U * c * sq * sq);
  }
  const double qb = std::sqrt(U - e);
  const double hyp = detail::sinh_minus_x(2.0 * qb) / (qb * qb * qb);
  const double sh = std::sinh(qb) / qb;
  return e * (4.0 + c * hyp) / (lead + U * c * sh * sh);
}

/// Narrowband dwell time in units of t_d.
inline double dwell_asymptotic(double e_perp_tilde, const PotentialSpec& pot) {
  return relative_dwell_asymptotic(e_perp_tilde, pot) / (2.0 * std::sqrt(e_perp_tilde));
}

/// Order n of the inner-region resonance k_u = n pi at this energy; throws
/// NotResonantError when k_u is farther than 1e-9 from the nearest one.
inline int resonance_order(double e_tilde, const PotentialSpec& pot) {
  pot.validate();
  const double U = pot.u_tilde;
  const double ku = e_tilde > U ? std::sqrt(e_tilde - U) : 0.0;
  const int n = std::max(1, static_cast<int>(std::lround(ku / pi)));
  const double nearest = U + pi * pi * n * n;
  if (!(e_tilde > U) || std::abs(ku - pi * n) > 1e-9 * std::max(1.0, ku)) {
    throw NotResonantError("dwell_resonant: energy is not on a resonance k_u = n pi", n, nearest);
  }
  return n;
}

inline double relative_dwell_resonant(double e_tilde, const PotentialSpec& pot) {
  resonance_order(e_tilde, pot);
  const double e = e_tilde, U = pot.u_tilde, D = pot.delta_tilde;
  if (!(e >= D)) throw DomainError("dwell_resonant: requires E >= Delta");
  const double lead = std::pow(std::sqrt(e) + std::sqrt(e - D), 2);
  return 2.0 * e * (2.0 * e - U - D) / (lead * (e - U));
}

/// Resonant narrowband dwell time in units of t_d.
inline double dwell_resonant(double e_tilde, const PotentialSpec& pot) {
  return relative_dwell_resonant(e_tilde, pot) / (2.0 * std::sqrt(e_tilde));
}

}  // namespace mstwave
