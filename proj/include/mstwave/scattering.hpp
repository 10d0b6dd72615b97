#pragma once

// Single-step amplitudes and t-matrices, their multiple-scattering
// composition across the two interfaces, and the closed four-amplitude set.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "mstwave/core_model.hpp"
#include "mstwave/errors.hpp"

namespace mstwave {

/// hbar and mass used when building t-matrices. The library default is the
/// dimensionless system (hbar = 1, m = 1/2); velocities are hbar k / m.
struct KineticUnits {
  double hbar = 1.0;
  double mass = 0.5;

  cplx velocity(cplx k) const { return hbar * k / mass; }
};

struct StepAmplitudes {
  cplx r_right;  ///< reflection for a wave approaching from the right
  cplx r_left;   ///< reflection for a wave approaching from the left
  cplx t;
};

struct StepTMatrixSet {
  cplx t_refl_right;
  cplx t_refl_left;
  cplx t_trans;
};

struct ScatteringSet {
  cplx t, t_prime, r_prime, r;
  cplx denom;
  ChannelWaveNumber k, k_u, k_delta;
  bool branch_point = false;  ///< evaluated just above E = U or E = Delta
};

inline StepAmplitudes step_amplitudes(const ChannelWaveNumber& k_left, const ChannelWaveNumber& k_right) {
  const cplx sum = k_left.value + k_right.value;
  if (sum == cplx(0.0, 0.0)) throw SingularStepError("step_amplitudes: k_left + k_right = 0");
  StepAmplitudes s;
  s.r_right = (k_right.value - k_left.value) / sum;
  s.r_left = -s.r_right;
  s.t = 2.0 * sqrt_wave(k_left.value) * sqrt_wave(k_right.value) / sum;
  return s;
}

namespace detail {

inline bool close_rel(cplx a, cplx b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

// Resummed t-matrix H / (1 - G0 H); an infinite G0 (zero velocity) gives 0.
inline cplx resum(cplx h, cplx g0_inverse) {
  if (g0_inverse == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
  return h / (1.0 - h / g0_inverse);
}

}  // namespace detail

/// Builds the interface t-matrices by resumming the effective step
/// potentials with the interface Green functions and cross-checks the result
/// against the direct amplitude form.
inline StepTMatrixSet step_t_matrices(const ChannelWaveNumber& k_left, const ChannelWaveNumber& k_right,
                                      const KineticUnits& units = {}) {
  const StepAmplitudes amp = step_amplitudes(k_left, k_right);
  const cplx i(0.0, 1.0);
  const double hb = units.hbar;
  const cplx v_r = units.velocity(k_right.value);
  const cplx v_l = units.velocity(k_left.value);
  const cplx sv_r = std::sqrt(v_r);
  const cplx sv_l = std::sqrt(v_l);

  // effective potentials
  const cplx h_right = 0.5 * i * hb * (v_r - v_l);
  const cplx h_left = 0.5 * i * hb * (v_l - v_r);
  const cplx h_trans = 2.0 * i * hb * v_r * v_l / ((sv_r + sv_l) * (sv_r + sv_l));

  // inverse interface Green functions (G0 = 1 / (i hbar v))
  StepTMatrixSet resummed;
  resummed.t_refl_right = detail::resum(h_right, i * hb * v_r);
  resummed.t_refl_left = detail::resum(h_left, i * hb * v_l);
  resummed.t_trans = detail::resum(h_trans, i * hb * sv_r * sv_l);

  StepTMatrixSet direct;
  direct.t_refl_right = i * hb * v_r * amp.r_right;
  direct.t_refl_left = i * hb * v_l * amp.r_left;
  direct.t_trans = i * hb * sv_r * sv_l * amp.t;

  constexpr double tol = 1e-10;
  if (!detail::close_rel(resummed.t_refl_right, direct.t_refl_right, tol) ||
      !detail::close_rel(resummed.t_refl_left, direct.t_refl_left, tol) ||
      !detail::close_rel(resummed.t_trans, direct.t_trans, tol)) {
    throw std::logic_error("step_t_matrices: resummed and direct t-matrices disagree");
  }
  return resummed;
}

namespace detail {

/// sin(k s) / k, continuous at k = 0.
inline cplx sinc_scaled(cplx k, double s) {
  const cplx z = k * s;
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return s * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  }
  return std::sin(z) / k;
}

struct Channels {
  ChannelWaveNumber k, k_u, k_delta;
  double energy;
  bool branch_point;
};

inline Channels channels(double e_tilde, const PotentialSpec& pot) {
  if (!(e_tilde > 0.0) || !std::isfinite(e_tilde)) throw DomainError("energy must be positive and finite");
  pot.validate();
  Channels c{};
  c.energy = e_tilde;
  c.branch_point = (e_tilde == pot.u_tilde) || (e_tilde == pot.delta_tilde);
  if (c.branch_point) c.energy = nudge_above(e_tilde);
  c.k = wave_number(c.energy, 0.0);
  c.k_u = wave_number(c.energy, pot.u_tilde);
  c.k_delta = wave_number(c.energy, pot.delta_tilde);
  return c;
}

/// Reduced denominator d(E) / (2 k_u), free of the 0/0 at k_u = 0.
inline cplx reduced_denominator(cplx k, cplx ku, cplx kd) {
  const cplx i(0.0, 1.0);
  return (k + kd) - i * (k - ku) * (kd - ku) * std::exp(i * ku) * sinc_scaled(ku, 1.0);
}

}  // namespace detail

inline ScatteringSet closed_amplitudes(double e_tilde, const PotentialSpec& pot) {
  const auto ch = detail::channels(e_tilde, pot);
  const cplx i(0.0, 1.0);
  const cplx k = ch.k.value, ku = ch.k_u.value, kd = ch.k_delta.value;
  const cplx sk = sqrt_wave(k), sku = sqrt_wave(ku), skd = sqrt_wave(kd);
  const cplx eiku = std::exp(i * ku);
  const cplx s1 = detail::sinc_scaled(ku, 1.0);
  const cplx dhat = detail::reduced_denominator(k, ku, kd);

  ScatteringSet s;
  s.k = ch.k;
  s.k_u = ch.k_u;
  s.k_delta = ch.k_delta;
  s.branch_point = ch.branch_point;
  s.denom = 2.0 * ku * dhat;
  s.t = 2.0 * sk * skd * eiku / dhat;
  s.r = ((k - kd) - i * (k + ku) * (kd - ku) * eiku * s1) / dhat;
  s.t_prime = sk * (kd + ku) / (sku * dhat);
  s.r_prime = sk * (ku - kd) * eiku * eiku / (sku * dhat);
  return s;
}

/// Same amplitude set assembled from the interface t-matrices: two steps
/// joined by the free propagator across the inner region.
inline ScatteringSet mst_compose(double e_tilde, const PotentialSpec& pot) {
  const auto ch = detail::channels(e_tilde, pot);
  const KineticUnits units;
  const cplx i(0.0, 1.0);
  const double hb = units.hbar;
  const cplx k = ch.k.value, ku = ch.k_u.value, kd = ch.k_delta.value;

  const StepTMatrixSet s0 = step_t_matrices(ch.k, ch.k_u, units);        // interface at x = 0
  const StepTMatrixSet s1 = step_t_matrices(ch.k_u, ch.k_delta, units);  // interface at x = d

  // free Green function of the inner region between the two interfaces
  const cplx g_in = units.mass / (i * hb * hb * ku) * std::exp(i * ku);
  const cplx dd = 1.0 - g_in * s0.t_refl_right * g_in * s1.t_refl_left;

  const cplx t_full = s1.t_trans * g_in * s0.t_trans / dd;
  const cplx tp_full = s0.t_trans / dd;
  const cplx rp_full = s1.t_refl_left * g_in * tp_full;
  const cplx r_full = s0.t_refl_left + s0.t_trans * g_in * s1.t_refl_left * g_in * s0.t_trans / dd;

  const cplx v = units.velocity(k), vu = units.velocity(ku), vd = units.velocity(kd);
  const cplx sv = std::sqrt(v), svu = std::sqrt(vu), svd = std::sqrt(vd);

  ScatteringSet s;
  s.k = ch.k;
  s.k_u = ch.k_u;
  s.k_delta = ch.k_delta;
  s.branch_point = ch.branch_point;
  s.t = t_full / (i * hb * sv * svd);
  s.t_prime = tp_full / (i * hb * sv * svu);
  s.r_prime = rp_full * std::exp(i * ku) / (i * hb * sv * svu);
  s.r = r_full / (i * hb * v);
  s.denom = dd * (k + ku) * (kd + ku);
  return s;
}

struct Probabilities {
  double T_prob = 0.0;
  double R_prob = 0.0;
};

inline Probabilities probabilities(double e_tilde, const PotentialSpec& pot) {
  const ScatteringSet s = closed_amplitudes(e_tilde, pot);
  Probabilities p;
  if (!s.k_delta.propagating()) {
    p.T_prob = 0.0;
    p.R_prob = 1.0;
    return p;
  }
  p.T_prob = std::norm(s.t);
  p.R_prob = std::norm(s.r);
  return p;
}

}  // namespace mstwave
