#pragma once

// Finite-difference time-domain solver for i psi_t = -psi_xx + V psi on a
// uniform grid, used as an independent check of the spectral evolution.
//
// Space: Numerov (default) or the plain three-point Laplacian. Time: Cayley
// (Crank-Nicolson) steps with the left-hand side factored once per segment.
// The potential term is symmetrized, (M V + V M)/2, so every step is exactly
// unitary in the discrete norm psi^H M psi dx.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mstwave/core_model.hpp"
#include "mstwave/errors.hpp"
#include "mstwave/packet.hpp"

namespace mstwave {

enum class Boundary { hard_wall, absorbing_ramp };
enum class SpatialScheme { numerov, three_point };

struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 0.0;
  double dt = 0.0;
  Boundary boundary = Boundary::hard_wall;
  SpatialScheme scheme = SpatialScheme::numerov;
  double ramp_width = 10.0;     ///< absorbing_ramp only
  double ramp_strength = 50.0;  ///< peak of the imaginary ramp potential

  std::size_t nodes() const { return static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1; }
  double x_at(std::size_t j) const { return x_min + static_cast<double>(j) * dx; }
};

/// Bounds that a grid must satisfy for a packet run up to t_max.
struct GridLimits {
  double e_max = 0.0;
  double dx_max = 0.0;
  double dt_max = 0.0;
  double margin = 0.0;
  double x_lo = 0.0;  ///< domain must reach at least this far left
  double x_hi = 0.0;  ///< and this far right
};

inline GridLimits grid_limits(const PacketSpec& packet, double t_max, double window_w = 8.0) {
  GridLimits g;
  const double umax = packet.u_perp() + window_w / packet.sigma_tilde;
  g.e_max = umax * umax;
  g.dx_max = (2.0 * pi / umax) / 16.0;
  g.dt_max = g.dx_max / (4.0 * umax);
  g.margin = 10.0 * packet.sigma_tilde + 2.0 * umax * std::max(0.0, t_max - packet.t0_tilde);
  g.x_lo = packet.x_i_tilde - g.margin;
  g.x_hi = 1.0 + g.margin;
  return g;
}

/// Smallest conforming grid: dx = 1/N so that x = 0 and x = 1 are nodes.
/// `refine` > 1 shrinks dx and dt by that factor; < 1 coarsens them
/// (the result then violates the limits and needs `enforce = false`).
inline GridSpec make_grid(const PacketSpec& packet, double t_max, double window_w = 8.0, double refine = 1.0,
                          double dt_factor = 1.0) {
  const GridLimits g = grid_limits(packet, t_max, window_w);
  const double n_per_unit = std::ceil(1.0 / g.dx_max);
  GridSpec s;
  s.dx = 1.0 / std::max(1.0, std::round(n_per_unit * refine));
  s.dt = s.dx / (4.0 * std::sqrt(g.e_max)) / dt_factor;
  s.x_min = std::floor(g.x_lo / s.dx) * s.dx;
  s.x_max = std::ceil(g.x_hi / s.dx) * s.dx;
  return s;
}

inline void check_grid(const GridSpec& grid, const PacketSpec& packet, double t_max, double window_w = 8.0) {
  if (!(grid.dx > 0.0) || !(grid.dt > 0.0) || !(grid.x_max > grid.x_min)) {
    throw ConfigError("grid: dx, dt must be positive and x_max > x_min");
  }
  const GridLimits g = grid_limits(packet, t_max, window_w);
  const double slack = 1.0 + 1e-12;
  if (grid.dx > g.dx_max * slack) {
    throw ConfigError("grid: dx = " + std::to_string(grid.dx) + " exceeds 1/16 of the shortest wavelength (" +
                      std::to_string(g.dx_max) + ")");
  }
  const double dt_limit = grid.dx / (4.0 * std::sqrt(g.e_max));
  if (grid.dt > dt_limit * slack) {
    throw ConfigError("grid: dt = " + std::to_string(grid.dt) + " exceeds dx/(4 sqrt(E_max)) (" +
                      std::to_string(dt_limit) + ")");
  }
  if (grid.x_min > g.x_lo + 1e-12 || grid.x_max < g.x_hi - 1e-12) {
    throw ConfigError("grid: domain does not cover the packet support plus margin");
  }
}

struct OracleOptions {
  bool enforce_invariants = true;
  double window_w = 8.0;
};

struct OracleResult {
  std::vector<double> x;
  std::vector<double> t_samples;
  std::vector<std::vector<cplx>> fields;  ///< one per sample time
  double norm_initial = 0.0;
  double norm_final = 0.0;
  double norm_drift = 0.0;  ///< max relative change of the M-norm over sampled times
  long steps = 0;
};

namespace detail {

// Constant tridiagonal system (sub, diag, sup) factored for repeated solves.
struct Tridiagonal {
  std::vector<cplx> sub, diag, sup;
  std::vector<cplx> cprime, inv_denom;

  void factor() {
    const std::size_t n = diag.size();
    cprime.assign(n, {});
    inv_denom.assign(n, {});
    cplx den = diag[0];
    inv_denom[0] = 1.0 / den;
    cprime[0] = sup[0] * inv_denom[0];
    for (std::size_t j = 1; j < n; ++j) {
      den = diag[j] - sub[j] * cprime[j - 1];
      inv_denom[j] = 1.0 / den;
      cprime[j] = (j + 1 < n) ? sup[j] * inv_denom[j] : cplx(0.0, 0.0);
    }
  }

  void solve(std::vector<cplx>& rhs) const {
    const std::size_t n = diag.size();
    rhs[0] *= inv_denom[0];
    for (std::size_t j = 1; j < n; ++j) rhs[j] = (rhs[j] - sub[j] * rhs[j - 1]) * inv_denom[j];
    for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= cprime[j] * rhs[j + 1];
  }
};

}  // namespace detail

/// Time-dependent solve from the cut-off, renormalized Gaussian packet.
inline OracleResult evolve_grid(const PacketSpec& packet, const PotentialSpec& pot, const GridSpec& grid,
                                std::vector<double> t_samples, const OracleOptions& opt = {}) {
  packet.validate();
  pot.validate();
  std::sort(t_samples.begin(), t_samples.end());
  if (t_samples.empty()) throw ConfigError("evolve_grid: no sample times");
  if (t_samples.front() < packet.t0_tilde) throw ConfigError("evolve_grid: sample time before t0");
  if (opt.enforce_invariants) check_grid(grid, packet, t_samples.back(), opt.window_w);
  if (!(grid.dx > 0.0) || !(grid.dt > 0.0)) throw ConfigError("evolve_grid: dx and dt must be positive");

  const std::size_t n = grid.nodes();
  if (n < 8) throw ConfigError("evolve_grid: grid too small");
  const double h = grid.dx;
  const cplx i(0.0, 1.0);

  OracleResult out;
  out.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.x[j] = grid.x_at(j);

  // potential; nodes on a jump carry the mean of the two levels
  std::vector<cplx> v(n);
  const double tol = 1e-9 * h;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = out.x[j];
    double val;
    if (std::abs(x) < tol) val = 0.5 * pot.u_tilde;
    else if (std::abs(x - 1.0) < tol) val = 0.5 * (pot.u_tilde + pot.delta_tilde);
    else val = pot.level_at(x);
    v[j] = val;
    if (grid.boundary == Boundary::absorbing_ramp) {
      const double dl = (grid.x_min + grid.ramp_width) - x;
      const double dr = x - (grid.x_max - grid.ramp_width);
      const double d = std::max({dl, dr, 0.0}) / grid.ramp_width;
      v[j] -= i * grid.ramp_strength * d * d;
    }
  }

  // mass matrix M and kinetic matrix A (tridiagonal, Dirichlet ends)
  const bool numerov = grid.scheme == SpatialScheme::numerov;
  const double m_off = numerov ? 1.0 / 12.0 : 0.0;
  const double m_diag = numerov ? 10.0 / 12.0 : 1.0;
  const double a_off = -1.0 / (h * h);
  const double a_diag = 2.0 / (h * h);

  // H~ = A + (M V + V M) / 2 as tridiagonal bands
  std::vector<cplx> h_sub(n), h_diag(n), h_sup(n);
  for (std::size_t j = 0; j < n; ++j) {
    h_diag[j] = a_diag + m_diag * v[j];
    h_sub[j] = (j > 0) ? a_off + m_off * 0.5 * (v[j] + v[j - 1]) : cplx(0.0, 0.0);
    h_sup[j] = (j + 1 < n) ? a_off + m_off * 0.5 * (v[j] + v[j + 1]) : cplx(0.0, 0.0);
  }

  auto m_norm = [&](const std::vector<cplx>& psi) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      cplx mp = m_diag * psi[j];
      if (j > 0) mp += m_off * psi[j - 1];
      if (j + 1 < n) mp += m_off * psi[j + 1];
      s += (std::conj(psi[j]) * mp).real();
    }
    return s * h;
  };

  // initial packet, zero on x >= 0 and at the walls
  std::vector<cplx> psi(n);
  const double s = packet.sigma_tilde, up = packet.u_perp(), xi = packet.x_i_tilde;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double x = out.x[j];
    if (x >= 0.0) continue;
    psi[j] = std::pow(2.0 * pi * s * s, -0.25) * std::exp(-(x - xi) * (x - xi) / (4.0 * s * s)) *
             std::polar(1.0, up * x);
  }
  // renormalize in the plain discrete norm (nodal values are samples of psi);
  // the scheme conserves the M-weighted norm, which is tracked for drift
  double n0 = 0.0;
  for (const auto& p : psi) n0 += std::norm(p);
  n0 *= h;
  for (auto& p : psi) p /= std::sqrt(n0);
  out.norm_initial = m_norm(psi);

  std::vector<cplx> rhs(n);
  double t_now = packet.t0_tilde;
  for (double t_target : t_samples) {
    const double span = t_target - t_now;
    if (span > 0.0) {
      const long steps = static_cast<long>(std::ceil(span / grid.dt - 1e-9));
      const double dt = span / static_cast<double>(steps);
      const cplx c = 0.5 * i * dt;
      detail::Tridiagonal lhs;
      lhs.sub.resize(n);
      lhs.diag.resize(n);
      lhs.sup.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        lhs.sub[j] = m_off + c * h_sub[j];
        lhs.diag[j] = m_diag + c * h_diag[j];
        lhs.sup[j] = m_off + c * h_sup[j];
      }
      // Dirichlet walls: pin the end nodes to zero
      lhs.sub[0] = lhs.sup[0] = 0.0;
      lhs.diag[0] = 1.0;
      lhs.sub[n - 1] = lhs.sup[n - 1] = 0.0;
      lhs.diag[n - 1] = 1.0;
      lhs.factor();
      std::vector<cplx> r_sub(n), r_diag(n), r_sup(n);
      for (std::size_t j = 0; j < n; ++j) {
        r_sub[j] = m_off - c * h_sub[j];
        r_diag[j] = m_diag - c * h_diag[j];
        r_sup[j] = m_off - c * h_sup[j];
      }
      for (long st = 0; st < steps; ++st) {
        rhs[0] = 0.0;
        rhs[n - 1] = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) {
          rhs[j] = r_sub[j] * psi[j - 1] + r_diag[j] * psi[j] + r_sup[j] * psi[j + 1];
        }
        lhs.solve(rhs);
        psi.swap(rhs);
      }
      out.steps += steps;
      t_now = t_target;
    }
    out.t_samples.push_back(t_target);
    out.fields.push_back(psi);
    out.norm_drift = std::max(out.norm_drift, std::abs(m_norm(psi) / out.norm_initial - 1.0));
  }
  out.norm_final = m_norm(psi);
  return out;
}

enum class CompareNorm { L2_rel, Linf_rel };

/// Distance between two sampled fields on the same grid; L2_rel is
/// ||a - b||_2 / ||a||_2 and Linf_rel is max|a - b| / max|a|.
template <class T>
double compare(const std::vector<double>& x_a, const std::vector<T>& a, const std::vector<double>& x_b,
               const std::vector<T>& b, CompareNorm norm) {
  if (x_a.size() != x_b.size() || a.size() != b.size() || a.size() != x_a.size()) {
    throw ConfigError("compare: fields are on different grids");
  }
  for (std::size_t j = 0; j < x_a.size(); ++j) {
    if (std::abs(x_a[j] - x_b[j]) > 1e-12 * std::max(1.0, std::abs(x_a[j]))) {
      throw ConfigError("compare: fields are on different grids");
    }
  }
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = std::abs(a[j] - b[j]);
    const double r = std::abs(a[j]);
    if (norm == CompareNorm::L2_rel) {
      num += d * d;
      den += r * r;
    } else {
      num = std::max(num, d);
      den = std::max(den, r);
    }
  }
  if (norm == CompareNorm::L2_rel) {
    num = std::sqrt(num);
    den = std::sqrt(den);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace mstwave
