#pragma once

// Gaussian packet spectral decomposition and the forward/backward wave
// function in all three regions.
//
// With u = sqrt(E) the forward component reads
//   psi_>(x, t) = C e^{i u_p x_i} \int du e^{-i u^2 tau} m(u, x) e^{-(u - u_p)^2 s^2} e^{-i u x_i}
// where m is the scattering state (incident amplitude 2) and
// C = sqrt(s) / (sqrt(2) (2 pi)^{3/4}). The backward component uses the
// conjugated state, the mirrored Gaussian and e^{+i u x_i}.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "mstwave/core_model.hpp"
#include "mstwave/errors.hpp"
#include "mstwave/greens.hpp"
#include "mstwave/packet.hpp"
#include "mstwave/quadrature.hpp"
#include "mstwave/scattering.hpp"

namespace mstwave {

struct SpectralAmplitudes {
  PacketSpec packet;

  /// Forward weight psi_>(E), units of E^{-1/2}.
  cplx psi_fwd(double e) const { return amplitude(e, -1.0); }
  /// Backward weight psi_<(E).
  cplx psi_bwd(double e) const { return amplitude(e, +1.0); }

private:
  cplx amplitude(double e, double sign) const {
    if (!(e > 0.0)) return {0.0, 0.0};
    const double u = std::sqrt(e);
    const double s = packet.sigma_tilde;
    const double up = packet.u_perp();
    const double dk = up + sign * u;
    const double mag = std::pow(2.0 * pi * s * s, 0.25) / std::sqrt(2.0 * pi * u) * std::exp(-dk * dk * s * s);
    return std::polar(mag, dk * packet.x_i_tilde);
  }
};

inline SpectralAmplitudes spectral_amplitudes(const PacketSpec& packet) {
  packet.validate();
  return SpectralAmplitudes{packet};
}

/// Closed-form transverse factor at rho = rho_i + rho_offset.
inline cplx transverse_factor(const std::array<double, 2>& rho_offset, double t_tilde, const PacketSpec& packet) {
  const double tau = t_tilde - packet.t0_tilde;
  if (tau < 0.0) throw DomainError("transverse_factor: t must not precede t0");
  const cplx i(0.0, 1.0);
  const double s = packet.sigma_tilde;
  const cplx den = i * tau + s * s;
  cplx q(0.0, 0.0);
  double kr = 0.0, kk = 0.0;
  for (int c = 0; c < 2; ++c) {
    const cplx d = rho_offset[c] - 2.0 * i * packet.k_par[c] * s * s;
    q += d * d;
    kr += packet.k_par[c] * packet.rho_i[c];
    kk += packet.k_par[c] * packet.k_par[c];
  }
  return std::sqrt(2.0 / pi) * (0.5 * s) / den * std::exp(-q / (4.0 * den)) * std::exp(i * kr) * std::exp(-kk * s * s);
}

namespace detail {

// Energy-only data shared by every position at one abscissa.
struct ModeData {
  double u;
  cplx ku, kd, r, eiku, dhat;
};

inline ModeData mode_data(double u, const PotentialSpec& pot) {
  const cplx i(0.0, 1.0);
  ModeData m;
  m.u = u;
  const double e = u * u;
  m.ku = wave_number(e, pot.u_tilde).value;
  m.kd = wave_number(e, pot.delta_tilde).value;
  const cplx k(u, 0.0);
  m.eiku = std::exp(i * m.ku);
  const cplx s1 = sinc_scaled(m.ku, 1.0);
  m.dhat = reduced_denominator(k, m.ku, m.kd);
  m.r = ((k - m.kd) - i * (k + m.ku) * (m.kd - m.ku) * m.eiku * s1) / m.dhat;
  return m;
}

// Scattering state with incident part 2 e^{iux} and its x-derivative.
inline void mode_inside(const ModeData& m, double x, cplx& val, cplx& der) {
  const cplx i(0.0, 1.0);
  const cplx pre = 4.0 * m.u * m.eiku / m.dhat;
  const double s = x - 1.0;
  const cplx c = std::cos(m.ku * s);
  const cplx sn = sinc_scaled(m.ku, s);
  val = pre * (c + i * m.kd * sn);
  der = pre * (-m.ku * m.ku * sn + i * m.kd * c);
}

inline bool uniformly_spaced(const double* x, std::size_t n) {
  if (n < 3) return false;
  const double h = x[1] - x[0];
  if (!(h > 0.0)) return false;
  for (std::size_t j = 2; j < n; ++j) {
    if (std::abs((x[j] - x[j - 1]) - h) > 1e-9 * h) return false;
  }
  return true;
}

// Fills z[j] = exp(i w x[j]) for complex w; uses a reseeded recurrence on
// uniform grids.
inline void phase_table(cplx w, const double* x, std::size_t n, bool uniform, cplx* z) {
  const cplx i(0.0, 1.0);
  if (!uniform) {
    for (std::size_t j = 0; j < n; ++j) z[j] = std::exp(i * w * x[j]);
    return;
  }
  const cplx step = std::exp(i * w * (x[1] - x[0]));
  for (std::size_t j = 0; j < n; ++j) {
    z[j] = (j % 32 == 0) ? std::exp(i * w * x[j]) : z[j - 1] * step;
  }
}

}  // namespace detail

struct EvolveOptions {
  bool derivatives = false;
  std::size_t chunk_size = 256;
  bool force_region = false;  ///< evaluate every x with the formula of `region`
  Region region = Region::left;
};

struct WaveField {
  std::vector<double> x_grid;
  std::vector<double> t_grid;
  // row-major, index it * nx + ix
  std::vector<cplx> psi_fwd, psi_bwd;
  std::vector<cplx> dpsi_fwd, dpsi_bwd;  // filled only when derivatives are requested
  std::vector<double> density;
  std::vector<double> error_estimate;  // larger of the forward/backward estimates
  std::vector<char> poisoned;          // quadrature did not converge at this point

  std::size_t nx() const { return x_grid.size(); }
  std::size_t nt() const { return t_grid.size(); }
  std::size_t index(std::size_t it, std::size_t ix) const { return it * x_grid.size() + ix; }
  std::size_t poisoned_count() const { return static_cast<std::size_t>(std::count(poisoned.begin(), poisoned.end(), 1)); }
};

namespace detail {

inline std::vector<double> branch_energies(const PotentialSpec& pot) {
  std::vector<double> b;
  if (pot.u_tilde > 0.0) b.push_back(pot.u_tilde);
  if (pot.delta_tilde > 0.0) b.push_back(pot.delta_tilde);
  return b;
}

// Integrates one chunk of positions sharing a region for one time and side.
inline void evolve_chunk(const PacketSpec& packet, const PotentialSpec& pot, Region region, const double* xs,
                         std::size_t m, double tau, SpectralSide side, bool derivs, const QuadratureSpec& quad,
                         cplx* psi, cplx* dpsi, double* err, char* bad) {
  const cplx i(0.0, 1.0);
  const double s = packet.sigma_tilde;
  const double up = packet.u_perp();
  const double xi = packet.x_i_tilde;
  const double c_norm = std::sqrt(s) / (std::sqrt(2.0) * std::pow(2.0 * pi, 0.75));
  const cplx c_phase = c_norm * std::polar(1.0, up * xi);
  const bool fwd = side == SpectralSide::forward;
  const bool uniform = uniformly_spaced(xs, m);

  double x_span = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    x_span = std::max({x_span, std::abs(xs[j] - xi), std::abs(xs[j] + xi), std::abs(2.0 - xs[j] - xi)});
  }
  std::vector<double> xshift;
  if (region != Region::left) {
    xshift.resize(m);
    for (std::size_t j = 0; j < m; ++j) xshift[j] = xs[j] - 1.0;
  }
  const std::size_t n = derivs ? 2 * m : m;
  std::vector<cplx> z(m);

  auto f = [&](double u, cplx* out) {
    const ModeData md = mode_data(u, pot);
    const double g = fwd ? (u - up) : (u + up);
    const double phase = -u * u * tau + (fwd ? -u * xi : u * xi);
    const cplx w = c_phase * std::polar(std::exp(-g * g * s * s), phase);
    switch (region) {
      case Region::left: {
        phase_table(cplx(u, 0.0), xs, m, uniform, z.data());
        const cplx r = fwd ? md.r : std::conj(md.r);
        for (std::size_t j = 0; j < m; ++j) {
          // forward: e^{iux} + r e^{-iux}; backward: conj of it
          const cplx inc = fwd ? z[j] : std::conj(z[j]);
          const cplx ref = fwd ? std::conj(z[j]) : z[j];
          out[j] = w * 2.0 * (inc + r * ref);
          if (derivs) {
            const double sgn = fwd ? 1.0 : -1.0;
            out[m + j] = w * 2.0 * (sgn * i * u) * (inc - r * ref);
          }
        }
        break;
      }
      case Region::inside: {
        if (std::abs(md.ku) < 1e-2) {
          for (std::size_t j = 0; j < m; ++j) {
            cplx v, d;
            mode_inside(md, xs[j], v, d);
            out[j] = w * (fwd ? v : std::conj(v));
            if (derivs) out[m + j] = w * (fwd ? d : std::conj(d));
          }
          break;
        }
        // exponential form: cos and sin/ku from e^{+-i ku (x-1)}
        phase_table(md.ku, xshift.data(), m, uniform, z.data());
        const cplx pre = 4.0 * u * md.eiku / md.dhat;
        const cplx inv2iku = 1.0 / (2.0 * i * md.ku);
        for (std::size_t j = 0; j < m; ++j) {
          const cplx zm = 1.0 / z[j];
          const cplx c = 0.5 * (z[j] + zm);
          const cplx sn = (z[j] - zm) * inv2iku;
          const cplx v = pre * (c + i * md.kd * sn);
          out[j] = w * (fwd ? v : std::conj(v));
          if (derivs) {
            const cplx d = pre * (-md.ku * md.ku * sn + i * md.kd * c);
            out[m + j] = w * (fwd ? d : std::conj(d));
          }
        }
        break;
      }
      case Region::right: {
        phase_table(md.kd, xshift.data(), m, uniform, z.data());
        const cplx pre = 4.0 * u * md.eiku / md.dhat;
        for (std::size_t j = 0; j < m; ++j) {
          const cplx v = pre * z[j];
          out[j] = w * (fwd ? v : std::conj(v));
          if (derivs) {
            const cplx d = i * md.kd * v;
            out[m + j] = w * (fwd ? d : std::conj(d));
          }
        }
        break;
      }
    }
  };

  const auto res = integrate_spectral_batch(f, n, packet, side, tau, x_span, branch_energies(pot), quad);
  for (std::size_t j = 0; j < m; ++j) {
    psi[j] = res[j].value;
    err[j] = std::max(err[j], res[j].error_estimate);
    if (!res[j].converged) bad[j] = 1;
    if (derivs) {
      dpsi[j] = res[m + j].value;
      if (!res[m + j].converged) bad[j] = 1;
    }
  }
}

}  // namespace detail

/// Wave function on an (x, t) grid. Positions are grouped by region and
/// processed in chunks that share quadrature nodes; quadrature failures mark
/// the point as poisoned and the run continues.
inline WaveField evolve(const PacketSpec& packet, const PotentialSpec& pot, const std::vector<double>& x_grid,
                        const std::vector<double>& t_grid, const QuadratureSpec& quad,
                        const EvolveOptions& opt = {}) {
  packet.validate();
  pot.validate();
  quad.validate();
  for (double x : x_grid) {
    if (!std::isfinite(x)) throw DomainError("evolve: non-finite position");
  }
  for (double t : t_grid) {
    if (!std::isfinite(t) || t < packet.t0_tilde) throw DomainError("evolve: times must be finite and >= t0");
  }
  WaveField wf;
  wf.x_grid = x_grid;
  wf.t_grid = t_grid;
  const std::size_t nx = x_grid.size(), nt = t_grid.size();
  wf.psi_fwd.assign(nx * nt, {});
  wf.psi_bwd.assign(nx * nt, {});
  if (opt.derivatives) {
    wf.dpsi_fwd.assign(nx * nt, {});
    wf.dpsi_bwd.assign(nx * nt, {});
  }
  wf.density.assign(nx * nt, 0.0);
  wf.error_estimate.assign(nx * nt, 0.0);
  wf.poisoned.assign(nx * nt, 0);

  // group positions by region, keeping grid order inside each group
  std::array<std::vector<std::size_t>, 3> groups;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    const Region r = opt.force_region ? opt.region : region_of(x_grid[ix]);
    groups[static_cast<int>(r)].push_back(ix);
  }
  const std::size_t chunk = std::max<std::size_t>(1, opt.chunk_size);

  std::vector<double> xs;
  std::vector<cplx> psi, dpsi;
  std::vector<double> err;
  std::vector<char> bad;
  for (std::size_t it = 0; it < nt; ++it) {
    const double tau = t_grid[it] - packet.t0_tilde;
    for (int g = 0; g < 3; ++g) {
      const auto& idx = groups[g];
      for (std::size_t start = 0; start < idx.size(); start += chunk) {
        const std::size_t m = std::min(chunk, idx.size() - start);
        xs.resize(m);
        for (std::size_t j = 0; j < m; ++j) xs[j] = x_grid[idx[start + j]];
        for (SpectralSide side : {SpectralSide::forward, SpectralSide::backward}) {
          psi.assign(m, {});
          dpsi.assign(m, {});
          err.assign(m, 0.0);
          bad.assign(m, 0);
          detail::evolve_chunk(packet, pot, static_cast<Region>(g), xs.data(), m, tau, side, opt.derivatives, quad,
                               psi.data(), dpsi.data(), err.data(), bad.data());
          for (std::size_t j = 0; j < m; ++j) {
            const std::size_t k = wf.index(it, idx[start + j]);
            if (side == SpectralSide::forward) {
              wf.psi_fwd[k] = psi[j];
              if (opt.derivatives) wf.dpsi_fwd[k] = dpsi[j];
            } else {
              wf.psi_bwd[k] = psi[j];
              if (opt.derivatives) wf.dpsi_bwd[k] = dpsi[j];
            }
            wf.error_estimate[k] = std::max(wf.error_estimate[k], err[j]);
            if (bad[j]) wf.poisoned[k] = 1;
          }
        }
      }
    }
  }
  for (std::size_t k = 0; k < nx * nt; ++k) wf.density[k] = std::norm(wf.psi_fwd[k] + wf.psi_bwd[k]);
  return wf;
}

struct DensityDecomposition {
  std::vector<double> total, fwd, bwd, interference;
};

inline DensityDecomposition density(const WaveField& field) {
  DensityDecomposition d;
  const std::size_t n = field.psi_fwd.size();
  d.total.resize(n);
  d.fwd.resize(n);
  d.bwd.resize(n);
  d.interference.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx a = field.psi_fwd[k], b = field.psi_bwd[k];
    d.fwd[k] = std::norm(a);
    d.bwd[k] = std::norm(b);
    d.interference[k] = 2.0 * (a * std::conj(b)).real();
    d.total[k] = std::norm(a + b);
  }
  return d;
}

/// Long-time density of a narrowband packet: |scattering state|^2 at E_perp
/// (incident amplitude 1) times the packet peak density 1/(sqrt(2 pi) sigma).
inline double stationary_density(double x, double e_perp_tilde, const PotentialSpec& pot, double sigma) {
  pot.validate();
  if (!(e_perp_tilde > 0.0)) throw DomainError("stationary_density: E_perp must be positive");
  if (!(sigma > 0.0)) throw DomainError("stationary_density: sigma must be positive");
  double e = e_perp_tilde;
  if (e == pot.u_tilde || e == pot.delta_tilde) e = nudge_above(e);
  const detail::ModeData md = detail::mode_data(std::sqrt(e), pot);
  const cplx i(0.0, 1.0);
  cplx phi;
  switch (region_of(x)) {
    case Region::left:
      phi = std::exp(i * md.u * x) + md.r * std::exp(-i * md.u * x);
      break;
    case Region::inside: {
      cplx v, d;
      detail::mode_inside(md, x, v, d);
      phi = 0.5 * v;
      break;
    }
    case Region::right:
      phi = 2.0 * md.u * md.eiku * std::exp(i * md.kd * (x - 1.0)) / md.dhat;
      break;
  }
  return std::norm(phi) / (std::sqrt(2.0 * pi) * sigma);
}

struct ValidityReport {
  double localization_ratio = 0.0;  ///< |x_i| / (2 sigma)
  double narrowband_ratio = 0.0;    ///< E_perp sigma^2
  double cutoff_tail_mass = 0.0;    ///< initial probability on x > 0
  double backward_peak_ratio = 0.0; ///< |psi_<| / |psi_>| at E = E_perp
  bool localization_ok = false;
  bool narrowband_ok = false;
  bool quasiclassical() const { return localization_ok && narrowband_ok; }
};

inline ValidityReport validity_report(const PacketSpec& packet, double localization_min = 5.0,
                                      double narrowband_min = 10.0) {
  ValidityReport v;
  const double s = packet.sigma_tilde;
  v.localization_ratio = std::abs(packet.x_i_tilde) / (2.0 * s);
  v.narrowband_ratio = packet.e_perp_tilde * s * s;
  v.cutoff_tail_mass = 0.5 * std::erfc(std::abs(packet.x_i_tilde) / (std::sqrt(2.0) * s));
  v.backward_peak_ratio = std::exp(-4.0 * packet.e_perp_tilde * s * s);
  v.localization_ok = v.localization_ratio >= localization_min;
  v.narrowband_ok = v.narrowband_ratio >= narrowband_min;
  return v;
}

/// Closed-form free Gaussian packet (no potential), same normalization and
/// global phase as `evolve`.
inline cplx free_packet(double x, double t_tilde, const PacketSpec& packet) {
  const cplx i(0.0, 1.0);
  const double tau = t_tilde - packet.t0_tilde;
  const double s = packet.sigma_tilde;
  const double up = packet.u_perp();
  const double xi = packet.x_i_tilde;
  // psi(x,0) = (2 pi s^2)^{-1/4} exp(-(x-xi)^2/(4 s^2) + i up x); spreading with hbar = 1, m = 1/2
  const cplx a = s * s + i * tau;
  const cplx arg = -(x - xi - 2.0 * up * tau) * (x - xi - 2.0 * up * tau) / (4.0 * a) + i * up * (x - up * tau);
  return std::pow(2.0 * pi * s * s, -0.25) * std::sqrt(s * s / a) * std::exp(arg);
}

}  // namespace mstwave
