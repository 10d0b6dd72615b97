#pragma once

// Region-wise retarded Green functions of the two-step potential and the
// space-time propagator built from their spectral density.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "mstwave/core_model.hpp"
#include "mstwave/errors.hpp"
#include "mstwave/quadrature.hpp"
#include "mstwave/scattering.hpp"

namespace mstwave {

enum class Region { left, inside, right };

/// Interfaces belong to the inner region.
inline Region region_of(double x) {
  if (x < 0.0) return Region::left;
  if (x <= 1.0) return Region::inside;
  return Region::right;
}

inline const char* region_name(Region r) {
  switch (r) {
    case Region::left: return "left";
    case Region::inside: return "inside";
    case Region::right: return "right";
  }
  return "?";
}

struct RegionPair {
  Region source_region;
  Region dest_region;
};

/// Source regions use open intervals; an interface point is not a valid source.
inline Region source_region_of(double x_src) {
  if (x_src < 0.0) return Region::left;
  if (x_src > 0.0 && x_src < 1.0) return Region::inside;
  if (x_src > 1.0) return Region::right;
  throw UnsupportedRegionError("source point on an interface");
}

/// Free Green function in a region of constant level v: exp(ik|x-x'|)/(2ik).
inline cplx green_free(double x, double x_src, double e_tilde, double v_tilde) {
  if (!(e_tilde > 0.0)) throw DomainError("green_free: energy must be positive");
  const ChannelWaveNumber k = wave_number(e_tilde, v_tilde);
  if (k.branch_point) throw DomainError("green_free: k = 0 is singular");
  const cplx i(0.0, 1.0);
  return std::exp(i * k.value * std::abs(x - x_src)) / (2.0 * i * k.value);
}

inline bool region_pair_supported(RegionPair p) {
  if (p.source_region == Region::left) return true;
  return p.dest_region == Region::left;
}

/// Green function evaluated with the formula of `dest` regardless of where x
/// lies; used to compare one-sided limits at the interfaces.
inline cplx green_in_region(Region dest, double x, double x_src, double e_tilde, const PotentialSpec& pot) {
  const Region src = source_region_of(x_src);
  if (!region_pair_supported({src, dest})) {
    throw UnsupportedRegionError(std::string("no Green function for source ") + region_name(src) + " and destination " +
                                 region_name(dest));
  }
  const ScatteringSet s = closed_amplitudes(e_tilde, pot);
  const cplx i(0.0, 1.0);
  const cplx k = s.k.value, ku = s.k_u.value, kd = s.k_delta.value;
  const cplx sk = sqrt_wave(k), sku = sqrt_wave(ku), skd = sqrt_wave(kd);

  if (src == Region::left) {
    switch (dest) {
      case Region::left:
        return (std::exp(i * k * std::abs(x - x_src)) + s.r * std::exp(-i * k * (x + x_src))) / (2.0 * i * k);
      case Region::inside:
        return (std::exp(i * ku * x) * s.t_prime + std::exp(-i * ku * x) * s.r_prime) * std::exp(-i * k * x_src) /
               (2.0 * i * sk * sku);
      case Region::right:
        return std::exp(i * kd * (x - 1.0)) * s.t * std::exp(-i * k * x_src) / (2.0 * i * sk * skd);
    }
  }
  if (src == Region::inside) {
    return std::exp(-i * k * x) * (s.t_prime * std::exp(i * ku * x_src) + s.r_prime * std::exp(-i * ku * x_src)) /
           (2.0 * i * sk * sku);
  }
  return std::exp(-i * k * x) * s.t * std::exp(i * kd * (x_src - 1.0)) / (2.0 * i * sk * skd);
}

inline cplx green_region(double x, double x_src, double e_tilde, const PotentialSpec& pot) {
  return green_in_region(region_of(x), x, x_src, e_tilde, pot);
}

struct PropagatorSample {
  double x = 0.0;
  double t = 0.0;
  double x_src = 0.0;
  double t_src = 0.0;
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long panels_used = 0;
};

/// Which part of the x < 0 kernel to evaluate.
enum class KernelPart { full, direct, reflected };

namespace detail {

// One term A(u) exp(i beta u) of the large-energy expansion of G(x, x'; u^2).
// The phase of the term is alpha_k k + alpha_u k_u + alpha_d k_delta; beta is
// the sum of the three coefficients and A absorbs the slowly varying rest.
struct GreenTerm {
  cplx coef;
  double alpha_k = 0.0, alpha_u = 0.0, alpha_d = 0.0;
  double beta() const { return alpha_k + alpha_u + alpha_d; }
};

// Multiple-reflection expansion of the Green function, valid when every
// channel propagates. `orders` reflections inside the inner region are kept.
inline std::vector<GreenTerm> green_terms(Region dest, double x, double x_src, double u, const PotentialSpec& pot,
                                          int orders, KernelPart part) {
  const cplx i(0.0, 1.0);
  const double k = u;
  const double ku = std::sqrt(u * u - pot.u_tilde);
  const double kd = std::sqrt(u * u - pot.delta_tilde);
  const double a = (k - ku) / (k + ku);
  const double b = (kd - ku) / (kd + ku);
  const double ab = a * b;
  std::vector<GreenTerm> terms;
  switch (dest) {
    case Region::left: {
      const cplx pre = 1.0 / (2.0 * i * k);
      if (part != KernelPart::reflected) terms.push_back({pre, std::abs(x - x_src), 0.0, 0.0});
      if (part != KernelPart::direct) {
        const double s = -(x + x_src);
        double w = 1.0;
        for (int n = 0; n < orders; ++n) {
          terms.push_back({pre * a * w, s, 2.0 * n, 0.0});
          terms.push_back({-pre * b * w, s, 2.0 * n + 2.0, 0.0});
          w *= ab;
        }
      }
      break;
    }
    case Region::inside: {
      const cplx pre = 1.0 / (2.0 * i * std::sqrt(k * ku)) * (2.0 * std::sqrt(k * ku) / (k + ku));
      double w = 1.0;
      for (int n = 0; n < orders; ++n) {
        terms.push_back({pre * w, -x_src, 2.0 * n + x, 0.0});
        terms.push_back({-pre * b * w, -x_src, 2.0 * n + 2.0 - x, 0.0});
        w *= ab;
      }
      break;
    }
    case Region::right: {
      const double t0 = 4.0 * std::sqrt(k * kd) * ku / ((k + ku) * (kd + ku));
      const cplx pre = t0 / (2.0 * i * std::sqrt(k * kd));
      double w = 1.0;
      for (int n = 0; n < orders; ++n) {
        terms.push_back({pre * w, -x_src, 2.0 * n + 1.0, x - 1.0});
        w *= ab;
      }
      break;
    }
  }
  return terms;
}

inline cplx term_amplitude(const GreenTerm& g, double u, const PotentialSpec& pot) {
  const cplx i(0.0, 1.0);
  const double ku = std::sqrt(u * u - pot.u_tilde);
  const double kd = std::sqrt(u * u - pot.delta_tilde);
  return g.coef * std::exp(i * (g.alpha_u * (ku - u) + g.alpha_d * (kd - u)));
}

inline cplx kernel_green(Region dest, double x, double x_src, double e, const PotentialSpec& pot, KernelPart part) {
  if (part == KernelPart::full) return green_in_region(dest, x, x_src, e, pot);
  const cplx i(0.0, 1.0);
  const double k = std::sqrt(e);
  if (part == KernelPart::direct) return std::exp(i * k * std::abs(x - x_src)) / (2.0 * i * k);
  const ScatteringSet s = closed_amplitudes(e, pot);
  return s.r * std::exp(-i * k * (x + x_src)) / (2.0 * i * k);
}

}  // namespace detail

/// K(x, t; x', t0) for a source x' < 0: -(1/pi) times the energy integral of
/// exp(-iE(t - t0)) Im G(x, x'; E) over E > 0. The finite part runs over
/// adaptive panels up to a cutoff beyond every stationary point; the rest is
/// summed analytically term by term from the multiple-reflection expansion.
inline PropagatorSample propagate_kernel(double x, double t, double x_src, double t_src, const PotentialSpec& pot,
                                         const QuadratureSpec& quad, KernelPart part = KernelPart::full) {
  pot.validate();
  quad.validate();
  PropagatorSample out{x, t, x_src, t_src, {0.0, 0.0}, 0.0, 0};
  if (!(t > t_src)) return out;
  if (!(x_src < 0.0)) throw UnsupportedRegionError("propagate_kernel: only sources with x' < 0 are supported");
  const Region dest = region_of(x);
  if (part != KernelPart::full && dest != Region::left) {
    throw UnsupportedRegionError("propagate_kernel: direct/reflected split exists only for x < 0");
  }
  const double tau = t - t_src;
  const cplx i(0.0, 1.0);

  const double vmax = std::max({pot.u_tilde, pot.delta_tilde, 0.0});
  int orders = 1;
  {
    // enough inner reflections for the expansion to converge at the cutoff
    const double c0 = 2.0 * std::sqrt(vmax) + 2.0;
    const double ku = std::sqrt(c0 * c0 - pot.u_tilde), kd = std::sqrt(c0 * c0 - pot.delta_tilde);
    const double ab = std::abs((c0 - ku) / (c0 + ku) * (kd - ku) / (kd + ku));
    double w = 1.0;
    while (w > 1e-18 && orders < 64) {
      w *= std::max(ab, 1e-300);
      ++orders;
    }
  }
  const auto probe = detail::green_terms(dest, x, x_src, 1.0 + 2.0 * std::sqrt(vmax) + 2.0, pot, orders, part);
  double beta_max = 0.0;
  for (const auto& g : probe) beta_max = std::max(beta_max, std::abs(g.beta()));

  const double cut = std::max({2.0 * std::sqrt(vmax) + 2.0, (beta_max + std::sqrt(2000.0 * tau)) / (2.0 * tau),
                               std::sqrt(1000.0 / tau)});

  auto integrand = [&](double u, cplx* o) {
    const cplx g = detail::kernel_green(dest, x, x_src, u * u, pot, part);
    o[0] = -(2.0 * u / pi) * std::exp(-i * u * u * tau) * g.imag();
  };
  std::vector<double> branch;
  if (pot.u_tilde > 0.0) branch.push_back(pot.u_tilde);
  if (pot.delta_tilde > 0.0) branch.push_back(pot.delta_tilde);
  auto panels = phase_capped_panels(0.0, cut, branch_cuts_u(branch), tau, beta_max, quad.phase_per_panel);
  const QuadResult finite = integrate_panels(integrand, 1, std::move(panels), quad).front();
  if (!finite.converged) {
    throw QuadratureError("propagate_kernel: quadrature did not converge", std::abs(finite.value),
                          finite.error_estimate);
  }

  // tail: -(2u/pi) Im(A e^{i beta u}) e^{-i tau u^2}, split into the two exponentials
  cplx tail(0.0, 0.0);
  const auto terms = detail::green_terms(dest, x, x_src, cut, pot, orders, part);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double beta = terms[j].beta();
    auto plus = [&, j](double u) {
      const auto tj = detail::green_terms(dest, x, x_src, u, pot, orders, part)[j];
      return -(2.0 * u / pi) * detail::term_amplitude(tj, u, pot) / (2.0 * i);
    };
    auto minus = [&, j](double u) {
      const auto tj = detail::green_terms(dest, x, x_src, u, pot, orders, part)[j];
      return (2.0 * u / pi) * std::conj(detail::term_amplitude(tj, u, pot)) / (2.0 * i);
    };
    tail += fresnel_tail(plus, beta, tau, cut);
    tail += fresnel_tail(minus, -beta, tau, cut);
  }
  out.value = finite.value + tail;
  out.error_estimate = finite.error_estimate;
  out.panels_used = finite.panels_used;
  return out;
}

/// Closed-form one-dimensional free propagator sqrt(1/(4 pi i tau)) exp(i a^2 / (4 tau)).
inline cplx free_propagator(double x, double t, double x_src, double t_src) {
  if (!(t > t_src)) return {0.0, 0.0};
  const double tau = t - t_src;
  const cplx i(0.0, 1.0);
  const double a = x - x_src;
  return std::sqrt(1.0 / (4.0 * pi * i * tau)) * std::exp(i * a * a / (4.0 * tau));
}

}  // namespace mstwave
