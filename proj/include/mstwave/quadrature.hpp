#pragma once

// Adaptive Gauss-Kronrod panels for the semi-infinite spectral integrals.
//
// Integrals over energy are carried out in u = sqrt(E). Panels start from a
// phase-capped partition of the window, split exactly at branch points, and
// are bisected adaptively with the embedded 10-point Gauss estimate. The
// integrand may be vector valued: all components share the nodes, each has
// its own error estimate and convergence flag.

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mstwave/core_model.hpp"
#include "mstwave/errors.hpp"
#include "mstwave/packet.hpp"

namespace mstwave {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double window_w = 8.0;
  long max_panels = 100000;
  double phase_per_panel = pi;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("quad.rel_tol must lie in (0, 1)");
    if (!(abs_tol > 0.0)) throw ConfigError("quad.abs_tol must be positive");
    if (!(window_w > 0.0)) throw ConfigError("quad.window_w must be positive");
    if (max_panels < 1) throw ConfigError("quad.max_panels must be positive");
    if (!(phase_per_panel > 0.0)) throw ConfigError("quad.phase_per_panel must be positive");
  }
};

struct QuadResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long panels_used = 0;
  bool converged = false;
};

enum class SpectralSide { forward, backward };

struct Panel {
  double a = 0.0;
  double b = 0.0;
};

namespace detail {

struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct GK21 {
  std::array<double, 21> x{};   // nodes on [-1, 1]
  std::array<double, 21> wk{};  // Kronrod weights
  std::array<double, 21> wg{};  // Gauss weights (0 off the Gauss nodes)

  GK21() {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto& ka = gauss_kronrod<double, 21>::abscissa();
    const auto& kw = gauss_kronrod<double, 21>::weights();
    const auto& gw = gauss<double, 10>::weights();
    std::size_t j = 0;
    for (std::size_t i = ka.size(); i-- > 1;) {
      x[j] = -ka[i];
      wk[j] = kw[i];
      wg[j] = (i % 2 == 1) ? gw[(i - 1) / 2] : 0.0;
      ++j;
    }
    for (std::size_t i = 0; i < ka.size(); ++i) {
      x[j] = ka[i];
      wk[j] = kw[i];
      wg[j] = (i % 2 == 1) ? gw[(i - 1) / 2] : 0.0;
      ++j;
    }
  }

  static const GK21& get() {
    static const GK21 rule;
    return rule;
  }
};

}  // namespace detail

/// Partition [a, b] at the given cut points, then subdivide each piece so
/// that |d(u^2)| t + |du| x_span stays below `phase_cap` on every panel.
inline std::vector<Panel> phase_capped_panels(double a, double b, std::vector<double> cuts, double t, double x_span,
                                              double phase_cap) {
  std::vector<Panel> out;
  if (!(b > a)) return out;
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> edges{a};
  for (double c : cuts) {
    if (c > a && c < b && c > edges.back()) edges.push_back(c);
  }
  edges.push_back(b);
  t = std::abs(t);
  x_span = std::abs(x_span);
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    double lo = edges[s];
    const double hi = edges[s + 1];
    while (lo < hi) {
      double next = hi;
      if (t > 0.0) {
        const double q = x_span * x_span + 4.0 * t * (t * lo * lo + x_span * lo + phase_cap);
        next = (-x_span + std::sqrt(q)) / (2.0 * t);
      } else if (x_span > 0.0) {
        next = lo + phase_cap / x_span;
      }
      // avoid a sliver at the end of the piece
      if (next >= hi || hi - next < 1e-3 * (next - lo)) next = hi;
      out.push_back({lo, next});
      lo = next;
    }
  }
  return out;
}

/// Adaptive vector-valued integration over an initial panel list.
/// `f(u, out)` writes n complex values for abscissa u.
template <class F>
std::vector<QuadResult> integrate_panels(F&& f, std::size_t n, std::vector<Panel> panels, const QuadratureSpec& spec) {
  const auto& rule = detail::GK21::get();
  std::vector<QuadResult> results(n);
  if (n == 0) return results;
  if (panels.empty()) {
    for (auto& r : results) r.converged = true;
    return results;
  }

  std::vector<Panel> geom;
  std::vector<cplx> val;    // geom.size() * n
  std::vector<double> err;  // geom.size() * n
  std::vector<cplx> fx(n);
  std::vector<cplx> kron(n), gaus(n);

  auto evaluate = [&](const Panel& p) {
    const double half = 0.5 * (p.b - p.a);
    const double mid = 0.5 * (p.a + p.b);
    std::fill(kron.begin(), kron.end(), cplx(0.0, 0.0));
    std::fill(gaus.begin(), gaus.end(), cplx(0.0, 0.0));
    for (std::size_t j = 0; j < 21; ++j) {
      f(mid + half * rule.x[j], fx.data());
      const double wk = rule.wk[j] * half;
      const double wg = rule.wg[j] * half;
      for (std::size_t c = 0; c < n; ++c) {
        kron[c] += wk * fx[c];
        if (wg != 0.0) gaus[c] += wg * fx[c];
      }
    }
    geom.push_back(p);
    for (std::size_t c = 0; c < n; ++c) {
      val.push_back(kron[c]);
      const double e = std::abs(kron[c] - gaus[c]);
      err.push_back(std::isfinite(e) ? e : std::numeric_limits<double>::infinity());
    }
  };

  for (const auto& p : panels) evaluate(p);
  std::vector<std::size_t> active(geom.size());
  std::iota(active.begin(), active.end(), 0);

  const double total_len = panels.back().b - panels.front().a;
  std::vector<double> tol(n), err_total(n);
  std::vector<char> open(n);

  for (;;) {
    std::sort(active.begin(), active.end(), [&](std::size_t x, std::size_t y) { return geom[x].a < geom[y].a; });
    bool all_ok = true;
    for (std::size_t c = 0; c < n; ++c) {
      detail::NeumaierSum re, im;
      double e = 0.0;
      for (std::size_t id : active) {
        re.add(val[id * n + c].real());
        im.add(val[id * n + c].imag());
        e += err[id * n + c];
      }
      results[c].value = cplx(re.value(), im.value());
      err_total[c] = e;
      tol[c] = std::max(spec.rel_tol * std::abs(results[c].value), spec.abs_tol);
      open[c] = !(e <= tol[c]);
      if (open[c]) all_ok = false;
    }
    if (all_ok) break;

    const long budget = spec.max_panels - static_cast<long>(active.size());
    if (budget <= 0) break;

    struct Candidate {
      double score;
      double a;
      std::size_t pos;
    };
    std::vector<Candidate> cand;
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
      const std::size_t id = active[pos];
      const Panel& p = geom[id];
      const double len = p.b - p.a;
      if (len <= 1e-13 * std::max(1.0, std::abs(p.a))) continue;
      double score = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (!open[c]) continue;
        const double share = tol[c] * len / total_len;
        score = std::max(score, err[id * n + c] / share);
      }
      if (score > 1.0) cand.push_back({score, p.a, pos});
    }
    if (cand.empty()) break;
    std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
      if (x.score != y.score) return x.score > y.score;
      return x.a < y.a;
    });
    if (static_cast<long>(cand.size()) > budget) cand.resize(static_cast<std::size_t>(budget));

    std::vector<char> drop(active.size(), 0);
    std::vector<std::size_t> added;
    for (const auto& cd : cand) {
      const Panel p = geom[active[cd.pos]];
      const double m = 0.5 * (p.a + p.b);
      drop[cd.pos] = 1;
      added.push_back(geom.size());
      evaluate({p.a, m});
      added.push_back(geom.size());
      evaluate({m, p.b});
    }
    std::vector<std::size_t> next;
    next.reserve(active.size() + added.size());
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
      if (!drop[pos]) next.push_back(active[pos]);
    }
    next.insert(next.end(), added.begin(), added.end());
    active.swap(next);
  }

  for (std::size_t c = 0; c < n; ++c) {
    results[c].error_estimate = err_total[c];
    results[c].panels_used = static_cast<long>(active.size());
    results[c].converged = err_total[c] <= tol[c];
  }
  return results;
}

/// Gaussian truncation window in u for the forward or backward weight.
inline Panel spectral_window(const PacketSpec& packet, SpectralSide side, double window_w) {
  const double up = packet.u_perp();
  const double half = window_w / packet.sigma_tilde;
  if (side == SpectralSide::forward) return {std::max(0.0, up - half), up + half};
  return {0.0, half + up};
}

/// Branch energies mapped to u = sqrt(E); non-positive energies are dropped.
inline std::vector<double> branch_cuts_u(const std::vector<double>& branch_energies) {
  std::vector<double> cuts;
  for (double e : branch_energies) {
    if (e > 0.0) cuts.push_back(std::sqrt(e));
  }
  return cuts;
}

/// Vector-valued spectral integral with the integrand already written in u
/// (Jacobian included).
template <class F>
std::vector<QuadResult> integrate_spectral_batch(F&& f_u, std::size_t n, const PacketSpec& packet, SpectralSide side,
                                                 double t_tilde, double x_span,
                                                 const std::vector<double>& branch_energies,
                                                 const QuadratureSpec& spec) {
  spec.validate();
  const Panel w = spectral_window(packet, side, spec.window_w);
  auto panels = phase_capped_panels(w.a, w.b, branch_cuts_u(branch_energies), t_tilde, x_span, spec.phase_per_panel);
  return integrate_panels(std::forward<F>(f_u), n, std::move(panels), spec);
}

/// Scalar integral over E in (0, inf) of f(E), whose Gaussian weight selects
/// the window through `side`.
inline QuadResult integrate_spectral(const std::function<cplx(double)>& f, const PacketSpec& packet,
                                     double t_tilde, double x_span, const std::vector<double>& branch_energies,
                                     const QuadratureSpec& spec, SpectralSide side = SpectralSide::forward) {
  auto g = [&](double u, cplx* out) { out[0] = 2.0 * u * f(u * u); };
  return integrate_spectral_batch(g, 1, packet, side, t_tilde, x_span, branch_energies, spec).front();
}

/// Tail integral of A(u) exp(i(beta u - tau u^2)) over [c, inf) by three
/// terms of integration by parts. A must be smooth and slowly varying and
/// the phase must have no stationary point beyond c.
inline cplx fresnel_tail(const std::function<cplx(double)>& amplitude, double beta, double tau, double c) {
  const cplx i(0.0, 1.0);
  auto dphi = [&](double u) { return beta - 2.0 * tau * u; };
  const double d2phi = -2.0 * tau;
  auto b0 = [&](double u) { return amplitude(u) / (i * dphi(u)); };

  const double h = 1e-3 * std::max(1.0, c);
  const cplx fm2 = b0(c - 2 * h), fm1 = b0(c - h), f0 = b0(c), fp1 = b0(c + h), fp2 = b0(c + 2 * h);
  const cplx d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  const cplx d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);

  const cplx p1 = dphi(c);
  const cplx b1 = d1 / (i * p1);
  // derivative of b1 = b0' / (i phi')
  const cplx b1p = d2 / (i * p1) - d1 * d2phi / (i * p1 * p1);
  const cplx b2 = b1p / (i * p1);
  const double phase = beta * c - tau * c * c;
  return -std::exp(i * phase) * (f0 - b1 + b2);
}

}  // namespace mstwave
