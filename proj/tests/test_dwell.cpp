#include <gtest/gtest.h>

#include <random>

#include "mstwave/dwell.hpp"

using namespace mstwave;

namespace {

// Symmetric barrier/well dwell time per unit energy, written in real
// arithmetic for the two regimes (over the top and tunnelling).
double symmetric_dwell(double e, double u) {
  const double k = std::sqrt(e);
  if (e > u) {
    const double q = std::sqrt(e - u);
    return (k / (2.0 * q)) * (2.0 * q * (q * q + k * k) - u * std::sin(2.0 * q)) /
           (4.0 * k * k * q * q + u * u * std::sin(q) * std::sin(q));
  }
  const double kap = std::sqrt(u - e);
  return (k / (2.0 * kap)) * (2.0 * kap * (kap * kap - k * k) + u * std::sinh(2.0 * kap)) /
         (4.0 * k * k * kap * kap + u * u * std::sinh(kap) * std::sinh(kap));
}

// Regime forms in real/complex-wave-number arithmetic, as printed for the
// two asymmetry regimes. `fixed` replaces (k + kb)^2 by k^2 + kb^2.
cplx regime_open(double e, double u, double d) {
  const cplx k = std::sqrt(cplx(e)), ku = wave_number(e, u).value, kd = std::sqrt(cplx(e - d));
  const cplx big = kd * kd - ku * ku, small = u;
  return k / (2.0 * ku) * (2.0 * ku * (ku * ku + kd * kd) - big * std::sin(2.0 * ku)) /
         ((k + kd) * (k + kd) * ku * ku + small * big * std::sin(ku) * std::sin(ku));
}
cplx regime_closed(double e, double u, double d, bool fixed) {
  const cplx k = std::sqrt(cplx(e)), ku = wave_number(e, u).value;
  const double kb = std::sqrt(d - e);
  const cplx big = kb * kb - ku * ku;
  const cplx lead = fixed ? (k * k + kb * kb) * ku * ku : (k + kb) * (k + kb) * ku * ku;
  return k / (2.0 * ku) *
         (2.0 * ku * (ku * ku + kb * kb) - big * std::sin(2.0 * ku) + 4.0 * ku * kb * std::sin(ku) * std::sin(ku)) /
         (lead + u * big * std::sin(ku) * std::sin(ku) + u * ku * kb * std::sin(2.0 * ku));
}

}  // namespace

TEST(DwellDensity, FreeIdentity) {
  for (double e : {0.01, 1.0, 17.3, 100.0, 2500.0}) {
    EXPECT_NEAR(dwell_energy_density(e, {0.0, 0.0}).t_of_E * 2.0 * std::sqrt(e), 1.0, 1e-12);
  }
}

TEST(DwellDensity, SymmetricReduction) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ud(-300.0, 300.0), ed(0.05, 400.0);
  for (int j = 0; j < 2000; ++j) {
    const double e = ed(rng), u = ud(rng);
    if (std::abs(e - u) < 1e-6) continue;
    const double a = dwell_energy_density(e, {u, 0.0}).t_of_E;
    ASSERT_NEAR(a / symmetric_dwell(e, u), 1.0, 1e-12) << e << " " << u;
  }
}

TEST(DwellDensity, NarrowbandValue) {
  const double rel = dwell_energy_density(100.0, {10.0, 0.0}).t_of_E * 20.0;
  EXPECT_NEAR(rel, 1.055, 5e-4);
}

TEST(DwellDensity, OpenChannelRegimeForm) {
  // above the right-hand level the printed regime form equals the master expression
  const double cases[][3] = {{100, 10, 50}, {4, 10, 0}, {30, -50, 20}, {5, 10, 3}, {70, 80, 60}};
  for (const auto& c : cases) {
    const double m = dwell_energy_density(c[0], {c[1], c[2]}).t_of_E;
    const cplx r = regime_open(c[0], c[1], c[2]);
    EXPECT_NEAR(r.real() / m, 1.0, 1e-12);
    EXPECT_NEAR(r.imag(), 0.0, 1e-12 * m);
  }
}

TEST(DwellDensity, ClosedChannelRegimeForm) {
  // below the right-hand level the master expression agrees with the regime
  // form only when the leading denominator term is |k + i kb|^2 ku^2; the
  // literal (k + kb)^2 ku^2 differs (kept here as a recorded discrepancy)
  const double cases[][3] = {{30, 10, 50}, {30, -100, 50}, {5, 10, 50}, {20, 30, 50}};
  for (const auto& c : cases) {
    const double m = dwell_energy_density(c[0], {c[1], c[2]}).t_of_E;
    EXPECT_NEAR(regime_closed(c[0], c[1], c[2], true).real() / m, 1.0, 1e-12);
    EXPECT_GT(std::abs(regime_closed(c[0], c[1], c[2], false).real() / m - 1.0), 1e-4);
  }
}

TEST(DwellDensity, ClosedEqualsBruteForce) {
  std::mt19937_64 rng(21);
  struct Regime {
    const char* name;
    double e_lo, e_hi, u, d;
  };
  const Regime regimes[] = {{"over both levels", 60.0, 400.0, 10.0, 50.0},
                            {"under barrier, open right", 2.0, 9.0, 10.0, 1.0},
                            {"over barrier, closed right", 12.0, 49.0, 10.0, 50.0},
                            {"under both", 1.0, 9.0, 30.0, 50.0},
                            {"well, closed right", 1.0, 49.0, -100.0, 50.0},
                            {"well, open", 1.0, 300.0, -100.0, 0.0}};
  for (const auto& rg : regimes) {
    std::uniform_real_distribution<double> ed(rg.e_lo, rg.e_hi);
    for (int j = 0; j < 20; ++j) {
      const double e = ed(rng);
      const auto a = dwell_energy_density(e, {rg.u, rg.d});
      const auto b = dwell_energy_density_numeric(e, {rg.u, rg.d});
      ASSERT_NEAR(a.t_of_E / b.t_of_E, 1.0, 1e-8) << rg.name << " E=" << e;
      ASSERT_LE(std::abs(a.interference_kernel - b.interference_kernel), 1e-8 * std::abs(a.interference_kernel))
          << rg.name << " E=" << e;
    }
  }
}

TEST(DwellDensity, BranchPointFlagged) {
  EXPECT_TRUE(dwell_energy_density(10.0, {10.0, 0.0}).branch_point);
  EXPECT_TRUE(std::isfinite(dwell_energy_density(10.0, {10.0, 0.0}).t_of_E));
}

TEST(DwellTotal, NarrowbandMatchesAsymptote) {
  PacketSpec pk;
  pk.sigma_tilde = 3.0;
  pk.x_i_tilde = -30.0;
  const auto d = dwell_total(pk, {10.0, 0.0}, {});
  EXPECT_TRUE(d.converged);
  EXPECT_NEAR(d.tau_total * 20.0 / 1.055, 1.0, 0.02);
  EXPECT_NEAR(d.tau_total, d.tau_fwd + d.tau_bwd + d.tau_interference, 1e-15);
  EXPECT_GE(d.tau_fwd, 0.0);
  EXPECT_GE(d.tau_bwd, 0.0);
  EXPECT_LT(d.closed_form_check, 1e-8);
}

TEST(DwellTotal, NarrowbandConvergenceIsMonotone) {
  const PotentialSpec pot{10.0, 0.0};
  const double target = relative_dwell_asymptotic(100.0, pot);
  double prev = 1e300;
  for (double s : {0.5, 1.0, 2.0, 3.0}) {
    PacketSpec pk;
    pk.sigma_tilde = s;
    pk.x_i_tilde = -10.0 * s;
    const double err = std::abs(dwell_total(pk, pot, {}).tau_total * 20.0 - target);
    EXPECT_LT(err, prev) << "sigma " << s;
    prev = err;
  }
}

TEST(DwellTotal, BroadbandNonForwardShare) {
  // sigma = 0.1: the non-forward part is no longer negligible; the cross term
  // stays below 1% of the forward part for a localized packet and falls off
  // with |x_i| (see the decisions notes)
  PacketSpec pk;
  pk.sigma_tilde = 0.1;
  const auto d = dwell_total(pk, {10.0, 0.0}, {});
  EXPECT_TRUE(d.converged);
  EXPECT_GT(d.tau_bwd / d.tau_fwd, 0.01);
  PacketSpec narrow;
  const auto n = dwell_total(narrow, {10.0, 0.0}, {});
  EXPECT_GT(std::abs(d.tau_interference), 1e6 * std::abs(n.tau_interference) + 1e-12);
  PacketSpec near = pk;
  near.x_i_tilde = -1.0;
  EXPECT_GT(std::abs(dwell_total(near, {10.0, 0.0}, {}).tau_interference), 10.0 * std::abs(d.tau_interference));
}

TEST(DwellAsymptotic, FreeIsOne) { EXPECT_NEAR(relative_dwell_asymptotic(100.0, {0.0, 0.0}), 1.0, 1e-14); }

TEST(DwellAsymptotic, MatchesEnergyDensity) {
  for (double u : {-500.0, -37.0, 10.0, 99.0, 101.0, 150.0}) {
    for (double d : {0.0, 40.0, 90.0}) {
      const double a = relative_dwell_asymptotic(100.0, {u, d});
      const double b = dwell_energy_density(100.0, {u, d}).t_of_E * 20.0;
      EXPECT_NEAR(a / b, 1.0, 1e-11) << u << " " << d;
    }
  }
}

TEST(DwellAsymptotic, TurningPointContinuity) {
  for (double d : {0.0, 50.0}) {
    const PotentialSpec at{100.0, d};
    const double mid = relative_dwell_asymptotic(100.0, at);
    const double below = relative_dwell_asymptotic(100.0, {100.0 - 1e-7, d});
    const double above = relative_dwell_asymptotic(100.0, {100.0 + 1e-7, d});
    EXPECT_NEAR(below / mid, 1.0, 1e-6);
    EXPECT_NEAR(above / mid, 1.0, 1e-6);
    const double lead = std::pow(10.0 + std::sqrt(100.0 - d), 2);
    const double limit = 400.0 * (1.0 + (100.0 - d) / 3.0) / (lead + 100.0 * (100.0 - d));
    EXPECT_NEAR(mid / limit, 1.0, 1e-12);
  }
}

TEST(DwellAsymptotic, ShortTurningPointFormIsNotTheLimit) {
  // 4E/(4E + U^2) drops the (U - Delta)/3 term of the limit; recorded, not adopted
  const double mid = relative_dwell_asymptotic(100.0, {100.0, 0.0});
  EXPECT_NEAR(mid, 1.3205128205128205, 1e-12);
  EXPECT_GT(std::abs(mid - 400.0 / (400.0 + 1e4)), 1.0);
}

TEST(DwellResonant, HalfForDeepWells) {
  for (int n = 23; n <= 60; ++n) {
    const double u = 100.0 - pi * pi * n * n;
    ASSERT_GE(pi * pi * n * n, 50.0 * 100.0);
    EXPECT_NEAR(relative_dwell_resonant(100.0, {u, 0.0}), 0.5, 0.5 * 0.02);
    EXPECT_NEAR(relative_dwell_resonant(100.0, {u, 0.0}) / relative_dwell_asymptotic(100.0, {u, 0.0}), 1.0, 1e-9);
  }
  EXPECT_NEAR(dwell_resonant(100.0, {100.0 - pi * pi * 900.0, 0.0}) * 20.0,
              relative_dwell_resonant(100.0, {100.0 - pi * pi * 900.0, 0.0}), 1e-14);
}

TEST(DwellResonant, NotResonantReportsNearest) {
  try {
    relative_dwell_resonant(100.0, {100.0 - pi * pi * 4.0 - 0.3, 0.0});
    FAIL() << "expected NotResonantError";
  } catch (const NotResonantError& e) {
    EXPECT_EQ(e.nearest_n(), 2);
  }
}

TEST(DwellResonant, AsymmetryRaisesWellPeaks) {
  for (int n = 4; n <= 14; ++n) {
    const double u = 100.0 - pi * pi * n * n;
    EXPECT_GT(relative_dwell_resonant(100.0, {u, 90.0}), relative_dwell_resonant(100.0, {u, 0.0}));
  }
}
