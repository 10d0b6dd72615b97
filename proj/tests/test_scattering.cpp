#include <gtest/gtest.h>

#include <random>

#include "mstwave/scattering.hpp"

using namespace mstwave;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

ChannelWaveNumber prop(double k) { return wave_number(k * k, 0.0); }

struct Draw {
  double e;
  PotentialSpec p;
};

// energies and potentials with every combination of regimes
std::vector<Draw> sweep(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(-300.0, 300.0), dd(0.0, 300.0), ed(1e-3, 500.0);
  std::vector<Draw> out;
  for (int j = 0; j < n; ++j) out.push_back({ed(rng), {ud(rng), dd(rng)}});
  return out;
}

}  // namespace

TEST(Step, EqualChannels) {
  const auto s = step_amplitudes(prop(3.0), prop(3.0));
  EXPECT_EQ(s.r_right, cplx(0.0));
  EXPECT_EQ(s.r_left, cplx(0.0));
  EXPECT_NEAR(std::abs(s.t - 1.0), 0.0, 1e-15);
}

TEST(Step, OneThree) {
  const auto s = step_amplitudes(prop(1.0), prop(3.0));
  EXPECT_NEAR(std::abs(s.r_right - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.r_left + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.t - std::sqrt(3.0) / 2.0), 0.0, 1e-15);
}

TEST(Step, PropagatingUnitarity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(1e-3, 50.0);
  for (int j = 0; j < 1000; ++j) {
    const auto s = step_amplitudes(prop(d(rng)), prop(d(rng)));
    ASSERT_NEAR(std::norm(s.r_left) + std::norm(s.t), 1.0, 1e-12);
    ASSERT_NEAR(std::abs(s.r_left + s.r_right), 0.0, 1e-15);
  }
}

TEST(Step, SingularSum) {
  ChannelWaveNumber z;  // both zero
  EXPECT_THROW(step_amplitudes(z, z), SingularStepError);
}

TEST(StepTMatrix, EqualChannels) {
  const KineticUnits units{1.0, 1.0};
  const auto t = step_t_matrices(prop(2.0), prop(2.0), units);
  EXPECT_NEAR(std::abs(t.t_refl_left), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t.t_refl_right), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(t.t_trans - cplx(0.0, 2.0)), 0.0, 1e-14);  // i hbar v with v = 2
}

TEST(StepTMatrix, OneThreeHandValue) {
  const KineticUnits units{1.0, 1.0};
  const auto t = step_t_matrices(prop(1.0), prop(3.0), units);
  EXPECT_NEAR(std::abs(t.t_refl_left - cplx(0.0, -0.5)), 0.0, 1e-14);
}

TEST(StepTMatrix, ResummedEqualsDirect) {
  const cplx i(0.0, 1.0);
  for (const auto& d : sweep(2000, 11)) {
    const auto a = wave_number(d.e, 0.0), b = wave_number(d.e, d.p.u_tilde);
    if (a.branch_point || b.branch_point) continue;
    const KineticUnits units;
    const auto amp = step_amplitudes(a, b);
    const auto t = step_t_matrices(a, b, units);
    const cplx va = units.velocity(a.value), vb = units.velocity(b.value);
    ASSERT_LT(rel(t.t_refl_right, i * vb * amp.r_right), 1e-12);
    ASSERT_LT(rel(t.t_refl_left, i * va * amp.r_left), 1e-12);
    ASSERT_LT(rel(t.t_trans, i * std::sqrt(va) * std::sqrt(vb) * amp.t), 1e-12);
  }
}

TEST(Compose, FreePhase) {
  const auto s = mst_compose(100.0, {0.0, 0.0});
  EXPECT_NEAR(std::abs(s.t - std::exp(cplx(0.0, 10.0))), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(s.r), 0.0, 1e-14);
}

TEST(Compose, EqualsClosedForm) {
  for (const auto& d : sweep(20000, 3)) {
    const auto a = closed_amplitudes(d.e, d.p), b = mst_compose(d.e, d.p);
    ASSERT_LT(rel(a.t, b.t), 1e-12) << d.e << " " << d.p.u_tilde << " " << d.p.delta_tilde;
    ASSERT_LT(rel(a.t_prime, b.t_prime), 1e-12);
    ASSERT_LT(rel(a.r_prime, b.r_prime), 1e-12);
    ASSERT_LT(rel(a.r, b.r), 1e-12);
    ASSERT_LT(rel(a.denom, b.denom), 1e-12);
  }
  for (double e : {100.0, 4.0}) {
    const PotentialSpec p = e == 100.0 ? PotentialSpec{10.0, 50.0} : PotentialSpec{10.0, 0.0};
    const auto a = closed_amplitudes(e, p), b = mst_compose(e, p);
    EXPECT_LT(rel(a.t, b.t), 1e-12);
    EXPECT_LT(rel(a.r, b.r), 1e-12);
  }
}

TEST(Compose, BranchEnergiesFlagged) {
  const PotentialSpec p{10.0, 50.0};
  for (double e : {10.0, 50.0}) {
    const auto a = closed_amplitudes(e, p), b = mst_compose(e, p);
    EXPECT_TRUE(a.branch_point);
    EXPECT_TRUE(b.branch_point);
    EXPECT_LT(rel(a.t, b.t), 1e-9);
  }
  // E = U: smooth in the well wave number, limit from above is continuous
  const auto a = closed_amplitudes(10.0, p), c = closed_amplitudes(10.0 * (1.0 + 1e-9), p);
  EXPECT_LT(rel(a.t, c.t), 1e-6);
  // E = delta: transmission closes like (E - delta)^(1/4), reflection tends to -1
  const double d1 = 1e-6, d2 = 1.6e-5;
  const auto s1 = closed_amplitudes(50.0 + d1, p), s2 = closed_amplitudes(50.0 + d2, p);
  EXPECT_NEAR(std::abs(s2.t) / std::abs(s1.t), 2.0, 1e-2);
  EXPECT_LT(std::abs(closed_amplitudes(50.0, p).t), 1e-2);
  EXPECT_NEAR(std::abs(closed_amplitudes(50.0, p).r), 1.0, 1e-6);
}

TEST(Closed, ResonanceTransmission) {
  const double e = 10.0 + pi * pi;
  EXPECT_NEAR(e, 19.8696, 1e-4);
  const auto s = closed_amplitudes(e, {10.0, 0.0});
  EXPECT_NEAR(std::norm(s.t), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(s.r), 0.0, 1e-7);
}

TEST(Closed, OverBarrierAsymmetric) {
  const auto p = probabilities(100.0, {10.0, 50.0});
  EXPECT_NEAR(p.T_prob, 0.9706, 5e-5);
  EXPECT_NEAR(p.R_prob, 0.02938, 5e-5);
  EXPECT_NEAR(p.T_prob + p.R_prob, 1.0, 1e-12);
}

TEST(Closed, Tunnelling) {
  EXPECT_NEAR(probabilities(4.0, {10.0, 0.0}).T_prob, 0.02823, 5e-5);
}

TEST(Closed, SinhFormUnderBarrier) {
  // Delta = 0, E < U: |t|^2 = 1 / (1 + U^2 sinh^2(kappa) / (4 E (U - E)))
  for (double e : {1.0, 4.0, 9.5}) {
    const double u = 10.0, kap = std::sqrt(u - e);
    const double ref = 1.0 / (1.0 + u * u * std::sinh(kap) * std::sinh(kap) / (4.0 * e * (u - e)));
    EXPECT_NEAR(probabilities(e, {u, 0.0}).T_prob / ref, 1.0, 1e-12);
  }
}

TEST(Probabilities, ClosedChannel) {
  for (double u : {-50.0, 0.0, 10.0, 80.0}) {
    const auto p = probabilities(30.0, {u, 50.0});
    EXPECT_EQ(p.T_prob, 0.0);
    EXPECT_EQ(p.R_prob, 1.0);
    EXPECT_NEAR(std::abs(closed_amplitudes(30.0, {u, 50.0}).r), 1.0, 1e-12);
  }
}

TEST(Probabilities, SymmetricResonance) {
  for (int n = 2; n <= 6; ++n) {
    const auto p = probabilities(-30.0 + pi * pi * n * n + 0.0, {-30.0, 0.0});
    EXPECT_NEAR(p.T_prob, 1.0, 1e-12);
    EXPECT_NEAR(p.R_prob, 0.0, 1e-12);
  }
}

TEST(Invariants, UnitarityAndDenominator) {
  double min_den = 1e300;
  for (const auto& d : sweep(20000, 17)) {
    const auto s = closed_amplitudes(d.e, d.p);
    min_den = std::min(min_den, std::abs(s.denom));
    if (d.e > std::max({d.p.delta_tilde, d.p.u_tilde, 0.0})) {
      ASSERT_NEAR(std::norm(s.t) + std::norm(s.r), 1.0, 1e-12);
    } else if (d.e < d.p.delta_tilde) {
      ASSERT_NEAR(std::abs(s.r), 1.0, 1e-12);
    }
  }
  EXPECT_GT(min_den, 0.0);
}

TEST(Invariants, AsymmetryKillsResonance) {
  for (int n = 1; n <= 4; ++n) {
    const double e = 10.0 + pi * pi * n * n;
    EXPECT_GT(std::abs(closed_amplitudes(e, {10.0, 5.0}).r), 0.0);
  }
}

TEST(Closed, RejectsNonPositiveEnergy) {
  EXPECT_THROW(closed_amplitudes(0.0, {}), DomainError);
  EXPECT_THROW(mst_compose(-1.0, {}), DomainError);
}
