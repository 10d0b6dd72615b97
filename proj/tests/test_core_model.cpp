#include <gtest/gtest.h>

#include <random>

#include "mstwave/core_model.hpp"

using namespace mstwave;

TEST(Scales, NanometreElectron) {
  const auto s = make_scales(1e-9, constants::electron_mass);
  const double e_ev = s.E_d / constants::electron_volt;
  EXPECT_NEAR(e_ev, 0.0381, 0.001);  // ~3e-2 eV
  EXPECT_GT(s.t_d, 1e-14);
  EXPECT_LT(s.t_d, 3e-14);  // ~2e-14 s
}

TEST(Scales, ProductIsHbar) {
  for (double d : {1e-10, 1e-9, 3.7e-8}) {
    for (double m : {constants::electron_mass, 0.067 * constants::electron_mass}) {
      const auto s = make_scales(d, m);
      EXPECT_NEAR(s.E_d * s.t_d / constants::hbar, 1.0, 1e-15);
    }
  }
}

TEST(Scales, InverseSquareWidth) {
  const auto a = make_scales(1e-9, constants::electron_mass);
  const auto b = make_scales(2e-9, constants::electron_mass);
  EXPECT_NEAR(b.E_d / a.E_d, 0.25, 1e-15);
}

TEST(Scales, RejectsNonPositive) {
  EXPECT_THROW(make_scales(0.0, 1.0), DomainError);
  EXPECT_THROW(make_scales(1e-9, -1.0), DomainError);
}

TEST(Potential, Validation) {
  EXPECT_NO_THROW((PotentialSpec{-100.0, 0.0}.validate()));
  EXPECT_THROW((PotentialSpec{10.0, -1.0}.validate()), DomainError);
  EXPECT_THROW((PotentialSpec{std::nan(""), 0.0}.validate()), DomainError);
  const PotentialSpec p{10.0, 50.0};
  EXPECT_EQ(p.level_at(-1.0), 0.0);
  EXPECT_EQ(p.level_at(0.5), 10.0);
  EXPECT_EQ(p.level_at(2.0), 50.0);
}

TEST(WaveNumber, Examples) {
  auto a = wave_number(100.0, 0.0);
  EXPECT_EQ(a.kind, ChannelKind::propagating);
  EXPECT_NEAR(std::abs(a.value - cplx(10.0, 0.0)), 0.0, 1e-14);

  auto b = wave_number(4.0, 104.0);
  EXPECT_EQ(b.kind, ChannelKind::evanescent);
  EXPECT_NEAR(std::abs(b.value - cplx(0.0, 10.0)), 0.0, 1e-14);

  auto c = wave_number(100.0, 110.0);
  EXPECT_EQ(c.kind, ChannelKind::evanescent);
  EXPECT_NEAR(c.value.imag(), 3.16227766016838, 1e-12);
  EXPECT_EQ(c.value.real(), 0.0);
}

TEST(WaveNumber, BranchPoint) {
  auto k = wave_number(10.0, 10.0);
  EXPECT_TRUE(k.branch_point);
  EXPECT_EQ(k.kind, ChannelKind::evanescent);
  EXPECT_EQ(k.value, cplx(0.0, 0.0));
}

TEST(WaveNumber, RandomSweepSquareAndBranch) {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int n = 0; n < 1000000; ++n) {
    const double e = d(rng), v = d(rng);
    const auto k = wave_number(e, v);
    ASSERT_GE(k.value.imag(), 0.0);
    if (n % 10 == 0) {
      const cplx sq = k.value * k.value;
      ASSERT_NEAR(sq.real(), e - v, 4e-16 * std::max(1.0, std::abs(e - v)) * 4);
      ASSERT_EQ(sq.imag(), 0.0);
    }
    if (k.kind == ChannelKind::propagating) {
      ASSERT_GT(k.value.real(), 0.0);
      ASSERT_EQ(k.value.imag(), 0.0);
    } else {
      ASSERT_EQ(k.value.real(), 0.0);
    }
  }
}

TEST(WaveNumber, ContinuousThroughThreshold) {
  for (double eps : {1e-2, 1e-6, 1e-10}) {
    const auto above = wave_number(5.0 + eps, 5.0), below = wave_number(5.0 - eps, 5.0);
    EXPECT_LT(std::abs(above.value - below.value), 3.0 * std::sqrt(eps));
  }
}

TEST(WaveNumber, NonFiniteRejected) { EXPECT_THROW(wave_number(std::nan(""), 0.0), DomainError); }
