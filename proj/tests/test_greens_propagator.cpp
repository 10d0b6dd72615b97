#include <gtest/gtest.h>

#include "mstwave/greens.hpp"

using namespace mstwave;

namespace {
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }
}  // namespace

TEST(FreeGreen, Coincident) {
  const cplx g = green_free(0.3, 0.3, 100.0, 0.0);
  EXPECT_EQ(g.real(), 0.0);
  EXPECT_NEAR(std::abs(g), 1.0 / 20.0, 1e-15);
}

TEST(FreeGreen, EvanescentDecay) {
  const cplx a = green_free(0.0, 1.0, 10.0, 110.0), b = green_free(0.0, 2.0, 10.0, 110.0);
  EXPECT_NEAR(a.imag(), 0.0, 1e-15);
  EXPECT_NEAR(b.imag(), 0.0, 1e-15);
  EXPECT_NEAR(b.real() / a.real(), std::exp(-10.0), 1e-14);
}

TEST(FreeGreen, Reciprocity) {
  EXPECT_EQ(green_free(-1.5, 0.7, 33.0, 4.0), green_free(0.7, -1.5, 33.0, 4.0));
}

TEST(RegionGreen, TransmissionReciprocity) {
  const PotentialSpec p{10.0, 50.0};
  for (double e : {20.0, 60.0, 100.0, 400.0}) {
    for (double xs : {-3.0, -0.2}) {
      for (double x : {1.2, 4.0}) {
        EXPECT_LT(rel(green_in_region(Region::right, x, xs, e, p), green_in_region(Region::left, xs, x, e, p)), 1e-12);
      }
    }
  }
}

TEST(RegionGreen, FreeLimit) {
  const PotentialSpec p{0.0, 0.0};
  for (double x : {-2.0, -0.5, 0.3, 0.9, 1.5, 3.0}) {
    EXPECT_LT(rel(green_region(x, -1.0, 50.0, p), green_free(x, -1.0, 50.0, 0.0)), 1e-13) << x;
  }
}

TEST(RegionGreen, InterfaceContinuity) {
  const PotentialSpec p{10.0, 50.0};
  const double xs = -0.7, e = 100.0, h = 1e-6;
  auto g = [&](Region r, double x) { return green_in_region(r, x, xs, e, p); };
  auto dg = [&](Region r, double x) { return (g(r, x + h) - g(r, x - h)) / (2.0 * h); };
  EXPECT_LT(rel(g(Region::left, 0.0), g(Region::inside, 0.0)), 1e-10);
  EXPECT_LT(rel(g(Region::inside, 1.0), g(Region::right, 1.0)), 1e-10);
  EXPECT_LT(rel(dg(Region::left, 0.0), dg(Region::inside, 0.0)), 1e-9);
  EXPECT_LT(rel(dg(Region::inside, 1.0), dg(Region::right, 1.0)), 1e-9);
}

TEST(RegionGreen, AmplitudeIdentities) {
  const cplx i(0.0, 1.0);
  for (double e : {3.0, 20.0, 100.0}) {
    for (const PotentialSpec p : {PotentialSpec{10.0, 50.0}, PotentialSpec{-100.0, 0.0}, PotentialSpec{10.0, 1.0}}) {
      const auto s = closed_amplitudes(e, p);
      const cplx sk = std::sqrt(s.k.value), sku = std::sqrt(s.k_u.value), skd = std::sqrt(s.k_delta.value);
      const cplx eiku = std::exp(i * s.k_u.value);
      EXPECT_LT(rel(s.t / skd, (s.t_prime * eiku + s.r_prime / eiku) / sku), 1e-10);
      EXPECT_LT(rel(1.0 + s.r, (s.t_prime + s.r_prime) * sk / sku), 1e-10);
    }
  }
}

TEST(RegionGreen, UnsupportedPair) {
  EXPECT_THROW(green_region(0.5, 0.2, 50.0, {10.0, 0.0}), UnsupportedRegionError);
  EXPECT_THROW(green_region(3.0, 2.0, 50.0, {10.0, 0.0}), UnsupportedRegionError);
  EXPECT_THROW(green_region(-1.0, 0.0, 50.0, {10.0, 0.0}), UnsupportedRegionError);
}

TEST(Kernel, Retardation) {
  const auto s = propagate_kernel(-1.0, 0.5, -2.0, 0.5, {10.0, 0.0}, {});
  EXPECT_EQ(s.value, cplx(0.0));
  EXPECT_EQ(propagate_kernel(-1.0, 0.2, -2.0, 0.5, {10.0, 0.0}, {}).value, cplx(0.0));
}

TEST(Kernel, FreeClosedFormGrid) {
  double worst = 0.0;
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      const double x = -4.0 + 0.9 * a, t = 0.1 + 1.4 * b / 9.0;
      const auto s = propagate_kernel(x, t, -0.5, 0.0, {0.0, 0.0}, {});
      worst = std::max(worst, rel(s.value, free_propagator(x, t, -0.5, 0.0)));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Kernel, DirectPartIsFree) {
  const auto s = propagate_kernel(-2.0, 0.4, -0.5, 0.0, {10.0, 50.0}, {}, KernelPart::direct);
  EXPECT_LT(rel(s.value, free_propagator(-2.0, 0.4, -0.5, 0.0)), 1e-6);
}

TEST(Kernel, HighWallReflectsLikeImage) {
  // x = x' = -5: a very high wall returns a reflected kernel of the
  // free-propagator magnitude (image source at distance 10)
  const double t = 0.5;
  const double free_mag = std::abs(free_propagator(-5.0, t, -5.0, 0.0));
  double prev = 1e300;
  for (double u : {1e3, 1e4, 1e5}) {
    const auto s = propagate_kernel(-5.0, t, -5.0, 0.0, {u, u}, {}, KernelPart::reflected);
    const double dev = std::abs(std::abs(s.value) / free_mag - 1.0);
    EXPECT_LT(dev, prev) << u;
    prev = dev;
  }
  EXPECT_LT(prev, 0.05);
}
