#include <gtest/gtest.h>

#include "mstwave/grid_oracle.hpp"
#include "mstwave/wavepacket.hpp"

using namespace mstwave;

namespace {

PacketSpec packet(double sigma, double xi, double e) {
  PacketSpec p;
  p.e_perp_tilde = e;
  p.sigma_tilde = sigma;
  p.x_i_tilde = xi;
  return p;
}

// max |psi - free| / max |free| over the nodes within 2 sigma(t) of the packet centre;
// with `dens` the same for |psi|^2
double centre_error(const OracleResult& r, std::size_t it, const PacketSpec& p, bool dens = false) {
  const double t = r.t_samples[it];
  const double c = p.x_i_tilde + 2.0 * p.u_perp() * t;
  const double w = 2.0 * p.sigma_tilde * std::sqrt(1.0 + std::pow(t / (p.sigma_tilde * p.sigma_tilde), 2));
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    if (std::abs(r.x[j] - c) > w) continue;
    const cplx ref = free_packet(r.x[j], t, p);
    const cplx v = r.fields[it][j];
    num = std::max(num, dens ? std::abs(std::norm(v) - std::norm(ref)) : std::abs(v - ref));
    den = std::max(den, dens ? std::norm(ref) : std::abs(ref));
  }
  return num / den;
}

}  // namespace

TEST(Grid, LimitsAndConformingGrid) {
  const auto p = packet(0.1, -10.0, 100.0);
  const auto g = grid_limits(p, 1.0);
  EXPECT_NEAR(g.e_max, 90.0 * 90.0, 1e-9);
  EXPECT_NEAR(g.dx_max, 2.0 * pi / 90.0 / 16.0, 1e-15);
  EXPECT_NEAR(g.margin, 1.0 + 180.0, 1e-12);
  const auto s = make_grid(p, 1.0);
  EXPECT_NO_THROW(check_grid(s, p, 1.0));
  // x = 0 and x = 1 fall on nodes
  const double n0 = -s.x_min / s.dx;
  EXPECT_NEAR(n0, std::round(n0), 1e-6);
  EXPECT_NEAR(1.0 / s.dx, std::round(1.0 / s.dx), 1e-9);
}

TEST(Grid, InvariantViolationsAreConfigErrors) {
  const auto p = packet(1.0 / 3.0, -10.0, 100.0);
  const auto ok = make_grid(p, 0.2);
  auto bad = ok;
  bad.dx *= 2.0;
  EXPECT_THROW(check_grid(bad, p, 0.2), ConfigError);
  bad = ok;
  bad.dt *= 1.5;
  EXPECT_THROW(check_grid(bad, p, 0.2), ConfigError);
  bad = ok;
  bad.x_max = 2.0;
  EXPECT_THROW(check_grid(bad, p, 0.2), ConfigError);
  bad = ok;
  bad.dt = 0.0;
  EXPECT_THROW(check_grid(bad, p, 0.2), ConfigError);
  auto coarse = ok;
  coarse.dx *= 4.0;
  EXPECT_THROW(evolve_grid(p, {}, coarse, {0.1}), ConfigError);
  EXPECT_THROW(evolve_grid(p, {}, ok, {}), ConfigError);
  EXPECT_THROW(evolve_grid(p, {}, ok, {-0.1}), ConfigError);
}

TEST(Oracle, FreePacketAtCentre) {
  const auto p = packet(1.0 / 3.0, -10.0, 100.0);
  const auto r = evolve_grid(p, {}, make_grid(p, 0.2), {0.1, 0.2});
  for (std::size_t it = 0; it < 2; ++it) EXPECT_LT(centre_error(r, it, p, true), 1e-4) << r.t_samples[it];
  // complex field on a twice finer grid (phase error accumulates faster than density error)
  const auto f = evolve_grid(p, {}, make_grid(p, 0.2, 8.0, 2.0), {0.2});
  EXPECT_LT(centre_error(f, 0, p), 1e-4);
}

TEST(Oracle, NormConservedWithHardWalls) {
  const auto p = packet(0.1, -10.0, 100.0);
  const auto g = make_grid(p, 0.1, 8.0, 0.5);
  OracleOptions o;
  o.enforce_invariants = false;
  const auto r = evolve_grid(p, {10.0, 40.0}, g, {0.05, 0.1}, o);
  ASSERT_GT(r.steps, 0);
  EXPECT_LE(r.norm_drift, 1e-8 * std::max(1.0, r.steps / 1000.0));
  EXPECT_NEAR(r.norm_initial, 1.0, 1e-3);
}

TEST(Oracle, ThreePointSecondOrder) {
  // error against the closed form falls about 4x per halving of dx and dt
  const auto p = packet(0.5, -5.0, 25.0);
  OracleOptions o;
  o.enforce_invariants = false;
  std::vector<double> err;
  for (double dx : {0.02, 0.01}) {
    GridSpec g;
    g.dx = dx;
    g.dt = dx / 40.0;
    g.x_min = -20.0;
    g.x_max = 10.0;
    g.scheme = SpatialScheme::three_point;
    err.push_back(centre_error(evolve_grid(p, {}, g, {0.2}, o), 0, p));
  }
  const double factor = err[0] / err[1];
  EXPECT_GE(factor, 3.0);
  EXPECT_LE(factor, 5.0);
}

TEST(Oracle, NumerovBeatsThreePoint) {
  const auto p = packet(0.5, -5.0, 25.0);
  OracleOptions o;
  o.enforce_invariants = false;
  GridSpec g;
  g.dx = 0.02;
  g.dt = 0.0005;
  g.x_min = -20.0;
  g.x_max = 10.0;
  const double numerov = centre_error(evolve_grid(p, {}, g, {0.2}, o), 0, p);
  g.scheme = SpatialScheme::three_point;
  const double three = centre_error(evolve_grid(p, {}, g, {0.2}, o), 0, p);
  EXPECT_LT(numerov, three);
}

TEST(Oracle, AbsorbingRampRemovesOutgoingPacket) {
  const auto p = packet(0.5, -3.0, 25.0);
  OracleOptions o;
  o.enforce_invariants = false;
  GridSpec g;
  g.dx = 0.02;
  g.dt = 0.0005;
  g.x_min = -10.0;
  g.x_max = 10.0;
  g.boundary = Boundary::absorbing_ramp;
  g.ramp_width = 5.0;
  const auto r = evolve_grid(p, {}, g, {2.5}, o);
  EXPECT_LT(r.norm_final, 0.1 * r.norm_initial);
  g.boundary = Boundary::hard_wall;
  const auto w = evolve_grid(p, {}, g, {2.5}, o);
  EXPECT_NEAR(w.norm_final, w.norm_initial, 1e-8);
}

TEST(Compare, IdenticalAndScaled) {
  const std::vector<double> x{0.0, 0.1, 0.2, 0.3};
  const std::vector<cplx> a{{1.0, 0.5}, {0.2, -0.1}, {-0.3, 0.0}, {0.0, 2.0}};
  std::vector<cplx> b = a;
  EXPECT_EQ(compare(x, a, x, b, CompareNorm::L2_rel), 0.0);
  EXPECT_EQ(compare(x, a, x, b, CompareNorm::Linf_rel), 0.0);
  for (auto& v : b) v *= 1.0 + 1e-6;
  EXPECT_NEAR(compare(x, a, x, b, CompareNorm::L2_rel), 1e-6, 1e-12);
  EXPECT_NEAR(compare(x, a, x, b, CompareNorm::Linf_rel), 1e-6, 1e-12);
}

TEST(Compare, GridMismatch) {
  const std::vector<double> x{0.0, 0.1}, y{0.0, 0.11}, z{0.0};
  const std::vector<double> a{1.0, 2.0}, c{1.0};
  EXPECT_THROW(compare(x, a, y, a, CompareNorm::L2_rel), ConfigError);
  EXPECT_THROW(compare(x, a, z, c, CompareNorm::L2_rel), ConfigError);
}
