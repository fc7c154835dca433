#include <cmath>

#include <gtest/gtest.h>

#include <gaugeqed/perturbation.hpp>
#include <gaugeqed/two_level.hpp>

using namespace gaugeqed;

namespace {

GaugeContext context(double delta, double eta, double alpha, MatterSpectrum* matter = nullptr) {
  CircuitParams p;
  p.delta = delta;
  p.eta = eta;
  CircuitSetup s = make_setup(p);
  if (matter) *matter = s.matter;
  return derive_gauge_context(p, s.reference, alpha);
}

// |E_pert - E_two-level| for ground and |e,0>-like level
std::pair<double, double> pert_error(double eta, double alpha) {
  MatterSpectrum m;
  GaugeContext c = context(5.0, eta, alpha, &m);
  TwoLevelModel tl = build_two_level(m, c, 30);
  RealVector ev = eigvals_lowest(tl.hamiltonian, 3);
  SecondOrderLevels s = second_order_levels(c);
  // at delta = 5 the bare ordering is |g,0>, |e,0>, |g,1>
  return {std::abs(ev(0) - s.ground), std::abs(ev(1) - s.excited)};
}

}  // namespace

class SecondOrder : public ::testing::TestWithParam<double> {};

TEST_P(SecondOrder, ErrorIsFourthOrder) {
  const double a = GetParam();
  auto [g1, e1] = pert_error(0.02, a);
  auto [g2, e2] = pert_error(0.04, a);
  EXPECT_NEAR(std::log2(g2 / g1), 4.0, 0.3);
  EXPECT_NEAR(std::log2(e2 / e1), 4.0, 0.3);
}

INSTANTIATE_TEST_SUITE_P(Gauges, SecondOrder, ::testing::Values(0.0, 0.3, 1.0));

TEST(SecondOrderLevels, DegeneracyRejected) {
  GaugeContext c = context(1.0, 0.0, 1.0);
  try {
    second_order_levels(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularDenominator);
  }
}

TEST(SecondOrderLevels, DecoupledLimit) {
  GaugeContext c = context(5.0, 0.0, 0.5);
  SecondOrderLevels s = second_order_levels(c);
  EXPECT_NEAR(s.ground, c.epsilon0 + 0.5 * c.omega, 1e-14);
  EXPECT_NEAR(s.excited, c.epsilon0 + c.omega_m + 0.5 * c.omega, 1e-14);
}

TEST(Trk, SubstitutedLevelsAreGaugeIndependent) {
  GaugeContext c = context(5.0, 0.3, 1.0);
  std::vector<double> as;
  for (int i = 0; i <= 100; ++i) as.push_back(i / 100.0);
  TrkReport r = trk_invariance_check(c, as);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.spread_ground_sub, 1e-10);
  EXPECT_LT(r.spread_excited_sub, 1e-10);
  EXPECT_GT(r.spread_ground_raw, 1e-6);
  EXPECT_TRUE(r.excited_requires_negative_mass);
}

TEST(Trk, RawSpreadScalesAsEtaSquared) {
  std::vector<double> as;
  for (int i = 0; i <= 10; ++i) as.push_back(i / 10.0);
  double s1 = trk_invariance_check(context(5.0, 0.05, 1.0), as).spread_ground_raw;
  double s2 = trk_invariance_check(context(5.0, 0.1, 1.0), as).spread_ground_raw;
  EXPECT_NEAR(std::log2(s2 / s1), 2.0, 0.2);
}

TEST(Trk, TwoLevelSumsHaveOppositeSigns) {
  MatterSpectrum m = build_fluxonium(CircuitParams{});
  double ground = trk_sum(m, 0, 2), excited = trk_sum(m, 1, 2);
  EXPECT_GT(ground, 0.0);
  EXPECT_LT(excited, 0.0);
  EXPECT_NEAR(ground, -excited, 1e-12);
  // with all kept levels the rule 1/(2 m) holds for both
  EXPECT_NEAR(trk_sum(m, 0, m.keep()), 1.0 / (2.0 * m.m_eff), 1e-6 / m.m_eff);
  EXPECT_NEAR(trk_sum(m, 1, m.keep()), 1.0 / (2.0 * m.m_eff), 1e-4 / m.m_eff);
}
