#include <gtest/gtest.h>

#include <cmath>

#include "fracnls/model.hpp"
#include "test_util.hpp"

using namespace fracnls;
using fracnls::testing::plane_wave;
using fracnls::testing::random_field;
using fracnls::testing::smooth_random_field;

namespace {

ProblemModel cubic(double s = 1.0, int n = 1) {
  ProblemModel m;
  m.s = s;
  m.n = n;
  m.ell = 2.0;
  return m;
}

// sqrt(2 lambda) sech(sqrt(lambda) x), the s = 1 cubic soliton
Field soliton(const GridSpec& g, double lambda) {
  return sample(g, [&](Point x) { return cplx(std::sqrt(2 * lambda) / std::cosh(std::sqrt(lambda) * x[0])); });
}

}  // namespace

TEST(Mass, ZeroConstantGaussian) {
  GridSpec g(2, 16, 3.0);
  EXPECT_EQ(mass(Field(g)), 0.0);
  Field c = sample(g, [](Point) { return cplx(0.0, 2.0); });
  EXPECT_NEAR(mass(c), 4.0 * 36.0, 1e-10);
  GridSpec g1(1, 512, 20.0);
  const double w = 1.3;
  Field gauss = sample(g1, [&](Point x) { return cplx(std::exp(-x[0] * x[0] / (2 * w * w))); });
  EXPECT_NEAR(mass(gauss) / (w * std::sqrt(pi)), 1.0, 1e-8);
}

TEST(Kinetic, PlaneWaveConstantAndSech) {
  GridSpec g(1, 64, 2.0);
  Field w = plane_wave(g, 3);
  const double kap = 3 * pi / 2.0;
  EXPECT_NEAR(kinetic(w, 0.4) / (std::pow(kap, 0.8) * mass(w)), 1.0, 1e-12);
  EXPECT_LT(kinetic(sample(g, [](Point) { return cplx(1.5); }), 0.4), 1e-20);
  GridSpec fine(1, 2048, 40.0);
  const double lam = 0.3;
  // int |Q'|^2 = (4/3) lambda^{3/2}
  EXPECT_NEAR(kinetic(soliton(fine, lam), 1.0) / (4.0 / 3.0 * std::pow(lam, 1.5)), 1.0, 1e-6);
}

TEST(NonlinearForce, ConstantGaugeAndBound) {
  GridSpec g(1, 32, 2.0);
  auto m = cubic(0.75);
  m.ell = 1.5;
  DiscreteModel dm(m, g);
  Field c = sample(g, [](Point) { return cplx(2.0); });
  EXPECT_NEAR(nonlinear_force(c, dm)[4].real(), std::pow(2.0, 2.5), 1e-12);
  Field u = random_field(g, 3);
  const cplx ph = std::polar(1.0, 0.7);
  Field lhs = nonlinear_force(ph * u, dm), rhs = ph * nonlinear_force(u, dm);
  EXPECT_LT(l2_norm(lhs - rhs), 1e-14 * l2_norm(rhs));
  Field f = nonlinear_force(u, dm);
  for (std::size_t i = 0; i < u.size(); ++i)
    EXPECT_NEAR(std::abs(f[i]), std::pow(std::abs(u[i]), 2.5), 1e-14);
}

TEST(PotentialEnergyF, ConstantAndHomogeneity) {
  GridSpec g(1, 32, 2.0);
  auto m = cubic(0.5);
  m.ell = 3.0;
  DiscreteModel dm(m, g);
  Field c = sample(g, [](Point) { return cplx(1.5); });
  EXPECT_NEAR(potential_energy_F(c, dm), std::pow(1.5, 5.0) * 4.0 / 5.0, 1e-12);
  Field u = random_field(g, 5);
  EXPECT_NEAR(potential_energy_F(1.7 * u, dm) / potential_energy_F(u, dm), std::pow(1.7, 5.0), 1e-10);
}

TEST(Energy, FreeZeroAndSechOracle) {
  GridSpec g(1, 128, 5.0);
  auto m = cubic(0.6);
  m.weight_a = ConstantProfile{0.0};
  DiscreteModel free(m, g);
  Field u = smooth_random_field(g, 2);
  EXPECT_NEAR(energy(u, free).total, 0.5 * kinetic(u, 0.6), 1e-14);
  EXPECT_EQ(energy(Field(g), free).total, 0.0);

  GridSpec fine(1, 2048, 40.0);
  DiscreteModel nls(cubic(1.0), fine);
  const double lam = 1.0 / 16.0;
  EXPECT_NEAR(energy(soliton(fine, lam), nls).total / (-2.0 / 3.0 * std::pow(lam, 1.5)), 1.0, 1e-6);
}

TEST(Energy, GaugeAndTranslationInvariance) {
  GridSpec g(2, 32, 6.0);
  auto m = cubic(0.7, 2);
  m.potential = GaussianProfile{1.0, 2.0};
  DiscreteModel dm(m, g);
  Field u = smooth_random_field(g, 8);
  const auto e0 = energy(u, dm);
  const auto e1 = energy(std::polar(1.0, 2.1) * u, dm);
  EXPECT_NEAR(e1.kinetic, e0.kinetic, 1e-12 * e0.kinetic);
  EXPECT_NEAR(e1.potential_V, e0.potential_V, 1e-12 * std::abs(e0.potential_V));
  EXPECT_NEAR(e1.total, e0.total, 1e-12 * std::abs(e0.total));
  DiscreteModel flat(cubic(0.7, 2), g);
  EXPECT_NEAR(energy(translate(u, {5, -3}), flat).total, energy(u, flat).total, 1e-12 * std::abs(energy(u, flat).total));
}

TEST(Model, ValidationAndSampling) {
  auto m = cubic(1.2);
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = cubic();
  m.ell = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = cubic();
  m.potential = GaussianProfile{-1.0, 1.0};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = cubic();
  m.f_params = FParameters{0.0, 1, 1, 0.25, 2, 2};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = cubic(1.0, 2);
  EXPECT_THROW(DiscreteModel(m, GridSpec(1, 8, 1.0)), std::invalid_argument);
  m = cubic();
  m.potential = CutoffPowerProfile{2.0, 1.0, 0.5};
  DiscreteModel dm(m, GridSpec(1, 16, 4.0));
  EXPECT_DOUBLE_EQ(dm.potential()[8], 4.0);  // x = 0 sits in the core
  EXPECT_DOUBLE_EQ(dm.potential()[0], 0.5);  // |x| = 4
  EXPECT_TRUE(cubic(0.5).mass_critical());
  EXPECT_FALSE(cubic(0.75).mass_critical());
}

TEST(StructuralConditions, WorkedExampleAndFailures) {
  ProblemModel m;
  m.n = 1;
  m.s = 0.75;
  m.ell = 1.0;
  m.weight_a = CutoffPowerProfile{1.0, 0.25, 1.0};
  m.f_params = FParameters{0.3, 1.0, 1.0, 0.25, 1.0, 1.0};
  auto rep = check_structural_conditions(m, 20.0);
  EXPECT_NEAR(rep.exponent_margin, -0.75, 1e-15);
  EXPECT_TRUE(rep.exponent_ok);
  EXPECT_TRUE(rep.lower_bound_symbolic);
  EXPECT_NEAR(rep.lower_bound_min_ratio, 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(rep.lower_bound_ok);
  EXPECT_TRUE(rep.growth_ok);  // sigma = ell

  m.f_params->kappa = 0.34;  // above inf of F |x|^delta |z|^-(2+beta) = 1/3
  EXPECT_FALSE(check_structural_conditions(m, 20.0).lower_bound_ok);
  m.f_params->kappa = 0.3;
  m.f_params->sigma = 1.5;
  EXPECT_FALSE(check_structural_conditions(m, 20.0).growth_ok);

  // sampled branch: Gaussian weight has no power tail
  m.weight_a = GaussianProfile{1.0, 3.0};
  m.f_params->sigma = 1.0;
  auto sampled = check_structural_conditions(m, 20.0);
  EXPECT_FALSE(sampled.lower_bound_symbolic);
  EXPECT_FALSE(sampled.lower_bound_ok);

  m.f_params.reset();
  EXPECT_THROW(check_structural_conditions(m, 20.0), std::invalid_argument);
}

TEST(GagliardoNirenberg, CriticalBoundOnRandomSmoothFields) {
  // ell = 4s/n: int F <= (G/(ell+2)) M^{2s/n} K with the grid estimate G
  GridSpec g(1, 512, 30.0);
  const double s = 0.75, ell = 3.0;
  auto m = cubic(s);
  m.ell = ell;
  DiscreteModel dm(m, g);
  const auto est = estimate_gagliardo_nirenberg(g, s, ell);
  EXPECT_NEAR(est.theta, 1.0, 1e-15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Field u = smooth_random_field(g, 50 + seed);
    const double lhs = potential_energy_F(u, dm);
    const double rhs = est.constant / (ell + 2.0) * std::pow(mass(u), 2.0 * s) * kinetic(u, s);
    EXPECT_LE(lhs, rhs) << "seed " << seed;
  }
}

TEST(GagliardoNirenberg, RatioScaleInvariant) {
  GridSpec g(1, 1024, 40.0);
  auto u = sample(g, [](Point x) { return cplx(std::exp(-x[0] * x[0])); });
  const double r1 = gagliardo_nirenberg_ratio(u, 0.75, 2.0);
  EXPECT_NEAR(gagliardo_nirenberg_ratio(3.0 * u, 0.75, 2.0), r1, 1e-12 * r1);
}
