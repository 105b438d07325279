#include <gtest/gtest.h>

#include <cmath>

#include "fracnls/grid.hpp"
#include "test_util.hpp"

using namespace fracnls;
using fracnls::testing::plane_wave;
using fracnls::testing::random_field;
using fracnls::testing::rel_diff;
using fracnls::testing::smooth_random_field;

TEST(GridSpec, RejectsInvalidShapes) {
  EXPECT_THROW(GridSpec(1, 7, 1.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(1, 6, 1.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(3, 8, 1.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(1, 8, 0.0), std::invalid_argument);
  EXPECT_NO_THROW(GridSpec(2, 8, 1.0));
}

TEST(GridSpec, LatticeAndNyquist) {
  GridSpec g(1, 16, 4.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(0), -4.0);
  EXPECT_EQ(g.wavenumber_index(7), 7);
  EXPECT_EQ(g.wavenumber_index(8), -8);  // single Nyquist mode
  EXPECT_DOUBLE_EQ(g.wavenumber(1), pi / 4.0);
  GridSpec g2(2, 8, 1.0);
  EXPECT_GT(g2.cell_volume(), 0.0);
  EXPECT_EQ(g2.size(), 64u);
  for (std::size_t i = 0; i < g2.size(); ++i) {
    auto ij = g2.unflatten(i);
    EXPECT_EQ(g2.flatten(ij[0], ij[1]), i);
  }
}

TEST(Field, RejectsWrongSizeAndNonFinite) {
  GridSpec g(1, 8, 1.0);
  EXPECT_THROW(Field(g, std::vector<cplx>(7)), std::invalid_argument);
  std::vector<cplx> v(8);
  v[3] = {NAN, 0.0};
  EXPECT_THROW(Field(g, v), std::invalid_argument);
}

TEST(Field, ArithmeticRequiresSameGrid) {
  Field a(GridSpec(1, 8, 1.0)), b(GridSpec(1, 8, 2.0));
  EXPECT_THROW(a += b, std::invalid_argument);
  EXPECT_THROW((void)l2_inner(a, b), std::invalid_argument);
}

TEST(Transform, ConstantFieldIsZeroMode) {
  GridSpec g(2, 16, 3.0);
  Field f = sample(g, [](Point) { return cplx(2.0, -1.0); });
  auto fh = forward_transform(f);
  for (std::size_t i = 1; i < fh.coeffs.size(); ++i) EXPECT_LT(std::abs(fh.coeffs[i]), 1e-13);
  EXPECT_GT(std::abs(fh.coeffs[0]), 1.0);
}

TEST(Transform, RoundTripAndParseval) {
  for (int n : {1, 2}) {
    GridSpec g(n, n == 1 ? 256 : 32, 5.0);
    Field f = random_field(g, 7 + n);
    EXPECT_LT(rel_diff(inverse_transform(forward_transform(f)), f), 1e-12);
    double phys = 0.0;
    for (auto z : f.values()) phys += std::norm(z) * g.cell_volume();
    double spec = 0.0;
    for (auto z : forward_transform(f).coeffs) spec += std::norm(z);
    EXPECT_NEAR(spec / phys, 1.0, 1e-12);
  }
}

TEST(Multiplier, IdentityAndLaplacianOnPlaneWave) {
  GridSpec g(2, 32, 2.0);
  Field f = random_field(g, 3);
  EXPECT_LT(rel_diff(apply_multiplier(f, [](Point) { return 1.0; }), f), 1e-14);
  Field w = plane_wave(g, 3, -5);
  const double c = pi / 2.0, k2 = c * c * (9 + 25);
  Field lap = apply_multiplier(w, [](Point xi) { return xi[0] * xi[0] + xi[1] * xi[1]; });
  EXPECT_LT(rel_diff(lap, k2 * w), 1e-12);
}

TEST(Multiplier, UnimodularPreservesNorm) {
  GridSpec g(1, 128, 3.0);
  Field f = random_field(g, 11);
  Field r = apply_multiplier(f, [](Point xi) { return std::polar(1.0, std::sin(3 * xi[0])); });
  EXPECT_NEAR(l2_norm(r) / l2_norm(f), 1.0, 1e-13);
}

TEST(Multiplier, NonFiniteValueRejected) {
  GridSpec g(1, 16, 1.0);
  Field f = random_field(g, 1);
  EXPECT_THROW(apply_multiplier(f, [](Point xi) { return 1.0 / std::abs(xi[0]); }), std::domain_error);
}

TEST(FractionalLaplacian, ExactSymbolOnPlaneWaves) {
  GridSpec g(1, 64, 4.0);
  for (double sigma : {0.25, 0.5, 0.75, 1.0}) {
    for (int k : {1, -3, 17, -32}) {
      Field w = plane_wave(g, k);
      const double kap = std::abs(pi * k / 4.0);
      EXPECT_LT(rel_diff(fractional_laplacian(w, sigma), std::pow(kap, 2 * sigma) * w), 1e-12);
    }
  }
}

TEST(FractionalLaplacian, OrderOneIsLaplacian) {
  GridSpec g(2, 16, 1.5);
  Field f = random_field(g, 5);
  Field a = fractional_laplacian(f, 1.0);
  Field b = apply_multiplier(f, [](Point xi) { return xi[0] * xi[0] + xi[1] * xi[1]; });
  EXPECT_LT(rel_diff(a, b), 1e-13);
}

TEST(FractionalLaplacian, AnnihilatesConstantsAndRejectsBadOrder) {
  GridSpec g(1, 32, 1.0);
  Field c = sample(g, [](Point) { return cplx(3.0, 1.0); });
  EXPECT_LT(fractional_laplacian(c, 0.3).max_abs(), 1e-13);
  EXPECT_THROW(fractional_laplacian(c, 0.0), std::invalid_argument);
  EXPECT_THROW(fractional_laplacian(c, -1.0), std::invalid_argument);
}

TEST(FractionalLaplacian, SelfAdjointAndPositive) {
  GridSpec g(2, 32, 3.0);
  Field f = random_field(g, 21), h = random_field(g, 22);
  for (double s : {0.3, 0.75}) {
    cplx lhs = l2_inner(fractional_laplacian(f, s), h);
    cplx rhs = l2_inner(f, fractional_laplacian(h, s));
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * l2_norm(f) * l2_norm(h));
    EXPECT_GE(l2_inner(fractional_laplacian(f, s), f).real(), 0.0);
  }
}

TEST(FractionalLaplacian, SpectralConvergenceUnderRefinement) {
  // Reference on a 512-point grid; coarse points are a subset of the fine ones.
  auto fn = [](Point x) { return cplx(std::exp(-x[0] * x[0]) * std::cos(x[0]), 0.0); };
  const double L = 10.0, s = 0.6;
  GridSpec fine(1, 512, L);
  Field ref = fractional_laplacian(sample(fine, fn), s);
  std::vector<double> err;
  for (int N : {16, 32, 64}) {
    GridSpec g(1, N, L);
    Field r = fractional_laplacian(sample(g, fn), s);
    const int stride = 512 / N;
    double e = 0.0;
    for (int j = 0; j < N; ++j) e = std::max(e, std::abs(r[std::size_t(j)] - ref[std::size_t(j * stride)]));
    err.push_back(e);
  }
  // superlinear: each doubling gains more than a factor 4
  EXPECT_LT(err[1], 0.25 * err[0]);
  EXPECT_LT(err[2], 0.25 * err[1]);
  EXPECT_LT(err[2], 1e-8);
}

TEST(LinearFlow, IdentityPlaneWaveAndGroupLaw) {
  GridSpec g(1, 64, 2.0);
  Field f = random_field(g, 9);
  EXPECT_LT(rel_diff(linear_flow(f, 0.7, 0.0), f), 1e-14);
  Field w = plane_wave(g, 5);
  const double kap = pi * 5 / 2.0, t = 0.37, s = 0.7;
  EXPECT_LT(rel_diff(linear_flow(w, s, t), std::polar(1.0, t * std::pow(kap, 2 * s)) * w), 1e-12);
  Field a = linear_flow(linear_flow(f, s, 0.2), s, 0.5);
  EXPECT_LT(rel_diff(a, linear_flow(f, s, 0.7)), 1e-12);
  EXPECT_THROW(linear_flow(f, 1.5, 1.0), std::invalid_argument);
  EXPECT_THROW(linear_flow(f, 0.0, 1.0), std::invalid_argument);
}

TEST(LinearFlow, MassAfterManySteps) {
  GridSpec g(1, 256, 10.0);
  Field f = smooth_random_field(g, 4);
  const double m0 = l2_norm(f);
  Field u = f;
  for (int k = 0; k < 1000; ++k) u = linear_flow(u, 0.8, 1e-2);
  EXPECT_LT(std::abs(l2_norm(u) - m0) / m0, 1e-12);
}

TEST(Multiplier, OperatorsCommute) {
  GridSpec g(2, 16, 2.0);
  Field f = random_field(g, 31);
  Field a = linear_flow(fractional_laplacian(f, 0.6), 0.6, 0.3);
  Field b = fractional_laplacian(linear_flow(f, 0.6, 0.3), 0.6);
  EXPECT_LT(rel_diff(a, b), 1e-13);
}

TEST(SobolevInner, PlaneWaveAndL2Reduction) {
  GridSpec g(2, 16, 2.0);
  Field w = plane_wave(g, 2, 1);
  w *= 1.0 / l2_norm(w);
  const double k2 = std::pow(pi / 2.0, 2) * 5.0;
  EXPECT_NEAR(sobolev_inner(w, w, 0.75).real(), std::pow(1.0 + k2, 0.75), 1e-12);
  Field f = random_field(g, 1), h = random_field(g, 2);
  cplx direct = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) direct += f[i] * std::conj(h[i]) * g.cell_volume();
  EXPECT_LT(std::abs(sobolev_inner(f, h, 0.0) - direct), 1e-12 * std::abs(direct));
}

TEST(SobolevInner, SymmetryPositivityCauchySchwarz) {
  GridSpec g(1, 128, 4.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Field f = random_field(g, 100 + seed), h = random_field(g, 200 + seed);
    const double s = 0.25 * double(seed % 4 + 1);
    cplx a = sobolev_inner(f, h, s), b = sobolev_inner(h, f, s);
    EXPECT_LT(std::abs(a - std::conj(b)), 1e-12 * std::abs(a));
    EXPECT_GE(sobolev_inner(f, f, s).real(), 0.0);
    EXPECT_NEAR(sobolev_inner(f, f, s).imag(), 0.0, 1e-10);
    EXPECT_LE(std::abs(a), sobolev_norm(f, s) * sobolev_norm(h, s) * (1 + 1e-14));
  }
}

TEST(Diagnostics, BoundaryRatioAndTail) {
  GridSpec g(1, 256, 20.0);
  Field narrow = sample(g, [](Point x) { return cplx(std::exp(-x[0] * x[0])); });
  EXPECT_LT(boundary_amplitude_ratio(narrow), 1e-12);
  Field wide = sample(g, [](Point x) { return cplx(std::exp(-x[0] * x[0] / 200.0)); });
  EXPECT_GT(boundary_amplitude_ratio(wide), 1e-6);
  EXPECT_LT(spectral_tail_fraction(narrow), 1e-12);
  EXPECT_GT(spectral_tail_fraction(random_field(g, 1)), 0.2);
}

TEST(Translate, LatticeShift) {
  GridSpec g(2, 16, 2.0);
  Field f = random_field(g, 8);
  Field t = translate(f, {3, -2});
  EXPECT_EQ(t[g.flatten(3, 14)], f[g.flatten(0, 0)]);
  EXPECT_LT(rel_diff(translate(t, {-3, 2}), f), 1e-15);
}
