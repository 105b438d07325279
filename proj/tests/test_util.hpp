#pragma once

#include <cstdint>
#include <random>

#include "fracnls/grid.hpp"

namespace fracnls::testing {

/// Random complex field with i.i.d. entries in the unit square, reproducible from the seed.
inline Field random_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53 - 0.5; };
  std::vector<cplx> v(spec.size());
  for (auto& z : v) z = {u(), u()};
  return Field(spec, std::move(v));
}

/// Smooth random field: a few random Gaussians, decaying well inside the box.
inline Field smooth_random_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  const double L = spec.half_width();
  Field f(spec);
  for (int b = 0; b < 4; ++b) {
    const double c0 = (u() - 0.5) * 0.3 * L, c1 = spec.dimension() == 2 ? (u() - 0.5) * 0.3 * L : 0.0;
    const double w = L * (0.04 + 0.06 * u());
    const cplx a = std::polar(0.5 + u(), 2 * pi * u());
    f += sample(spec, [&](Point x) {
      const double d0 = x[0] - c0, d1 = x[1] - c1;
      return a * std::exp(-(d0 * d0 + d1 * d1) / (2 * w * w));
    });
  }
  return f;
}

/// e^{i kappa . x} for lattice wave numbers (k0, k1).
inline Field plane_wave(const GridSpec& spec, int k0, int k1 = 0) {
  const double c = pi / spec.half_width();
  return sample(spec, [&](Point x) { return std::polar(1.0, c * (k0 * x[0] + k1 * x[1])); });
}

inline double rel_diff(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

}  // namespace fracnls::testing
