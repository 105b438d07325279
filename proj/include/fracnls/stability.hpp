#pragma once

// Orbital stability as a measurement: perturb a ground state, evolve both ways
// in time, and track the H^s distance to the orbit {e^{i theta} u(. - y)}.
//
// The orbit is that of the computed minimizer only, over continuous phases and
// lattice translations, so every distance reported here is an upper bound on the
// distance to the full set of minimizers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracnls/ground_state.hpp"
#include "fracnls/grid.hpp"
#include "fracnls/model.hpp"
#include "fracnls/propagator.hpp"

namespace fracnls {

struct OrbitMatch {
  double distance = 0.0;
  double phase = 0.0;
  std::array<int, 2> shift{0, 0};
};

/// min over lattice shifts y and phases theta of ||phi - e^{i theta} u(. - y)||_{H^s}.
/// All shifts are scanned at once through the weighted spectral cross-correlation.
inline OrbitMatch orbit_distance(const Field& phi, const Field& u, double s) {
  phi.require_same_grid(u);
  const auto& spec = phi.spec();
  const auto ph = forward_transform(phi);
  const auto uh = forward_transform(u);
  const auto xi2 = spec.squared_frequencies();
  std::vector<cplx> cross(xi2.size());
  for (std::size_t i = 0; i < xi2.size(); ++i) cross[i] = std::pow(1.0 + xi2[i], s) * ph.coeffs[i] * std::conj(uh.coeffs[i]);
  // corr[m] = <phi, u(. - m h)>_{H^s}
  const auto corr = detail::raw_dft(spec, cross, FFTW_BACKWARD);
  std::size_t best = 0;
  for (std::size_t i = 1; i < corr.size(); ++i)
    if (std::abs(corr[i]) > std::abs(corr[best])) best = i;
  OrbitMatch m;
  m.phase = std::arg(corr[best]);
  m.shift = spec.unflatten(best);
  const int N = spec.points();
  for (int d = 0; d < spec.dimension(); ++d)
    if (m.shift[d] > N / 2) m.shift[d] -= N;
  // Explicit difference instead of ||phi||^2 + ||u||^2 - 2|c|, which cancels.
  Field diff = phi - std::polar(1.0, m.phase) * translate(u, m.shift);
  m.distance = sobolev_norm(diff, s);
  return m;
}

enum class PerturbationKind { random_bump, dilation, translation };

inline const char* to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::random_bump: return "random";
    case PerturbationKind::dilation: return "dilation";
    case PerturbationKind::translation: return "translation";
  }
  return "unknown";
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Perturbation direction with unit H^s norm. delta enters only through the
/// dilation factor 1 + delta.
inline Field make_perturbation(const Field& u, double s, PerturbationKind kind, double delta, std::uint64_t seed) {
  const auto& spec = u.spec();
  Field p(spec);
  switch (kind) {
    case PerturbationKind::random_bump: {
      // Three smooth Gaussian bumps placed where u carries mass.
      std::mt19937_64 rng(seed);
      const double peak = u.max_abs();
      std::vector<std::size_t> support;
      for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > 0.1 * peak) support.push_back(i);
      if (support.empty()) throw std::invalid_argument("make_perturbation: zero ground state");
      double extent = 0.0;
      for (auto i : support) {
        auto x = spec.position(i);
        extent = std::max(extent, std::hypot(x[0], x[1]));
      }
      extent = std::max(extent, 4.0 * spec.spacing());
      for (int b = 0; b < 3; ++b) {
        const auto centre = spec.position(support[std::size_t(detail::unit_uniform(rng) * double(support.size()))]);
        const double width = extent * (0.25 + 0.5 * detail::unit_uniform(rng));
        const cplx amp = std::polar(0.5 + detail::unit_uniform(rng), 2.0 * pi * detail::unit_uniform(rng));
        p += sample(spec, [&](Point x) {
          const double d0 = x[0] - centre[0], d1 = x[1] - centre[1];
          return amp * std::exp(-(d0 * d0 + d1 * d1) / (2.0 * width * width));
        });
      }
      break;
    }
    case PerturbationKind::dilation: {
      // u_lambda - u with lambda = 1 + delta
      p = dilate(u, 1.0 + delta);
      p -= u;
      break;
    }
    case PerturbationKind::translation: {
      p = translate(u, {1, spec.dimension() == 2 ? 1 : 0});
      p -= u;
      break;
    }
  }
  const double norm = sobolev_norm(p, s);
  if (!(norm > 0.0)) throw std::invalid_argument("make_perturbation: degenerate perturbation");
  p *= 1.0 / norm;
  return p;
}

struct StabilityOptions {
  double T = 5.0;
  double dt = 1e-3;
  int stride = 100;
  std::uint64_t seed = 1;
  bool backward = true;   // also integrate over [-T, 0]
  double epsilon = 0.1;   // verdict threshold carried in the report
};

struct StabilityReport {
  double delta = 0.0;
  PerturbationKind kind = PerturbationKind::random_bump;
  double delta_in = 0.0;  // ||phi - u||_{H^s} of the renormalized datum
  std::vector<double> times;
  std::vector<double> distance;
  std::vector<double> mass_drift;    // relative
  std::vector<double> energy_drift;  // relative to |J(phi)|
  double sup_d = 0.0;
  double epsilon = 0.0;
  bool blew_up = false;
  std::size_t origin = 0;  // index of t = 0 in times

  double initial_distance() const { return distance.empty() ? 0.0 : distance[origin]; }
};

/// phi = (u + delta p) sqrt(mu / M(u + delta p)).
inline Field perturbed_datum(const Field& u, const Field& p, double delta, double mu) {
  Field phi = u + cplx(delta) * p;
  phi *= std::sqrt(mu / mass(phi));
  return phi;
}

inline StabilityReport run_single_stability(const DiscreteModel& model, const GroundStateResult& gs, double delta,
                                            PerturbationKind kind, const StabilityOptions& opt) {
  const double s = model.s();
  const double mu = gs.mass_target;
  const Field& u = gs.u;
  StabilityReport rep;
  rep.delta = delta;
  rep.kind = kind;
  rep.epsilon = opt.epsilon;
  Field phi = u;
  if (delta > 0.0) phi = perturbed_datum(u, make_perturbation(u, s, kind, delta, opt.seed), delta, mu);
  rep.delta_in = sobolev_norm(phi - u, s);

  const double M0 = mass(phi);
  const double J0 = energy(phi, model).total;
  const double Jscale = J0 != 0.0 ? std::abs(J0) : 1.0;

  auto run = [&](double dt) {
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.T_total = opt.T;
    cfg.stride = opt.stride;
    cfg.energy_drift_warning = INFINITY;
    cfg.snapshot_stride = opt.stride;
    return evolve(phi, model, cfg);
  };
  std::vector<EvolutionResult> legs;
  if (opt.backward) legs.push_back(run(-opt.dt));
  legs.push_back(run(opt.dt));

  // Backward leg first, reversed, so times increase; t = 0 appears once.
  struct Sample {
    double t;
    const Field* f;
    double m, e;
  };
  std::vector<Sample> samples;
  for (std::size_t l = 0; l < legs.size(); ++l) {
    const auto& rec = legs[l].record;
    rep.blew_up = rep.blew_up || legs[l].status == EvolutionStatus::blow_up;
    const bool reversed = opt.backward && l == 0;
    std::vector<Sample> leg;
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
      const double t = rec.snapshots[k].first;
      // mass and energy are recorded on the same stride as the snapshots
      std::size_t r = std::min(k, rec.size() - 1);
      leg.push_back({t, &rec.snapshots[k].second, rec.mass[r], rec.energy[r]});
    }
    if (reversed) {
      std::reverse(leg.begin(), leg.end());
      leg.pop_back();  // t = 0 comes from the forward leg
    }
    samples.insert(samples.end(), leg.begin(), leg.end());
  }
  for (const auto& smp : samples) {
    if (smp.t == 0.0) rep.origin = rep.times.size();
    rep.times.push_back(smp.t);
    const double d = orbit_distance(*smp.f, u, s).distance;
    rep.distance.push_back(d);
    rep.mass_drift.push_back(std::abs(smp.m - M0) / M0);
    rep.energy_drift.push_back(std::abs(smp.e - J0) / Jscale);
    rep.sup_d = std::max(rep.sup_d, d);
  }
  return rep;
}

inline std::vector<StabilityReport> run_stability_experiment(const DiscreteModel& model, const GroundStateResult& gs,
                                                             std::span<const double> deltas,
                                                             std::span<const PerturbationKind> kinds,
                                                             const StabilityOptions& opt = {}) {
  if (!gs.converged) throw std::invalid_argument("stability: ground state did not converge");
  if (!(gs.u.spec() == model.grid())) throw std::invalid_argument("stability: grid mismatch");
  std::vector<StabilityReport> out;
  for (auto kind : kinds)
    for (double delta : deltas) {
      if (!(delta >= 0.0)) throw std::invalid_argument("stability: delta must be >= 0");
      out.push_back(run_single_stability(model, gs, delta, kind, opt));
    }
  return out;
}

enum class StabilityVerdict { stable, unstable, inconclusive };

inline const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::stable: return "stable";
    case StabilityVerdict::unstable: return "unstable";
    case StabilityVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

/// stable: every sup_d <= epsilon and, per perturbation kind, sup_d strictly
/// decreases as delta decreases. unstable: a blow-up, or a run whose sup_d exceeds
/// epsilon and is at least 10 times its d(0). Otherwise inconclusive.
inline StabilityVerdict verdict(std::span<const StabilityReport> reports, double epsilon) {
  std::vector<double> distinct;
  for (const auto& r : reports)
    if (std::find(distinct.begin(), distinct.end(), r.delta) == distinct.end()) distinct.push_back(r.delta);
  if (distinct.size() < 2) throw std::invalid_argument("verdict: need at least two values of delta");

  for (const auto& r : reports) {
    if (r.blew_up) return StabilityVerdict::unstable;
    if (r.sup_d > epsilon && r.sup_d >= 10.0 * r.initial_distance()) return StabilityVerdict::unstable;
  }
  bool all_small = std::all_of(reports.begin(), reports.end(), [&](const auto& r) { return r.sup_d <= epsilon; });
  if (!all_small) return StabilityVerdict::inconclusive;
  for (auto kind : {PerturbationKind::random_bump, PerturbationKind::dilation, PerturbationKind::translation}) {
    std::vector<const StabilityReport*> group;
    for (const auto& r : reports)
      if (r.kind == kind) group.push_back(&r);
    std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->delta < b->delta; });
    for (std::size_t i = 1; i < group.size(); ++i)
      if (!(group[i - 1]->sup_d < group[i]->sup_d)) return StabilityVerdict::inconclusive;
  }
  return StabilityVerdict::stable;
}

}  // namespace fracnls
