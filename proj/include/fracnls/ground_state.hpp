#pragma once

// Ground states on the mass sphere S_mu = {M(u) = mu} by semi-implicit
// normalized gradient flow, plus the variational probes: mass-preserving
// dilation, strict subadditivity gaps, concentration function and radial decay.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracnls/grid.hpp"
#include "fracnls/model.hpp"

namespace fracnls {

enum class FlowStatus { converged, max_iterations, vanishing, collapse, energy_increase };

inline const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::max_iterations: return "max_iterations";
    case FlowStatus::vanishing: return "vanishing";
    case FlowStatus::collapse: return "collapse";
    case FlowStatus::energy_increase: return "energy_increase";
  }
  return "unknown";
}

struct FlowOptions {
  double tau = 1.0;         // pseudo-time step
  double tol = -1.0;        // residual tolerance; negative selects 1e-8 sqrt(mu)
  int max_iter = 200000;
  double collapse_tail = 0.2;
};

struct GroundStateResult {
  Field u;
  double I_mu = 0.0;
  double omega = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double mass_target = 0.0;
  FlowStatus status = FlowStatus::max_iterations;
  std::string diagnostic;
};

class MassCriticalGateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Smallness gate for ell = 4s/n: C ||a||_inf mu^{2s/n} < 1/4, with C the grid
/// Gagliardo-Nirenberg estimate. The mu power reads the mass as ||u||_2^2.
struct MassCriticalGate {
  bool critical = false;
  double constant = 0.0;
  double value = 0.0;
  bool admissible = true;
};

inline MassCriticalGate mass_critical_gate(const DiscreteModel& model, double mu) {
  MassCriticalGate g;
  const auto& p = model.problem();
  g.critical = p.mass_critical();
  if (!g.critical) return g;
  g.constant = estimate_gagliardo_nirenberg(model.grid(), p.s, p.ell).constant;
  g.value = g.constant * sup_norm(p.weight_a) * std::pow(mu, 2.0 * p.s / p.n);
  g.admissible = g.value < 0.25;
  return g;
}

/// Gaussian of width L/8 centred at the origin, scaled to mass mu.
inline Field gaussian_initial_guess(const GridSpec& grid, double mu) {
  const double w = grid.half_width() / 8.0;
  Field u = sample(grid, [w](Point x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * w * w)); });
  u *= std::sqrt(mu / mass(u));
  return u;
}

/// omega = (K - int V|u|^2 - int f(u) conj(u)) / M(u).
inline double lagrange_multiplier(const Field& u, const DiscreteModel& model) {
  const auto e = energy(u, model);
  const double nonlinear = (model.ell() + 2.0) * e.potential_F;  // int a |u|^{ell+2}
  return (e.kinetic - e.potential_V - nonlinear) / mass(u);
}

/// ||(-Delta)^s u - omega u - V u - f(u)||_{L^2}.
inline double euler_lagrange_residual(const Field& u, const DiscreteModel& model, double omega) {
  Field r = fractional_laplacian(u, model.s());
  const Field f = nonlinear_force(u, model);
  const auto V = model.potential();
  for (std::size_t i = 0; i < u.size(); ++i) r[i] -= omega * u[i] + V[i] * u[i] + f[i];
  return l2_norm(r);
}

inline GroundStateResult minimize_on_sphere(const DiscreteModel& model, double mu, const Field& init,
                                            FlowOptions opt = {}) {
  if (!(mu > 0.0)) throw std::invalid_argument("minimize_on_sphere: mu must be > 0");
  if (!(opt.tau > 0.0)) throw std::invalid_argument("minimize_on_sphere: tau must be > 0");
  if (!(init.spec() == model.grid())) throw std::invalid_argument("minimize_on_sphere: grid mismatch");
  const double m0 = mass(init);
  if (!(m0 > 0.0)) throw std::invalid_argument("minimize_on_sphere: initial mass must be > 0");
  if (auto gate = mass_critical_gate(model, mu); !gate.admissible) {
    throw MassCriticalGateError("mass-critical gate: smallness condition C ||a||_inf mu^(2s/n) < 1/4 fails (C=" +
                                std::to_string(gate.constant) + ", value=" + std::to_string(gate.value) + ")");
  }
  const double tol = opt.tol > 0.0 ? opt.tol : 1e-8 * std::sqrt(mu);
  const double s = model.s();
  const auto xi2 = model.grid().squared_frequencies();
  std::vector<double> symbol(xi2.size());
  for (std::size_t i = 0; i < xi2.size(); ++i) symbol[i] = std::pow(xi2[i], s);
  const auto V = model.potential();

  Field u = init;
  u *= std::sqrt(mu / m0);
  double J = energy(u, model).total;

  GroundStateResult res{u, J, 0.0, INFINITY, 0, false, mu, FlowStatus::max_iterations, {}};
  Field best = u;
  double best_J = J;
  int rising = 0;

  for (int k = 1; k <= opt.max_iter; ++k) {
    // The omega_k u_k term makes fixed points satisfy the Euler-Lagrange
    // equation exactly instead of a tau-dependent rescaling of it. The shift
    // sigma_k, added on both sides, keeps 1 + tau (sigma_k + omega_k) >= 1;
    // without it tau |omega_k| > 1 flips the sign of the low modes each step.
    const double omega_k = lagrange_multiplier(u, model);
    const double sigma_k = std::max(0.0, -omega_k);
    Field rhs = nonlinear_force(u, model);
    for (std::size_t i = 0; i < u.size(); ++i)
      rhs[i] = u[i] + opt.tau * ((V[i] + omega_k + sigma_k) * u[i] + rhs[i]);
    auto rh = forward_transform(rhs);
    for (std::size_t i = 0; i < xi2.size(); ++i) rh.coeffs[i] /= 1.0 + opt.tau * (sigma_k + symbol[i]);
    Field next = inverse_transform(rh);
    next *= std::sqrt(mu / mass(next));

    const double J_next = energy(next, model).total;
    rising = J_next > J + 1e-12 * std::abs(J) ? rising + 1 : 0;
    const double dJ = std::abs(J_next - J);
    u = std::move(next);
    J = J_next;
    res.iterations = k;
    if (J < best_J) {
      best_J = J;
      best = u;
    }
    if (rising >= 5) {
      res.status = FlowStatus::energy_increase;
      res.diagnostic = "energy increased for 5 consecutive steps at iteration " + std::to_string(k) +
                       "; reduce tau";
      break;
    }
    if (k % 64 == 0 && spectral_tail_fraction(u) > opt.collapse_tail) {
      res.status = FlowStatus::collapse;
      res.diagnostic = "spectral tail fraction above " + std::to_string(opt.collapse_tail) +
                       ": grid-scale oscillation, refine the grid";
      break;
    }
    if (dJ <= 1e-12 * std::max(1.0, std::abs(J))) {
      const double omega = lagrange_multiplier(u, model);
      const double r = euler_lagrange_residual(u, model, omega);
      if (r <= tol) {
        res.status = FlowStatus::converged;
        break;
      }
    }
  }

  if (res.status != FlowStatus::converged) u = best;
  res.u = u;
  res.I_mu = energy(u, model).total;
  res.omega = lagrange_multiplier(u, model);
  res.residual = euler_lagrange_residual(u, model, res.omega);
  res.converged = res.status == FlowStatus::converged;
  if (res.I_mu >= 0.0) {
    res.converged = false;
    res.status = FlowStatus::vanishing;
    res.diagnostic = "J >= 0 at the final iterate (J = " + std::to_string(res.I_mu) +
                     ", residual = " + std::to_string(res.residual) +
                     "): the flow spreads toward the zero mode and no negative-energy minimizer exists";
  } else if (res.status == FlowStatus::max_iterations) {
    res.diagnostic = "no convergence within " + std::to_string(opt.max_iter) +
                     " iterations; best iterate returned (residual " + std::to_string(res.residual) + ")";
  }
  return res;
}

// ---------------------------------------------------------------------------
// Scaling probe

/// psi_lambda(x) = lambda^{n/2} psi(lambda x) by trigonometric interpolation of
/// the periodic extension of psi.
inline Field dilate(const Field& psi, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("dilate: need lambda > 0");
  const auto& spec = psi.spec();
  const int N = spec.points();
  const double L = spec.half_width();
  // E[j][k] = exp(i xi_k (lambda x_j + L)) / N, Nyquist term as a cosine.
  std::vector<cplx> E(std::size_t(N) * N);
  for (int j = 0; j < N; ++j) {
    const double y = lambda * spec.coordinate(j) + L;
    for (int k = 0; k < N; ++k) {
      const double xi = spec.wavenumber(k);
      E[std::size_t(j) * N + k] =
          (k == N / 2 ? cplx(std::cos(xi * y)) : std::polar(1.0, xi * y)) / double(N);
    }
  }
  const GridSpec axis(1, N, L);
  auto interp_line = [&](std::span<const cplx> line, std::span<cplx> out) {
    const auto coeffs = detail::raw_dft(axis, line, FFTW_FORWARD);
    for (int j = 0; j < N; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < N; ++k) acc += E[std::size_t(j) * N + k] * coeffs[k];
      out[j] = acc;
    }
  };
  Field out(spec);
  const double amp = std::pow(lambda, spec.dimension() / 2.0);
  if (spec.dimension() == 1) {
    interp_line(psi.values(), out.values());
  } else {
    std::vector<cplx> tmp(spec.size()), col(N), col_out(N);
    for (int i = 0; i < N; ++i)
      interp_line(psi.values().subspan(std::size_t(i) * N, N), std::span<cplx>(tmp).subspan(std::size_t(i) * N, N));
    for (int j = 0; j < N; ++j) {
      for (int i = 0; i < N; ++i) col[i] = tmp[std::size_t(i) * N + j];
      interp_line(col, col_out);
      for (int i = 0; i < N; ++i) out[std::size_t(i) * N + j] = col_out[i];
    }
  }
  out *= amp;
  return out;
}

struct ScalingRow {
  double lambda = 1.0;
  double energy = 0.0;
  double mass = 0.0;
  bool resolved = true;  // boundary amplitude of psi_lambda below 1e-6 of its max
};

struct ScalingProbe {
  std::vector<ScalingRow> rows;
  std::optional<std::size_t> first_negative;  // first resolved row with J < 0
};

inline ScalingProbe scaling_probe(const DiscreteModel& model, const Field& psi, std::span<const double> lambdas) {
  ScalingProbe probe;
  for (double lam : lambdas) {
    if (!(lam > 0.0 && lam <= 1.0)) throw std::invalid_argument("scaling_probe: need 0 < lambda <= 1");
    Field pl = dilate(psi, lam);
    ScalingRow row{lam, energy(pl, model).total, mass(pl), boundary_amplitude_ratio(pl) <= 1e-6};
    if (row.resolved && row.energy < 0.0 && !probe.first_negative) probe.first_negative = probe.rows.size();
    probe.rows.push_back(row);
  }
  return probe;
}

// ---------------------------------------------------------------------------
// Subadditivity probe

struct SubadditivityRow {
  double nu = 0.0;
  double I_nu = 0.0;
  double I_rest = 0.0;  // I_{mu - nu}
  double I_mu = 0.0;
  double gap = 0.0;     // I_nu + I_{mu-nu} - I_mu
  bool reliable = false;
};

inline std::vector<SubadditivityRow> subadditivity_probe(const DiscreteModel& model, double mu,
                                                         std::span<const double> nus, FlowOptions opt = {}) {
  std::map<double, GroundStateResult> cache;
  auto solve = [&](double m) -> const GroundStateResult& {
    auto it = cache.find(m);
    if (it == cache.end())
      it = cache.emplace(m, minimize_on_sphere(model, m, gaussian_initial_guess(model.grid(), m), opt)).first;
    return it->second;
  };
  const auto& full = solve(mu);
  std::vector<SubadditivityRow> rows;
  for (double nu : nus) {
    if (!(nu > 0.0 && nu < mu)) throw std::invalid_argument("subadditivity_probe: need 0 < nu < mu");
    // Fixed operand order keeps nu and mu - nu bitwise symmetric.
    const double lo = std::min(nu, mu - nu), hi = std::max(nu, mu - nu);
    const auto& a = solve(lo);
    const auto& b = solve(hi);
    SubadditivityRow r;
    r.nu = nu;
    r.I_nu = nu == lo ? a.I_mu : b.I_mu;
    r.I_rest = nu == lo ? b.I_mu : a.I_mu;
    r.I_mu = full.I_mu;
    r.gap = (a.I_mu + b.I_mu) - full.I_mu;
    r.reliable = a.converged && b.converged && full.converged;
    rows.push_back(r);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Concentration function

struct ConcentrationProfile {
  std::vector<double> radii;
  std::vector<double> values;
};

/// m(r) = max over lattice centres y of the mass in the periodic ball |x - y| < r.
inline ConcentrationProfile concentration_function(const Field& u, std::span<const double> radii) {
  const auto& spec = u.spec();
  const int N = spec.points();
  const double h = spec.spacing();
  const double total = mass(u);
  std::vector<cplx> density(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) density[i] = std::norm(u[i]) * spec.cell_volume();
  const auto dens_hat = detail::raw_dft(spec, density, FFTW_FORWARD);

  ConcentrationProfile prof;
  double running = 0.0;
  for (double r : radii) {
    if (!(r > 0.0 && r <= spec.half_width()))
      throw std::invalid_argument("concentration_function: radii must lie in (0, L]");
    // Ball indicator over periodic minimum-image displacements; the kernel is
    // even so correlation and convolution coincide.
    std::vector<cplx> ball(u.size());
    for (std::size_t i = 0; i < ball.size(); ++i) {
      auto idx = spec.unflatten(i);
      auto wrap = [N](int k) { return k <= N / 2 ? k : k - N; };
      double d0 = wrap(idx[0]) * h, d1 = spec.dimension() == 2 ? wrap(idx[1]) * h : 0.0;
      ball[i] = (d0 * d0 + d1 * d1 < r * r) ? 1.0 : 0.0;
    }
    auto ball_hat = detail::raw_dft(spec, ball, FFTW_FORWARD);
    for (std::size_t i = 0; i < ball_hat.size(); ++i) ball_hat[i] *= dens_hat[i];
    auto conv = detail::raw_dft(spec, ball_hat, FFTW_BACKWARD);
    double m = 0.0;
    for (auto z : conv) m = std::max(m, z.real() / double(u.size()));
    // Nested balls: enforce monotonicity against FFT roundoff, cap at M(u).
    running = std::min(std::max(running, m), total);
    prof.radii.push_back(r);
    prof.values.push_back(running);
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Radial decay

struct RadialDecay {
  double worst_ratio = 0.0;
  double radius_at_worst = 0.0;
  double angular_variance = 0.0;
};

/// Mean variance of |u| over lattice points sharing the same |x|^2, relative to max|u|^2.
inline double angular_variance(const Field& u) {
  const auto& spec = u.spec();
  std::map<long long, std::vector<double>> shells;
  const int half = spec.points() / 2;
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto idx = spec.unflatten(i);
    long long a = idx[0] - half, b = idx[1] - half;
    shells[a * a + b * b].push_back(std::abs(u[i]));
  }
  const double peak2 = std::pow(u.max_abs(), 2);
  if (peak2 == 0.0) return 0.0;
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& [r2, vals] : shells) {
    if (vals.size() < 2) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    acc += var / double(vals.size());
    ++count;
  }
  return count ? acc / double(count) / peak2 : 0.0;
}

/// max over 1 <= |x| <= 0.9 L of |u(x)| |x|^{n/2 - s} / ||(-Delta)^{s/2} u||.
inline RadialDecay radial_decay_check(const Field& u, double s) {
  const auto& spec = u.spec();
  if (spec.dimension() != 2) throw std::invalid_argument("radial_decay_check: requires n = 2");
  if (!(s > 0.5 && s < 1.0)) throw std::invalid_argument("radial_decay_check: requires 1/2 < s < n/2");
  RadialDecay out;
  out.angular_variance = angular_variance(u);
  if (out.angular_variance >= 1e-8) throw std::invalid_argument("radial_decay_check: input is not radial");
  const double norm = std::sqrt(kinetic(u, s));
  if (norm == 0.0) throw std::invalid_argument("radial_decay_check: zero kinetic norm");
  const double r_hi = 0.9 * spec.half_width();
  const auto r2 = spec.squared_radii();
  const double power = spec.dimension() / 2.0 - s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = std::sqrt(r2[i]);
    if (r < 1.0 || r > r_hi) continue;
    const double ratio = std::abs(u[i]) * std::pow(r, power) / norm;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.radius_at_worst = r;
    }
  }
  return out;
}

}  // namespace fracnls
