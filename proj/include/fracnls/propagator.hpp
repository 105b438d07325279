#pragma once

// Strang splitting for  i d_t Phi + (-Delta)^s Phi = V Phi + a |Phi|^ell Phi.
//
// Free part:      Phihat(t) = exp(+i t |xi|^{2s}) Phihat(0).
// Pointwise part: Phi <- Phi exp(-i dt (V + a |Phi|^ell)), exact since |Phi| is frozen.
// Both substeps are L^2 isometries, so the mass is conserved to roundoff.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracnls/grid.hpp"
#include "fracnls/model.hpp"

namespace fracnls {

inline Field nonlinear_phase_step(const Field& u, const DiscreteModel& model, double dt) {
  if (!(u.spec() == model.grid())) throw std::invalid_argument("nonlinear_phase_step: grid mismatch");
  Field out(u.spec());
  const auto V = model.potential();
  const auto a = model.weight();
  const double ell = model.ell();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rate = V[i] + a[i] * std::pow(std::abs(u[i]), ell);
    out[i] = u[i] * std::polar(1.0, -dt * rate);
  }
  return out;
}

/// Precomputed exp(i dt |xi|^{2s}) for repeated steps with a fixed dt.
class LinearPropagator {
 public:
  LinearPropagator(const GridSpec& grid, double s, double dt) : phases_(grid.size()) {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("linear propagator: need 0 < s <= 1");
    const auto xi2 = grid.squared_frequencies();
    for (std::size_t i = 0; i < xi2.size(); ++i) phases_[i] = std::polar(1.0, dt * std::pow(xi2[i], s));
  }

  Field apply(const Field& u) const {
    auto uh = forward_transform(u);
    for (std::size_t i = 0; i < phases_.size(); ++i) uh.coeffs[i] *= phases_[i];
    return inverse_transform(uh);
  }

 private:
  std::vector<cplx> phases_;
};

/// Half pointwise phase, full free flow, half pointwise phase.
inline Field strang_step(const Field& u, const DiscreteModel& model, double dt, const LinearPropagator& free) {
  return nonlinear_phase_step(free.apply(nonlinear_phase_step(u, model, 0.5 * dt)), model, 0.5 * dt);
}

inline Field strang_step(const Field& u, const DiscreteModel& model, double dt) {
  return strang_step(u, model, dt, LinearPropagator(model.grid(), model.s(), dt));
}

struct EvolutionConfig {
  double dt = 1e-3;               // negative integrates backward in time
  double T_total = 1.0;           // length of the time interval, > 0
  int stride = 1;                 // record every stride steps
  double energy_drift_warning = 1e-3;
  int snapshot_stride = 0;        // 0 disables snapshots

  void validate() const {
    if (!(dt != 0.0) || !std::isfinite(dt)) throw std::invalid_argument("evolve: dt must be nonzero");
    if (!(T_total > 0.0)) throw std::invalid_argument("evolve: T_total must be > 0");
    if (std::abs(dt) > T_total) throw std::invalid_argument("evolve: |dt| must not exceed T_total");
    if (stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
    if (snapshot_stride < 0) throw std::invalid_argument("evolve: snapshot stride must be >= 0");
  }

  long steps() const { return std::lround(T_total / std::abs(dt)); }
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<double> kinetic;
  std::vector<double> potential_V;
  std::vector<double> potential_F;
  std::vector<double> linf;
  std::vector<double> hs_norm_sq;  // sum (1+|xi|^2)^s |Phihat|^2
  std::vector<std::pair<double, Field>> snapshots;

  std::size_t size() const { return times.size(); }
};

enum class EvolutionStatus { ok, blow_up };

struct EvolutionResult {
  TrajectoryRecord record;
  Field final_field;
  EvolutionStatus status = EvolutionStatus::ok;
  double blowup_time = 0.0;  // last finite time before the abort
  bool drift_warning = false;
  std::string diagnostic;

  double max_mass_drift() const {
    double m0 = record.mass.front(), worst = 0.0;
    for (double m : record.mass) worst = std::max(worst, std::abs(m - m0) / m0);
    return worst;
  }
  double max_energy_drift() const {
    double e0 = record.energy.front(), worst = 0.0;
    for (double e : record.energy) worst = std::max(worst, std::abs(e - e0));
    return e0 != 0.0 ? worst / std::abs(e0) : worst;
  }
};

namespace detail {

inline void record_state(TrajectoryRecord& rec, double t, const Field& u, const DiscreteModel& model,
                         const std::vector<double>& hs_weight) {
  const auto uh = forward_transform(u);
  const auto e = energy(u, model, uh);
  double hs = 0.0;
  for (std::size_t i = 0; i < hs_weight.size(); ++i) hs += hs_weight[i] * std::norm(uh.coeffs[i]);
  rec.times.push_back(t);
  rec.mass.push_back(mass(u));
  rec.energy.push_back(e.total);
  rec.kinetic.push_back(e.kinetic);
  rec.potential_V.push_back(e.potential_V);
  rec.potential_F.push_back(e.potential_F);
  rec.linf.push_back(u.max_abs());
  rec.hs_norm_sq.push_back(hs);
}

}  // namespace detail

/// Integrates from t = 0 to sign(dt) T_total with fixed steps. Aborts (status
/// blow_up) when a value turns non-finite or max|Phi| exceeds 1e6 times its initial value.
inline EvolutionResult evolve(const Field& u0, const DiscreteModel& model, const EvolutionConfig& cfg) {
  cfg.validate();
  if (!(u0.spec() == model.grid())) throw std::invalid_argument("evolve: grid mismatch");
  const long steps = cfg.steps();
  const LinearPropagator free(model.grid(), model.s(), cfg.dt);
  const auto xi2 = model.grid().squared_frequencies();
  std::vector<double> hs_weight(xi2.size());
  for (std::size_t i = 0; i < xi2.size(); ++i) hs_weight[i] = std::pow(1.0 + xi2[i], model.s());

  EvolutionResult res{{}, u0, EvolutionStatus::ok, 0.0, false, {}};
  if (boundary_amplitude_ratio(u0) > 1e-6)
    res.diagnostic = "warning: boundary amplitude of the initial datum exceeds 1e-6 of its maximum";
  const double peak0 = u0.max_abs();
  detail::record_state(res.record, 0.0, u0, model, hs_weight);
  if (cfg.snapshot_stride > 0) res.record.snapshots.emplace_back(0.0, u0);

  Field u = u0;
  for (long k = 1; k <= steps; ++k) {
    Field next = strang_step(u, model, cfg.dt, free);
    const double t = k * cfg.dt;
    if (!next.is_finite() || next.max_abs() > 1e6 * peak0) {
      res.status = EvolutionStatus::blow_up;
      res.blowup_time = (k - 1) * cfg.dt;
      res.diagnostic = "blow-up: amplitude left the finite/1e6 bound between t=" + std::to_string(res.blowup_time) +
                       " and t=" + std::to_string(t);
      break;
    }
    u = std::move(next);
    if (k % cfg.stride == 0 || k == steps) detail::record_state(res.record, t, u, model, hs_weight);
    if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) res.record.snapshots.emplace_back(t, u);
  }
  res.final_field = u;
  const double e0 = res.record.energy.front();
  const double scale = e0 != 0.0 ? std::abs(e0) : 1.0;
  if (std::abs(res.record.energy.back() - e0) / scale > cfg.energy_drift_warning) {
    res.drift_warning = true;
    if (!res.diagnostic.empty()) res.diagnostic += "; ";
    res.diagnostic += "warning: relative energy drift above threshold";
  }
  return res;
}

/// A priori bound ||Phi(t)||_{H^s}^2 <= C ||phi||_2^2 + 4 J(phi) for ell < 4s/n.
/// From J >= K/2 - ||V||_inf M/2 - (||a||_inf G/(ell+2)) M^{(ell+2)/2-theta} K^theta and
/// Young's inequality A K^theta <= K/4 + (1-theta)(4 theta)^{theta/(1-theta)} A^{1/(1-theta)}:
///   ||Phi||_{H^s}^2 <= M + K <= (1 + 2||V||_inf + 4 c / M) M + 4 J.
struct EnergyBound {
  double constant = 0.0;  // C in the bound
  double bound = 0.0;     // C M + 4 J
  double gn_constant = 0.0;
};

inline EnergyBound energy_bound(const Field& phi, const DiscreteModel& model) {
  const auto& p = model.problem();
  const double theta = p.n * p.ell / (4.0 * p.s);
  if (!(theta < 1.0)) throw std::invalid_argument("energy_bound: requires ell < 4s/n");
  const Field extra[] = {phi};
  const double G = estimate_gagliardo_nirenberg(model.grid(), p.s, p.ell, extra).constant;
  const double M = mass(phi);
  const double A = sup_norm(p.weight_a) * G / (p.ell + 2.0) * std::pow(M, (p.ell + 2.0) / 2.0 - theta);
  const double c = (1.0 - theta) * std::pow(4.0 * theta, theta / (1.0 - theta)) * std::pow(A, 1.0 / (1.0 - theta));
  EnergyBound b;
  b.gn_constant = G;
  b.constant = 1.0 + 2.0 * sup_norm(p.potential) + 4.0 * c / M;
  b.bound = b.constant * M + 4.0 * energy(phi, model).total;
  return b;
}

}  // namespace fracnls
