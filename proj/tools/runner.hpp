#pragma once

// Subcommand orchestration: compute, write CSV/FWF1 outputs and a manifest.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracnls/config.hpp"
#include "fracnls/fwf1.hpp"
#include "fracnls/ground_state.hpp"
#include "fracnls/hypothesis.hpp"
#include "fracnls/propagator.hpp"
#include "fracnls/stability.hpp"
#include "fracnls/version.hpp"

namespace fracnls::tool {

enum ExitCode { ok = 0, validation = 1, numerical = 2, io = 3 };

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Collects output files and summary values for the manifest.
class Session {
 public:
  Session(const RunConfig& cfg, std::string subcommand) : cfg_(cfg), dir_(cfg.out), subcommand_(std::move(subcommand)) {
    std::filesystem::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  /// CSV with a one-line header; every field already formatted.
  void csv(const std::string& name, const std::string& header, const std::vector<std::vector<std::string>>& rows) {
    std::ofstream os(path(name), std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + path(name) + " for writing");
    os << header << "\n";
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
      os << "\n";
    }
    if (!os) throw std::ios_base::failure("write failed: " + path(name));
    outputs_.push_back(name);
  }

  void text(const std::string& name, const std::string& body) {
    std::ofstream os(path(name), std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open " + path(name) + " for writing");
    os << body;
    if (!os) throw std::ios_base::failure("write failed: " + path(name));
    outputs_.push_back(name);
  }

  void field(const std::string& name, const Field& f) {
    write_fwf1(path(name), f, cfg_.model.s);
    outputs_.push_back(name);
  }

  nlohmann::ordered_json& summary() { return summary_; }

  void write_manifest(int exit_code, bool partial, const std::string& message, double wall) const {
    nlohmann::ordered_json m;
    m["subcommand"] = subcommand_;
    m["version"] = version;
    m["seed"] = cfg_.seed;
    m["exit_code"] = exit_code;
    m["partial"] = partial;
    if (!message.empty()) m["message"] = message;
    m["wall_time_s"] = wall;
    nlohmann::ordered_json conf = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg_.effective) conf[k] = v;
    m["config"] = conf;
    m["outputs"] = outputs_;
    m["summary"] = summary_;
    std::ofstream os(path("manifest.json"));
    if (!os) throw std::ios_base::failure("cannot write manifest in " + dir_.string());
    os << m.dump(2) << "\n";
  }

 private:
  const RunConfig& cfg_;
  std::filesystem::path dir_;
  std::string subcommand_;
  std::vector<std::string> outputs_;
  nlohmann::ordered_json summary_ = nlohmann::ordered_json::object();
};

inline FlowOptions flow_options(const RunConfig& c) {
  FlowOptions o;
  o.tau = c.tau;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  return o;
}

/// Gaussian of the configured width and chirp, scaled to mass mu.
inline Field gaussian_datum(const RunConfig& c) {
  const double w = c.initial_width(), chirp = c.chirp;
  Field u = sample(c.grid(), [&](Point x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return std::exp(-r2 / (2.0 * w * w)) * std::polar(1.0, chirp * r2);
  });
  u *= std::sqrt(c.mu / mass(u));
  return u;
}

inline GroundStateResult solve_ground_state(const RunConfig& c, const DiscreteModel& model, std::ostream& log) {
  auto gs = minimize_on_sphere(model, c.mu, gaussian_initial_guess(model.grid(), c.mu), flow_options(c));
  log << "ground state: I_mu = " << num(gs.I_mu) << ", omega = " << num(gs.omega) << ", residual = " << num(gs.residual)
      << ", iterations = " << gs.iterations << ", status = " << to_string(gs.status) << "\n";
  return gs;
}

inline Field initial_datum(const RunConfig& c, const DiscreteModel& model, std::ostream& log) {
  if (c.initial == "gaussian") return gaussian_datum(c);
  if (c.initial == "ground_state") {
    auto gs = solve_ground_state(c, model, log);
    if (!gs.converged) throw NumericalFailure("ground state did not converge: " + std::string(to_string(gs.status)));
    return gs.u;
  }
  auto stored = read_fwf1(c.initial);
  if (!(stored.field.spec() == model.grid())) throw std::invalid_argument("task.initial: stored field grid differs from grid.*");
  return stored.field;
}

inline int run_check(const RunConfig& c, Session& out, std::ostream& log) {
  const auto report = build_hypothesis_report(c.hyp, &c.model.potential);
  std::string human = report.human();
  std::string kv = report.key_values();
  if (c.model.f_params) {
    const auto sc = check_structural_conditions(c.model, c.L);
    std::ostringstream os;
    os << "Structural conditions on F (sampled on the grid box)\n";
    os << "  " << (sc.exponent_ok ? "ok   " : "FAIL ") << "n beta/2 + delta_F - 2s < 0   (margin " << num(sc.exponent_margin) << ")\n";
    os << "  " << (sc.lower_bound_ok ? "ok   " : "FAIL ") << "F >= kappa |x|^-delta_F |z|^(2+beta)"
       << (sc.lower_bound_symbolic ? "   (exact)" : "   (sampled)") << "\n";
    os << "  " << (sc.growth_ok ? "ok   " : "FAIL ") << "F(theta z) >= theta^(2+sigma) F(z)\n";
    human += os.str();
    kv += std::string("structural.exponent_ok=") + (sc.exponent_ok ? "true" : "false") + "\n";
    kv += std::string("structural.lower_bound_ok=") + (sc.lower_bound_ok ? "true" : "false") + "\n";
    kv += std::string("structural.growth_ok=") + (sc.growth_ok ? "true" : "false") + "\n";
  }
  out.text("report.txt", human);
  out.text("report.kv", kv);
  out.summary()["existence_applies"] = report.existence.applies;
  out.summary()["existence_branch"] = report.existence.branch;
  log << human;
  return ok;
}

inline int run_ground_state(const RunConfig& c, Session& out, std::ostream& log) {
  const DiscreteModel model(c.model, c.grid());
  const auto gs = solve_ground_state(c, model, log);
  out.field("ground_state.fwf1", gs.u);
  out.csv("ground_state.csv", "mu,I_mu,omega,residual,iterations,status",
          {{num(c.mu), num(gs.I_mu), num(gs.omega), num(gs.residual), std::to_string(gs.iterations), to_string(gs.status)}});
  out.summary()["I_mu"] = gs.I_mu;
  out.summary()["omega"] = gs.omega;
  out.summary()["status"] = to_string(gs.status);
  if (!gs.converged) throw NumericalFailure("ground state did not converge: " + std::string(to_string(gs.status)) +
                                            (gs.diagnostic.empty() ? "" : " (" + gs.diagnostic + ")"));
  return ok;
}

inline int run_evolve(const RunConfig& c, Session& out, std::ostream& log) {
  const DiscreteModel model(c.model, c.grid());
  const Field u0 = initial_datum(c, model, log);
  EvolutionConfig ec;
  ec.dt = c.dt;
  ec.T_total = c.T;
  ec.stride = c.stride;
  ec.snapshot_stride = c.snapshot_stride;
  const auto res = evolve(u0, model, ec);
  std::optional<EnergyBound> bound;
  if (c.model.n * c.model.ell < 4.0 * c.model.s) bound = energy_bound(u0, model);
  const auto& r = res.record;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < r.size(); ++i)
    rows.push_back({num(r.times[i]), num(r.mass[i]), num(r.energy[i]), num(r.kinetic[i]), num(r.potential_V[i]),
                    num(r.potential_F[i]), num(r.linf[i]), num(r.hs_norm_sq[i]), bound ? num(bound->bound) : "nan"});
  out.csv("trajectory.csv", "t,mass,energy,kinetic,potential_V,potential_F,linf,hs_norm_sq,hs_bound", rows);
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    // named by step number
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%06ld.fwf1", std::lround(r.snapshots[k].first / c.dt));
    out.field(name, r.snapshots[k].second);
  }
  out.field("final.fwf1", res.final_field);
  out.summary()["max_mass_drift"] = res.max_mass_drift();
  out.summary()["max_energy_drift"] = res.max_energy_drift();
  out.summary()["drift_warning"] = res.drift_warning;
  if (bound) out.summary()["hs_bound"] = bound->bound;
  if (!res.diagnostic.empty()) {
    out.summary()["diagnostic"] = res.diagnostic;
    log << res.diagnostic << "\n";
  }
  log << "evolve: steps = " << ec.steps() << ", mass drift = " << num(res.max_mass_drift())
      << ", energy drift = " << num(res.max_energy_drift()) << "\n";
  if (res.status == EvolutionStatus::blow_up) throw NumericalFailure(res.diagnostic);
  return ok;
}

inline int run_stability(const RunConfig& c, Session& out, std::ostream& log) {
  const DiscreteModel model(c.model, c.grid());
  const auto gs = solve_ground_state(c, model, log);
  if (!gs.converged) throw NumericalFailure("ground state did not converge: " + std::string(to_string(gs.status)));
  StabilityOptions opt;
  opt.T = c.T;
  opt.dt = std::abs(c.dt);
  opt.stride = c.stride;
  opt.seed = c.seed;
  opt.backward = c.backward;
  opt.epsilon = c.epsilon;
  const auto reports = run_stability_experiment(model, gs, c.deltas, c.kinds, opt);
  std::vector<std::vector<std::string>> summary;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& rep = reports[i];
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < rep.times.size(); ++k)
      rows.push_back({num(rep.times[k]), num(rep.distance[k]), num(rep.mass_drift[k]), num(rep.energy_drift[k])});
    char name[64];
    std::snprintf(name, sizeof name, "stability_%s_%02zu.csv", to_string(rep.kind), i);
    out.csv(name, "t,d,mass_drift,energy_drift", rows);
    summary.push_back({num(rep.delta), to_string(rep.kind), num(rep.delta_in), num(rep.initial_distance()),
                       num(rep.sup_d), rep.delta > 0 ? num(rep.sup_d / rep.delta) : "nan",
                       rep.blew_up ? "true" : "false", num(rep.epsilon)});
  }
  out.csv("stability_summary.csv", "delta,kind,delta_in,d0,sup_d,sup_d_over_delta,blew_up,epsilon", summary);
  std::vector<StabilityReport> positive;
  for (const auto& r : reports)
    if (r.delta > 0.0) positive.push_back(r);
  std::string v = "inconclusive";
  std::size_t distinct = 0;
  {
    std::vector<double> ds;
    for (const auto& r : positive)
      if (std::find(ds.begin(), ds.end(), r.delta) == ds.end()) ds.push_back(r.delta);
    distinct = ds.size();
  }
  if (distinct >= 2) v = to_string(verdict(positive, c.epsilon));
  else v = "insufficient deltas";
  out.summary()["verdict"] = v;
  out.summary()["I_mu"] = gs.I_mu;
  log << "stability verdict (epsilon = " << num(c.epsilon) << "): " << v << "\n";
  return ok;
}

inline int run_probe_scaling(const RunConfig& c, Session& out, std::ostream& log) {
  const DiscreteModel model(c.model, c.grid());
  const Field psi = gaussian_datum(c);
  const auto probe = scaling_probe(model, psi, c.lambdas);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : probe.rows) rows.push_back({num(r.lambda), num(r.energy), num(r.mass), r.resolved ? "true" : "false"});
  out.csv("scaling.csv", "lambda,energy,mass,resolved", rows);
  if (probe.first_negative) {
    out.summary()["first_negative_lambda"] = probe.rows[*probe.first_negative].lambda;
    log << "scaling probe: J < 0 at lambda = " << num(probe.rows[*probe.first_negative].lambda) << "\n";
  } else {
    out.summary()["first_negative_lambda"] = nullptr;
    log << "scaling probe: no resolved lambda with J < 0\n";
  }
  return ok;
}

inline int run_probe_subadd(const RunConfig& c, Session& out, std::ostream& log) {
  const DiscreteModel model(c.model, c.grid());
  std::vector<double> nus;
  for (double f : c.nus) nus.push_back(f * c.mu);
  const auto rows = subadditivity_probe(model, c.mu, nus, flow_options(c));
  std::vector<std::vector<std::string>> out_rows;
  bool reliable = true;
  for (const auto& r : rows) {
    out_rows.push_back({num(r.nu), num(r.I_nu), num(r.I_rest), num(r.I_mu), num(r.gap), r.reliable ? "true" : "false"});
    reliable = reliable && r.reliable;
    log << "subadditivity: nu = " << num(r.nu) << ", gap = " << num(r.gap) << (r.reliable ? "" : " (unreliable)") << "\n";
  }
  out.csv("subadditivity.csv", "nu,I_nu,I_rest,I_mu,gap,reliable", out_rows);
  out.summary()["all_reliable"] = reliable;
  if (!reliable) throw NumericalFailure("a sub-run of the subadditivity probe did not converge");
  return ok;
}

inline int run_probe_concentration(const RunConfig& c, Session& out, std::ostream& log) {
  const DiscreteModel model(c.model, c.grid());
  const Field u = initial_datum(c, model, log);
  const auto prof = concentration_function(u, c.radii);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < prof.radii.size(); ++i) rows.push_back({num(prof.radii[i]), num(prof.values[i])});
  out.csv("concentration.csv", "r,m", rows);
  out.summary()["mass"] = mass(u);
  log << "concentration: m(r_max) = " << num(prof.values.back()) << " of mass " << num(mass(u)) << "\n";
  return ok;
}

/// Runs one subcommand; returns the process exit code. The manifest is written
/// whenever the output directory is usable, with partial = true on failure.
inline int run(Task task, const std::string& name, const RunConfig& cfg, bool quiet) {
  std::ostringstream sink;
  std::ostream& log = quiet ? static_cast<std::ostream&>(sink) : std::cout;
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  std::optional<Session> session;
  try {
    session.emplace(cfg, name);
  } catch (const std::exception& e) {
    std::cerr << "error: cannot prepare output directory: " << e.what() << "\n";
    return io;
  }
  if (!quiet) log << "effective configuration:\n" << cfg.echo();
  int code = ok;
  std::string message;
  try {
    switch (task) {
      case Task::check: code = run_check(cfg, *session, log); break;
      case Task::ground_state: code = run_ground_state(cfg, *session, log); break;
      case Task::evolve: code = run_evolve(cfg, *session, log); break;
      case Task::stability: code = run_stability(cfg, *session, log); break;
      case Task::probe_scaling: code = run_probe_scaling(cfg, *session, log); break;
      case Task::probe_subadd: code = run_probe_subadd(cfg, *session, log); break;
      case Task::probe_concentration: code = run_probe_concentration(cfg, *session, log); break;
    }
  } catch (const NumericalFailure& e) {
    code = numerical;
    message = e.what();
  } catch (const FormatError& e) {
    code = io;
    message = e.what();
  } catch (const std::ios_base::failure& e) {
    code = io;
    message = e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    code = io;
    message = e.what();
  } catch (const std::invalid_argument& e) {
    code = validation;
    message = e.what();
  } catch (const std::exception& e) {
    code = numerical;
    message = e.what();
  }
  if (code != ok) std::cerr << "error: " << message << "\n";
  try {
    session->write_manifest(code, code != ok, message, wall());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (code == ok) code = io;
  }
  return code;
}

}  // namespace fracnls::tool
