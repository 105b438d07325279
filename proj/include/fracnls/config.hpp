#pragma once

// Flat run configuration:
//
//   # comment
//   grid.N = 1024
//   grid.L = 20*pi
//   model.potential = gaussian(-1, 2)
//   task.deltas = 1e-3, 1e-2
//
// Every problem is collected before reporting, so one pass shows all mistakes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracnls/ground_state.hpp"
#include "fracnls/hypothesis.hpp"
#include "fracnls/model.hpp"
#include "fracnls/stability.hpp"

namespace fracnls {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& e) {
    std::string out = "invalid configuration:";
    for (const auto& x : e) out += "\n  " + x;
    return out;
  }
  std::vector<std::string> errors_;
};

struct RunConfig {
  // grid
  int n = 1;
  int N = 256;
  double L = 32.0;
  // model
  ProblemModel model;
  std::string potential_text = "zero", weight_a_text = "constant(1)", weight_b_text = "constant(0)";
  // task
  double mu = 1.0;
  double tau = 1.0;
  double tol = -1.0;
  int max_iter = 200000;
  double dt = 1e-3;
  double T = 1.0;
  int stride = 10;
  std::vector<double> deltas{1e-3, 1e-2};
  std::vector<PerturbationKind> kinds{PerturbationKind::random_bump};
  double epsilon = 0.1;
  bool backward = true;
  std::vector<double> lambdas{1.0, 0.5, 0.25, 0.125};
  std::vector<double> nus{0.25, 0.5, 0.75};
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  std::uint64_t seed = 1;
  std::string initial = "gaussian";  // gaussian | ground_state | path of an FWF1 file
  double width = 0.0;                // 0 selects L/8
  double chirp = 0.0;
  // hypothesis declarations
  ParameterSet hyp;
  // io
  std::string out = ".";
  int snapshot_stride = 0;

  /// Key/value listing of every setting after defaults and validation.
  std::vector<std::pair<std::string, std::string>> effective;

  GridSpec grid() const { return GridSpec(n, N, L); }
  double initial_width() const { return width > 0.0 ? width : L / 8.0; }

  std::string echo() const {
    std::string s;
    for (const auto& [k, v] : effective) s += k + " = " + v + "\n";
    return s;
  }
};

namespace cfg {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && s[i] == '(') ++depth;
    if (i < s.size() && s[i] == ')') --depth;
    if (i == s.size() || (s[i] == sep && depth == 0)) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::optional<double> plain_number(std::string_view s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Decimal number, "pi", or a product of those ("20*pi").
inline std::optional<double> number(std::string_view text) {
  const auto factors = split(text, '*');
  double v = 1.0;
  for (const auto& f : factors) {
    if (f.empty()) return std::nullopt;
    if (f == "pi") {
      v *= pi;
    } else if (auto x = plain_number(f)) {
      v *= *x;
    } else {
      return std::nullopt;
    }
  }
  return v;
}

inline std::optional<long long> integer(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<bool> boolean(std::string_view s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  return std::nullopt;
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// name(arg, ...) with numeric args.
inline bool call(std::string_view text, std::string& name, std::vector<double>& args) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    name = trim(text);
    args.clear();
    return true;
  }
  if (text.back() != ')') return false;
  name = trim(text.substr(0, open));
  args.clear();
  const auto inner = trim(text.substr(open + 1, text.size() - open - 2));
  if (inner.empty()) return true;
  for (const auto& a : split(inner, ',')) {
    auto v = number(a);
    if (!v) return false;
    args.push_back(*v);
  }
  return true;
}

template <class Variant>
std::optional<Variant> profile(std::string_view text, bool allow_zero, bool allow_constant, std::string& err) {
  std::string name;
  std::vector<double> args;
  if (!call(text, name, args)) {
    err = "cannot parse profile '" + std::string(text) + "'";
    return std::nullopt;
  }
  auto need = [&](std::size_t k, const char* usage) {
    if (args.size() == k) return true;
    err = std::string("expected ") + usage;
    return false;
  };
  if (name == "zero" && allow_zero) {
    if (!need(0, "zero")) return std::nullopt;
    if constexpr (std::is_constructible_v<Variant, ZeroProfile>) return Variant(ZeroProfile{});
  }
  if (name == "constant" && allow_constant) {
    if (!need(1, "constant(c)")) return std::nullopt;
    if constexpr (std::is_constructible_v<Variant, ConstantProfile>) return Variant(ConstantProfile{args[0]});
  }
  if (name == "gaussian") {
    if (!need(2, "gaussian(A, w)")) return std::nullopt;
    return Variant(GaussianProfile{args[0], args[1]});
  }
  if (name == "cutoff_power") {
    if (!need(3, "cutoff_power(A, gamma, r0)")) return std::nullopt;
    return Variant(CutoffPowerProfile{args[0], args[1], args[2]});
  }
  err = "unknown profile '" + name + "'";
  return std::nullopt;
}

inline std::optional<PerturbationKind> kind(std::string_view s) {
  if (s == "random") return PerturbationKind::random_bump;
  if (s == "dilation") return PerturbationKind::dilation;
  if (s == "translation") return PerturbationKind::translation;
  return std::nullopt;
}

}  // namespace cfg

/// Subcommands a configuration can be validated for.
enum class Task { check, ground_state, evolve, stability, probe_scaling, probe_subadd, probe_concentration };

inline std::optional<Task> parse_task(std::string_view s) {
  if (s == "check") return Task::check;
  if (s == "ground-state") return Task::ground_state;
  if (s == "evolve") return Task::evolve;
  if (s == "stability") return Task::stability;
  if (s == "probe-scaling") return Task::probe_scaling;
  if (s == "probe-subadd") return Task::probe_subadd;
  if (s == "probe-concentration") return Task::probe_concentration;
  return std::nullopt;
}

inline bool uses_mass(Task t) {
  return t == Task::ground_state || t == Task::stability || t == Task::probe_subadd ||
         t == Task::probe_concentration || t == Task::probe_scaling;
}

inline RunConfig parse_config(std::string_view text, std::optional<Task> task = std::nullopt) {
  RunConfig c;
  std::vector<std::string> errors;
  std::map<std::string, std::pair<std::string, int>> raw;  // key -> (value, line)

  {
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      const auto t = cfg::trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        errors.push_back("line " + std::to_string(lineno) + ": expected 'section.key = value'");
        continue;
      }
      const auto key = cfg::trim(t.substr(0, eq));
      const auto val = cfg::trim(t.substr(eq + 1));
      if (raw.count(key))
        errors.push_back("line " + std::to_string(lineno) + ": " + key + ": duplicate key");
      raw[key] = {val, lineno};
    }
  }

  std::map<std::string, bool> consumed;
  auto where = [&](const std::string& key) { return "line " + std::to_string(raw[key].second) + ": " + key + ": "; };
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = raw.find(key);
    if (it == raw.end()) return nullptr;
    consumed[key] = true;
    return &it->second.first;
  };
  auto num = [&](const std::string& key, double& dst) {
    if (auto v = get(key)) {
      if (auto x = cfg::number(*v)) dst = *x;
      else errors.push_back(where(key) + "expected a number, got '" + *v + "'");
    }
  };
  auto integer = [&](const std::string& key, auto& dst) {
    if (auto v = get(key)) {
      auto x = cfg::integer(*v);
      if (x && *x >= 0) dst = static_cast<std::remove_reference_t<decltype(dst)>>(*x);
      else if (x) errors.push_back(where(key) + "must be >= 0");
      else errors.push_back(where(key) + "expected an integer, got '" + *v + "'");
    }
  };
  auto flag = [&](const std::string& key, bool& dst) {
    if (auto v = get(key)) {
      if (auto b = cfg::boolean(*v)) dst = *b;
      else errors.push_back(where(key) + "expected true or false, got '" + *v + "'");
    }
  };
  auto list = [&](const std::string& key, std::vector<double>& dst) {
    if (auto v = get(key)) {
      std::vector<double> out;
      bool ok = true;
      for (const auto& item : cfg::split(*v, ',')) {
        if (auto x = cfg::number(item)) out.push_back(*x);
        else ok = false;
      }
      if (ok && !out.empty()) dst = out;
      else errors.push_back(where(key) + "expected a comma-separated list of numbers, got '" + *v + "'");
    }
  };
  auto text_of = [&](const std::string& key, std::string& dst) {
    if (auto v = get(key)) dst = *v;
  };
  // Exact values for the hypothesis calculator. Returns nullopt silently when absent.
  auto rational_of = [&](const std::string& key, std::string_view fallback) -> std::optional<Rational> {
    auto it = raw.find(key);
    const std::string src = it != raw.end() ? it->second.first : std::string(fallback);
    if (src.empty()) return std::nullopt;
    try {
      return Rational::parse(src);
    } catch (const std::exception&) {
      if (it != raw.end()) errors.push_back(where(key) + "expected an exact decimal or fraction, got '" + src + "'");
      return std::nullopt;
    }
  };
  auto exponent_of = [&](const std::string& key, Exponent& dst) {
    if (auto v = get(key)) {
      try {
        dst = Exponent::parse(*v);
      } catch (const std::exception&) {
        errors.push_back(where(key) + "expected a positive exponent or inf, got '" + *v + "'");
      }
    }
  };

  // grid
  integer("grid.n", c.n);
  integer("grid.N", c.N);
  num("grid.L", c.L);
  if (c.n != 1 && c.n != 2) errors.push_back("grid.n: grid invariant \"n in {1, 2}\" violated (n = " + std::to_string(c.n) + ")");
  if (c.N % 2 != 0) errors.push_back("grid.N: grid invariant \"N even\" violated (N = " + std::to_string(c.N) + ")");
  else if (c.N < 8) errors.push_back("grid.N: grid invariant \"N >= 8\" violated (N = " + std::to_string(c.N) + ")");
  if (!(c.L > 0.0)) errors.push_back("grid.L: grid invariant \"L > 0\" violated");

  // model
  auto& m = c.model;
  m.n = c.n;
  num("model.s", m.s);
  num("model.ell", m.ell);
  text_of("model.potential", c.potential_text);
  text_of("model.weight_a", c.weight_a_text);
  text_of("model.weight_b", c.weight_b_text);
  {
    std::string err;
    if (auto p = cfg::profile<PotentialModel>(c.potential_text, true, false, err)) m.potential = *p;
    else errors.push_back("model.potential: " + err);
    if (auto p = cfg::profile<WeightModel>(c.weight_a_text, false, true, err)) m.weight_a = *p;
    else errors.push_back("model.weight_a: " + err);
    if (auto p = cfg::profile<WeightModel>(c.weight_b_text, false, true, err)) m.weight_b = *p;
    else errors.push_back("model.weight_b: " + err);
  }
  if (!(m.s > 0.0 && m.s <= 1.0)) errors.push_back("model.s: model precondition \"0 < s <= 1\" violated");
  if (!(m.ell > 0.0)) errors.push_back("model.ell: model precondition \"ell > 0\" violated");
  {
    const bool any = raw.count("model.kappa") || raw.count("model.beta") || raw.count("model.delta_F") ||
                     raw.count("model.sigma") || raw.count("model.R") || raw.count("model.N_thresh");
    FParameters fp;
    fp.beta = m.ell;
    fp.sigma = m.ell;
    num("model.kappa", fp.kappa);
    num("model.R", fp.R);
    num("model.N_thresh", fp.N_thresh);
    num("model.delta_F", fp.delta_F);
    num("model.beta", fp.beta);
    num("model.sigma", fp.sigma);
    if (any) m.f_params = fp;
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    errors.push_back(std::string("model: ") + e.what());
  }

  // task
  num("task.mu", c.mu);
  num("task.tau", c.tau);
  num("task.tol", c.tol);
  integer("task.max_iter", c.max_iter);
  num("task.dt", c.dt);
  num("task.T", c.T);
  integer("task.stride", c.stride);
  list("task.deltas", c.deltas);
  if (auto v = get("task.kinds")) {
    std::vector<PerturbationKind> ks;
    for (const auto& item : cfg::split(*v, ',')) {
      if (auto k = cfg::kind(item)) ks.push_back(*k);
      else errors.push_back(where("task.kinds") + "unknown perturbation kind '" + item + "' (random, dilation, translation)");
    }
    if (!ks.empty()) c.kinds = ks;
  }
  num("task.epsilon", c.epsilon);
  flag("task.backward", c.backward);
  list("task.lambdas", c.lambdas);
  list("task.nus", c.nus);
  list("task.radii", c.radii);
  integer("task.seed", c.seed);
  text_of("task.initial", c.initial);
  num("task.width", c.width);
  num("task.chirp", c.chirp);

  if (!(c.mu > 0.0)) errors.push_back("task.mu: ground-state precondition \"mu > 0\" violated");
  if (!(c.tau > 0.0)) errors.push_back("task.tau: gradient-flow precondition \"tau > 0\" violated");
  if (c.max_iter < 1) errors.push_back("task.max_iter: must be >= 1");
  if (!(c.dt != 0.0)) errors.push_back("task.dt: propagator precondition \"dt != 0\" violated");
  if (!(c.T > 0.0)) errors.push_back("task.T: propagator precondition \"T > 0\" violated");
  else if (std::abs(c.dt) > c.T) errors.push_back("task.dt: propagator precondition \"|dt| <= T\" violated");
  if (c.stride < 1) errors.push_back("task.stride: must be >= 1");
  for (double d : c.deltas)
    if (!(d >= 0.0)) errors.push_back("task.deltas: stability precondition \"delta >= 0\" violated");
  if (!(c.epsilon > 0.0)) errors.push_back("task.epsilon: must be > 0");
  for (double l : c.lambdas)
    if (!(l > 0.0 && l <= 1.0)) errors.push_back("task.lambdas: scaling-probe precondition \"0 < lambda <= 1\" violated");
  for (double nu : c.nus)
    if (!(nu > 0.0 && nu < 1.0)) errors.push_back("task.nus: subadditivity precondition \"0 < nu/mu < 1\" violated (nus are fractions of mu)");
  for (double r : c.radii)
    if (!(r > 0.0 && r <= c.L)) errors.push_back("task.radii: concentration precondition \"0 < r <= L\" violated");
  if (!(c.width >= 0.0)) errors.push_back("task.width: must be >= 0");

  // hypothesis declarations; s, ell, n come from the model block
  {
    auto& h = c.hyp;
    h.n = c.n;
    if (auto v = rational_of("model.s", "1")) h.s = *v;
    if (auto v = rational_of("model.ell", "2")) h.ell = *v;
    if (m.f_params) {
      // beta and sigma default to ell, as in the model block
      const std::string ell_text = raw.count("model.ell") ? raw["model.ell"].first : "2";
      h.beta = rational_of("model.beta", ell_text);
      h.delta_F = rational_of("model.delta_F", "");
      h.sigma = rational_of("model.sigma", ell_text);
    }
    exponent_of("hyp.p1", h.p1);
    exponent_of("hyp.p2", h.p2);
    exponent_of("hyp.q1", h.q1);
    exponent_of("hyp.q2", h.q2);
    if (raw.count("hyp.q")) {
      Exponent q;
      exponent_of("hyp.q", q);
      h.q_critical = q;
    }
    if (auto v = get("hyp.strichartz_q")) {
      try {
        h.strichartz_q = Rational::parse(*v);
      } catch (const std::exception&) {
        errors.push_back(where("hyp.strichartz_q") + "expected an exact decimal or fraction");
      }
    }
    h.V_bounded = h.a_bounded = h.b_bounded = true;
    flag("hyp.radial", h.radial);
    flag("hyp.a_bounded", h.a_bounded);
    flag("hyp.b_bounded", h.b_bounded);
    flag("hyp.V_bounded", h.V_bounded);
    flag("hyp.V_nonnegative", h.V_nonnegative);
    flag("hyp.cond_V", h.cond_V);
    for (const char* k : {"model.s", "model.ell", "model.beta", "model.delta_F", "model.sigma"}) consumed[k] = true;
    try {
      h.validate();
    } catch (const std::invalid_argument& e) {
      errors.push_back(std::string("hyp: ") + e.what());
    }
  }

  // io
  text_of("io.out", c.out);
  integer("io.snapshot_stride", c.snapshot_stride);

  for (const auto& [k, v] : raw)
    if (!consumed.count(k)) errors.push_back("line " + std::to_string(v.second) + ": " + k + ": unknown key");

  // Mass-critical smallness gate, only when the grid and model are otherwise valid.
  if (errors.empty() && m.mass_critical() && (!task || uses_mass(*task))) {
    const DiscreteModel dm(m, c.grid());
    const auto gate = mass_critical_gate(dm, c.mu);
    if (!gate.admissible)
      errors.push_back("task.mu: mass-critical gate: smallness condition C ||a||_inf mu^(2s/n) < 1/4 fails (C = " +
                       cfg::fmt(gate.constant) + ", value = " + cfg::fmt(gate.value) + ")");
  }

  if (!errors.empty()) throw ConfigError(errors);

  auto list_str = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + cfg::fmt(v[i]);
    return s;
  };
  auto& e = c.effective;
  e = {{"grid.n", std::to_string(c.n)},
       {"grid.N", std::to_string(c.N)},
       {"grid.L", cfg::fmt(c.L)},
       {"model.s", cfg::fmt(m.s)},
       {"model.ell", cfg::fmt(m.ell)},
       {"model.potential", c.potential_text},
       {"model.weight_a", c.weight_a_text},
       {"model.weight_b", c.weight_b_text}};
  if (m.f_params) {
    const auto& fp = *m.f_params;
    e.insert(e.end(), {{"model.kappa", cfg::fmt(fp.kappa)},
                       {"model.R", cfg::fmt(fp.R)},
                       {"model.N_thresh", cfg::fmt(fp.N_thresh)},
                       {"model.delta_F", cfg::fmt(fp.delta_F)},
                       {"model.beta", cfg::fmt(fp.beta)},
                       {"model.sigma", cfg::fmt(fp.sigma)}});
  }
  std::string kinds;
  for (std::size_t i = 0; i < c.kinds.size(); ++i) kinds += std::string(i ? ", " : "") + to_string(c.kinds[i]);
  e.insert(e.end(), {{"task.mu", cfg::fmt(c.mu)},
                     {"task.tau", cfg::fmt(c.tau)},
                     {"task.tol", cfg::fmt(c.tol)},
                     {"task.max_iter", std::to_string(c.max_iter)},
                     {"task.dt", cfg::fmt(c.dt)},
                     {"task.T", cfg::fmt(c.T)},
                     {"task.stride", std::to_string(c.stride)},
                     {"task.deltas", list_str(c.deltas)},
                     {"task.kinds", kinds},
                     {"task.epsilon", cfg::fmt(c.epsilon)},
                     {"task.backward", c.backward ? "true" : "false"},
                     {"task.lambdas", list_str(c.lambdas)},
                     {"task.nus", list_str(c.nus)},
                     {"task.radii", list_str(c.radii)},
                     {"task.seed", std::to_string(c.seed)},
                     {"task.initial", c.initial},
                     {"task.width", cfg::fmt(c.initial_width())},
                     {"task.chirp", cfg::fmt(c.chirp)}});
  const auto& h = c.hyp;
  e.insert(e.end(), {{"hyp.p1", h.p1.str()},
                     {"hyp.p2", h.p2.str()},
                     {"hyp.q1", h.q1.str()},
                     {"hyp.q2", h.q2.str()},
                     {"hyp.q", h.q_critical ? h.q_critical->str() : "none"},
                     {"hyp.strichartz_q", h.strichartz_q ? h.strichartz_q->str() : "none"},
                     {"hyp.radial", h.radial ? "true" : "false"},
                     {"hyp.a_bounded", h.a_bounded ? "true" : "false"},
                     {"hyp.b_bounded", h.b_bounded ? "true" : "false"},
                     {"hyp.V_bounded", h.V_bounded ? "true" : "false"},
                     {"hyp.V_nonnegative", h.V_nonnegative ? "true" : "false"},
                     {"hyp.cond_V", h.cond_V ? "true" : "false"},
                     {"io.out", c.out},
                     {"io.snapshot_stride", std::to_string(c.snapshot_stride)}});
  return c;
}

}  // namespace fracnls
