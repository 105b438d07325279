#pragma once

// Potential, gauge power-law nonlinearity and the conserved functionals.
//
// Built-in law: f(x, z) = a(x) |z|^ell z, F(x, |z|) = a(x) |z|^{ell+2} / (ell+2).
// Integrals use the rectangle rule h^n sum, like the mass.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fracnls/grid.hpp"

namespace fracnls {

struct ZeroProfile {};

struct ConstantProfile {
  double value = 0.0;
};

/// amplitude * exp(-|x|^2 / width^2)
struct GaussianProfile {
  double amplitude = 0.0;
  double width = 1.0;
};

/// amplitude * max(|x|, core_radius)^(-exponent)
struct CutoffPowerProfile {
  double amplitude = 0.0;
  double exponent = 1.0;
  double core_radius = 1.0;
};

using PotentialModel = std::variant<ZeroProfile, GaussianProfile, CutoffPowerProfile>;
using WeightModel = std::variant<ConstantProfile, GaussianProfile, CutoffPowerProfile>;

namespace detail {

inline double profile_value(const ZeroProfile&, double) { return 0.0; }
inline double profile_value(const ConstantProfile& p, double) { return p.value; }
inline double profile_value(const GaussianProfile& p, double r) {
  return p.amplitude * std::exp(-(r * r) / (p.width * p.width));
}
inline double profile_value(const CutoffPowerProfile& p, double r) {
  return p.amplitude * std::pow(std::max(r, p.core_radius), -p.exponent);
}

inline double profile_sup(const ZeroProfile&) { return 0.0; }
inline double profile_sup(const ConstantProfile& p) { return p.value; }
inline double profile_sup(const GaussianProfile& p) { return p.amplitude; }
inline double profile_sup(const CutoffPowerProfile& p) {
  return p.amplitude * std::pow(p.core_radius, -p.exponent);
}

inline void profile_check(const ZeroProfile&, const std::string&) {}
inline void profile_check(const ConstantProfile& p, const std::string& what) {
  if (!(p.value >= 0.0) || !std::isfinite(p.value)) throw std::invalid_argument(what + ": constant must be >= 0");
}
inline void profile_check(const GaussianProfile& p, const std::string& what) {
  if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude))
    throw std::invalid_argument(what + ": amplitude must be >= 0");
  if (!(p.width > 0.0)) throw std::invalid_argument(what + ": width must be > 0");
}
inline void profile_check(const CutoffPowerProfile& p, const std::string& what) {
  if (!(p.amplitude >= 0.0) || !std::isfinite(p.amplitude))
    throw std::invalid_argument(what + ": amplitude must be >= 0");
  if (!(p.exponent > 0.0)) throw std::invalid_argument(what + ": decay exponent must be > 0");
  if (!(p.core_radius > 0.0)) throw std::invalid_argument(what + ": core radius must be > 0");
}

}  // namespace detail

/// Radial profile value at radius r.
template <class Profile>
double evaluate(const Profile& p, double r) {
  return std::visit([r](const auto& alt) { return detail::profile_value(alt, r); }, p);
}

/// Supremum norm of a profile.
template <class Profile>
double sup_norm(const Profile& p) {
  return std::visit([](const auto& alt) { return detail::profile_sup(alt); }, p);
}

template <class Profile>
std::vector<double> sample_profile(const Profile& p, const GridSpec& spec) {
  auto r2 = spec.squared_radii();
  std::vector<double> out(r2.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = evaluate(p, std::sqrt(r2[i]));
  return out;
}

/// Constants of the pointwise lower bound on F and its superquadratic growth.
struct FParameters {
  double kappa = 0.0;
  double R = 1.0;
  double N_thresh = 1.0;
  double delta_F = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
};

struct ProblemModel {
  double s = 1.0;
  int n = 1;
  double ell = 2.0;
  PotentialModel potential = ZeroProfile{};
  WeightModel weight_a = ConstantProfile{1.0};
  WeightModel weight_b = ConstantProfile{0.0};
  std::optional<FParameters> f_params;

  void validate() const {
    if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("model: need 0 < s <= 1");
    if (n != 1 && n != 2) throw std::invalid_argument("model: n must be 1 or 2");
    if (!(ell > 0.0) || !std::isfinite(ell)) throw std::invalid_argument("model: need ell > 0");
    std::visit([](const auto& p) { detail::profile_check(p, "potential"); }, potential);
    std::visit([](const auto& p) { detail::profile_check(p, "weight a"); }, weight_a);
    std::visit([](const auto& p) { detail::profile_check(p, "weight b"); }, weight_b);
    if (f_params) {
      const auto& fp = *f_params;
      if (!(fp.kappa > 0.0 && fp.R > 0.0 && fp.N_thresh > 0.0))
        throw std::invalid_argument("model: kappa, R, N_thresh must be > 0");
      if (!(fp.beta > 0.0 && fp.sigma > 0.0 && fp.delta_F > 0.0))
        throw std::invalid_argument("model: beta, sigma, delta_F must be > 0");
    }
  }

  /// ell == 4s/n up to roundoff.
  bool mass_critical() const { return std::abs(ell - 4.0 * s / n) <= 1e-12 * std::max(1.0, ell); }
};

/// A ProblemModel with V and a sampled on a grid.
class DiscreteModel {
 public:
  DiscreteModel(ProblemModel problem, GridSpec grid)
      : problem_(std::move(problem)),
        grid_(grid),
        potential_((problem_.validate(), sample_profile(problem_.potential, grid))),
        weight_(sample_profile(problem_.weight_a, grid)) {
    if (problem_.n != grid.dimension())
      throw std::invalid_argument("model: dimension n does not match the grid");
  }

  const ProblemModel& problem() const { return problem_; }
  const GridSpec& grid() const { return grid_; }
  std::span<const double> potential() const { return potential_; }
  std::span<const double> weight() const { return weight_; }
  double s() const { return problem_.s; }
  double ell() const { return problem_.ell; }

 private:
  ProblemModel problem_;
  GridSpec grid_;
  std::vector<double> potential_;
  std::vector<double> weight_;
};

inline double mass(const Field& u) {
  double acc = 0.0;
  for (auto z : u.values()) acc += std::norm(z);
  return acc * u.spec().cell_volume();
}

/// sum |xi|^{2s} |uhat|^2 = ||(-Delta)^{s/2} u||^2.
inline double kinetic(const SpectralField& uh, double s) {
  const auto xi2 = uh.spec.squared_frequencies();
  double acc = 0.0;
  for (std::size_t i = 0; i < xi2.size(); ++i) acc += std::pow(xi2[i], s) * std::norm(uh.coeffs[i]);
  return acc;
}

inline double kinetic(const Field& u, double s) { return kinetic(forward_transform(u), s); }

inline Field nonlinear_force(const Field& u, const DiscreteModel& model) {
  if (!(u.spec() == model.grid())) throw std::invalid_argument("nonlinear_force: grid mismatch");
  Field out(u.spec());
  const auto a = model.weight();
  const double ell = model.ell();
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = a[i] * std::pow(std::abs(u[i]), ell) * u[i];
  return out;
}

/// Integral of V |u|^2.
inline double potential_energy_V(const Field& u, const DiscreteModel& model) {
  const auto V = model.potential();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += V[i] * std::norm(u[i]);
  return acc * u.spec().cell_volume();
}

/// Integral of F(x, |u|) = a |u|^{ell+2} / (ell+2).
inline double potential_energy_F(const Field& u, const DiscreteModel& model) {
  const auto a = model.weight();
  const double p = model.ell() + 2.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += a[i] * std::pow(std::abs(u[i]), p);
  return acc * u.spec().cell_volume() / p;
}

struct EnergyParts {
  double kinetic = 0.0;      // ||(-Delta)^{s/2} u||^2
  double potential_V = 0.0;  // int V |u|^2
  double potential_F = 0.0;  // int F(x, |u|)
  double total = 0.0;        // J(u)
};

inline EnergyParts energy(const Field& u, const DiscreteModel& model, const SpectralField& uh) {
  EnergyParts e;
  e.kinetic = kinetic(uh, model.s());
  e.potential_V = potential_energy_V(u, model);
  e.potential_F = potential_energy_F(u, model);
  e.total = 0.5 * e.kinetic - 0.5 * e.potential_V - e.potential_F;
  return e;
}

inline EnergyParts energy(const Field& u, const DiscreteModel& model) {
  return energy(u, model, forward_transform(u));
}

struct ConditionReport {
  double exponent_margin = 0.0;  // n beta / 2 + delta_F - 2s, must be < 0
  bool exponent_ok = false;
  bool lower_bound_ok = false;   // F >= kappa |x|^{-delta_F} |z|^{2+beta} on |x| >= R, |z| <= N_thresh
  bool lower_bound_symbolic = false;
  double lower_bound_min_ratio = 0.0;  // inf of F |x|^{delta_F} |z|^{-(2+beta)}
  bool growth_ok = false;        // F(theta z) >= theta^{2+sigma} F(z), theta > 1
  bool all_ok() const { return exponent_ok && lower_bound_ok && growth_ok; }
};

/// Checks the lower bound and growth conditions on F for the built-in power law.
/// Sampled checks cover |x| in [R, 1.8 L] and |z| in (0, N_thresh].
inline ConditionReport check_structural_conditions(const ProblemModel& model, double half_width) {
  model.validate();
  if (!model.f_params) throw std::invalid_argument("structural conditions: F-parameters missing");
  const auto& fp = *model.f_params;
  ConditionReport rep;
  rep.exponent_margin = model.n * fp.beta / 2.0 + fp.delta_F - 2.0 * model.s;
  rep.exponent_ok = rep.exponent_margin < 0.0;

  const double p = model.ell + 2.0;
  const bool same_power = fp.beta == model.ell;
  if (const auto* cp = std::get_if<CutoffPowerProfile>(&model.weight_a);
      cp && same_power && cp->exponent == fp.delta_F && fp.R >= cp->core_radius) {
    rep.lower_bound_symbolic = true;
    rep.lower_bound_min_ratio = cp->amplitude / p;
  } else {
    const double r_hi = std::max(fp.R, 1.8 * half_width);
    const int nr = 256, nz = 128;
    double best = INFINITY;
    for (int i = 0; i < nr; ++i) {
      double r = fp.R + (r_hi - fp.R) * i / (nr - 1);
      double ar = evaluate(model.weight_a, r) * std::pow(r, fp.delta_F) / p;
      for (int j = 0; j < nz; ++j) {
        // geometric sweep of |z| down to 1e-8 N_thresh
        double z = fp.N_thresh * std::pow(1e-8, double(j) / (nz - 1));
        best = std::min(best, ar * std::pow(z, model.ell - fp.beta));
      }
    }
    rep.lower_bound_min_ratio = best;
  }
  rep.lower_bound_ok = rep.lower_bound_min_ratio >= fp.kappa;
  rep.growth_ok = fp.sigma <= model.ell;
  return rep;
}

/// Grid estimate of the Gagliardo-Nirenberg constant G in
///   int |u|^{ell+2} <= G M(u)^{(ell+2)/2 - theta} K(u)^theta,  theta = n ell / (4s),
/// taken as the largest ratio over a fixed family of radial shapes (plus any extra
/// fields supplied). It is a lower estimate of the sharp constant.
struct GagliardoNirenbergEstimate {
  double constant = 0.0;
  double theta = 0.0;
  std::string best_shape;
};

inline double gagliardo_nirenberg_ratio(const Field& u, double s, double ell) {
  const int n = u.spec().dimension();
  const double theta = n * ell / (4.0 * s);
  double lp = 0.0;
  for (auto z : u.values()) lp += std::pow(std::abs(z), ell + 2.0);
  lp *= u.spec().cell_volume();
  const double M = mass(u), K = kinetic(u, s);
  if (M <= 0.0 || K <= 0.0) return 0.0;
  return lp / (std::pow(M, (ell + 2.0) / 2.0 - theta) * std::pow(K, theta));
}

inline GagliardoNirenbergEstimate estimate_gagliardo_nirenberg(const GridSpec& grid, double s, double ell,
                                                                std::span<const Field> extra = {}) {
  GagliardoNirenbergEstimate est;
  est.theta = grid.dimension() * ell / (4.0 * s);
  const double w = grid.half_width() / 8.0;
  struct Shape {
    const char* name;
    double (*fn)(double);
  };
  const Shape shapes[] = {
      {"gaussian", [](double t) { return std::exp(-t * t); }},
      {"sech", [](double t) { return 1.0 / std::cosh(t); }},
      {"sech2", [](double t) { return 1.0 / (std::cosh(t) * std::cosh(t)); }},
      {"exp", [](double t) { return std::exp(-std::abs(t)); }},
      {"lorentz2", [](double t) { return 1.0 / ((1.0 + t * t) * (1.0 + t * t)); }},
      {"super-gaussian", [](double t) { return std::exp(-t * t * t * t); }},
  };
  for (const auto& sh : shapes) {
    for (double scale : {0.5, 1.0}) {
      auto u = sample(grid, [&](Point x) { return sh.fn(std::hypot(x[0], x[1]) / (scale * w)); });
      double r = gagliardo_nirenberg_ratio(u, s, ell);
      if (r > est.constant) {
        est.constant = r;
        est.best_shape = sh.name;
      }
    }
  }
  for (const auto& u : extra) {
    double r = gagliardo_nirenberg_ratio(u, s, ell);
    if (r > est.constant) {
      est.constant = r;
      est.best_shape = "supplied";
    }
  }
  return est;
}

}  // namespace fracnls
