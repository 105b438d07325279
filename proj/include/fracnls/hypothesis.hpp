#pragma once

// Exponent arithmetic for the existence, radial existence, local well-posedness
// and uniqueness statements. Everything is exact: parameters are rationals parsed
// from decimal text, infinite exponents are stored through a zero reciprocal.
//
// Two different quantities are both called delta in the literature: the decay
// power in the lower bound on F (delta_F) and the weight power (n+2s)/q - n/2
// of the weighted Strichartz estimate (delta_q). They never share a name here.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fracnls/model.hpp"

namespace fracnls {

class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1) { assign(num, den); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return double(num_) / double(den_); }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

  /// Accepts "3", "-0.75", "1.5e-2", "3/4".
  static Rational parse(std::string_view text) {
    auto bad = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw bad();
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      Rational a = parse(text.substr(0, slash)), b = parse(text.substr(slash + 1));
      if (b.is_zero()) throw bad();
      return a / b;
    }
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') neg = text[i++] == '-';
    __int128 mant = 0;
    int scale = 0, digits = 0;
    bool dot = false;
    for (; i < text.size(); ++i) {
      char c = text[i];
      if (c == '.' && !dot) {
        dot = true;
      } else if (c >= '0' && c <= '9') {
        mant = mant * 10 + (c - '0');
        if (mant > std::numeric_limits<std::int64_t>::max()) throw std::overflow_error("rational: too many digits");
        if (dot) ++scale;
        ++digits;
      } else {
        break;
      }
    }
    if (digits == 0) throw bad();
    if (i < text.size()) {
      if (text[i] != 'e' && text[i] != 'E') throw bad();
      ++i;
      bool eneg = false;
      if (i < text.size() && (text[i] == '+' || text[i] == '-')) eneg = text[i++] == '-';
      int e = 0, edigits = 0;
      for (; i < text.size() && text[i] >= '0' && text[i] <= '9'; ++i, ++edigits) e = e * 10 + (text[i] - '0');
      if (edigits == 0 || i != text.size() || e > 18) throw bad();
      scale += eneg ? e : -e;
    }
    Rational r(std::int64_t(neg ? -mant : mant));
    for (; scale > 0; --scale) r = r / Rational(10);
    for (; scale < 0; ++scale) r = r * Rational(10);
    return r;
  }

  friend Rational operator+(Rational a, Rational b) { return make(I(a.num_) * b.den_ + I(b.num_) * a.den_, I(a.den_) * b.den_); }
  friend Rational operator-(Rational a, Rational b) { return make(I(a.num_) * b.den_ - I(b.num_) * a.den_, I(a.den_) * b.den_); }
  friend Rational operator*(Rational a, Rational b) { return make(I(a.num_) * b.num_, I(a.den_) * b.den_); }
  friend Rational operator/(Rational a, Rational b) {
    if (b.is_zero()) throw std::domain_error("rational: division by zero");
    return make(I(a.num_) * b.den_, I(a.den_) * b.num_);
  }
  Rational operator-() const { return make(-I(num_), den_); }
  friend bool operator==(Rational a, Rational b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend auto operator<=>(Rational a, Rational b) { return I(a.num_) * b.den_ <=> I(b.num_) * a.den_; }

 private:
  using I = __int128;
  std::int64_t num_ = 0, den_ = 1;

  static I gcd128(I a, I b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      I t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational make(I n, I d) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    if (d < 0) n = -n, d = -d;
    I g = gcd128(n, d);
    if (g > 1) n /= g, d /= g;
    constexpr I lim = std::numeric_limits<std::int64_t>::max();
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational: overflow");
    Rational r;
    r.num_ = std::int64_t(n);
    r.den_ = std::int64_t(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) { *this = make(n, d); }
};

inline Rational rmin(Rational a, Rational b) { return a < b ? a : b; }
inline Rational rmax(Rational a, Rational b) { return a < b ? b : a; }

/// Positive exponent in (0, inf], stored by its reciprocal.
class Exponent {
 public:
  Exponent() = default;
  static Exponent finite(Rational value) {
    if (value.sign() <= 0) throw std::invalid_argument("exponent must be positive");
    return Exponent(Rational(1) / value);
  }
  static Exponent infinity() { return Exponent(Rational(0)); }
  static Exponent from_reciprocal(Rational r) {
    if (r.sign() < 0) throw std::invalid_argument("exponent reciprocal must be >= 0");
    return Exponent(r);
  }
  /// "inf", "infinity" or any rational accepted by Rational::parse.
  static Exponent parse(std::string_view text) {
    std::string t(text);
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
    if (t == "inf" || t == "infinity" || t == "Inf") return infinity();
    return finite(Rational::parse(t));
  }

  bool is_infinite() const { return recip_.is_zero(); }
  Rational reciprocal() const { return recip_; }
  Rational value() const {
    if (is_infinite()) throw std::domain_error("exponent is infinite");
    return Rational(1) / recip_;
  }
  double to_double() const { return is_infinite() ? INFINITY : 1.0 / recip_.to_double(); }
  std::string str() const { return is_infinite() ? "inf" : value().str(); }

  friend bool operator==(const Exponent& a, const Exponent& b) { return a.recip_ == b.recip_; }
  // larger exponent has the smaller reciprocal
  friend auto operator<=>(const Exponent& a, const Exponent& b) { return b.recip_ <=> a.recip_; }

 private:
  explicit Exponent(Rational r) : recip_(r) {}
  Rational recip_{0};
};

/// One inequality or identity with its strictness kept in the name.
struct Clause {
  std::string name;
  bool ok = false;
  std::string detail;  // the evaluated sides
};

struct StatementVerdict {
  bool applies = false;
  std::string branch;
  std::vector<Clause> clauses;

  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& c : clauses)
      if (!c.ok) out.push_back(c.name);
    return out;
  }
  const Clause* find(std::string_view name) const {
    for (const auto& c : clauses)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline void add(StatementVerdict& v, std::string name, bool ok, std::string detail = {}) {
  v.clauses.push_back({std::move(name), ok, std::move(detail)});
}
inline std::string cmp(const Rational& a, const char* op, const Rational& b) { return a.str() + " " + op + " " + b.str(); }
inline std::string cmp(const Exponent& a, const char* op, const Exponent& b) { return a.str() + " " + op + " " + b.str(); }
inline void finish(StatementVerdict& v) {
  v.applies = std::all_of(v.clauses.begin(), v.clauses.end(), [](const Clause& c) { return c.ok; });
}

}  // namespace detail

struct CriticalExponents {
  Exponent s_star;                  // Sobolev exponent, inf when n <= 2s
  Rational mass_critical;           // 4s/n
  std::optional<Rational> ell0;     // uniqueness cap on ell, none (infinite) for n = 1
  std::optional<Exponent> q0;       // integrability threshold for a, b; none when not positive
  std::optional<Exponent> ell_cap;  // s* - 2, the energy-subcritical bound on ell
};

inline CriticalExponents critical_exponents(int n, Rational s, Rational ell) {
  if (n < 1) throw std::invalid_argument("critical_exponents: need n >= 1");
  if (!(s > Rational(0) && s < Rational(1))) throw std::invalid_argument("critical_exponents: need 0 < s < 1");
  const Rational N(n), two(2), one(1);
  if (N == two * s) throw std::invalid_argument("critical_exponents: n = 2s is excluded");
  CriticalExponents c;
  const bool above = N > two * s;
  c.s_star = above ? Exponent::finite(two * N / (N - two * s)) : Exponent::infinity();
  c.mass_critical = Rational(4) * s / N;
  if (n == 2)
    c.ell0 = (two * s - one) / (two * s * (one - s));
  else if (n >= 3)
    c.ell0 = N * (two * s - one) / ((N - two * s) * (N - one));
  if (above) {
    const Rational den = two * N - (ell + two) * (N - two * s);
    if (den.sign() > 0) c.q0 = Exponent::finite(two * N / den);
    c.ell_cap = Exponent::finite(two * N / (N - two * s) - two);
  } else {
    c.q0 = Exponent::finite(one);
    c.ell_cap = Exponent::infinity();
  }
  return c;
}

/// Declared hypotheses on (V, a, b, F). Exponents live in (1, inf].
struct ParameterSet {
  int n = 1;
  Rational s{1, 2};
  Rational ell{1};
  Exponent p1 = Exponent::infinity(), p2 = Exponent::infinity();
  Exponent q1 = Exponent::infinity(), q2 = Exponent::infinity();
  std::optional<Exponent> q_critical;  // integrability of a on |x| >= 1 in the mass-critical case
  std::optional<Rational> strichartz_q;
  bool radial = false;
  bool a_bounded = false;
  bool b_bounded = false;
  bool V_bounded = false;
  bool V_nonnegative = true;
  bool cond_V = false;  // tail integral of V |x|^{-(n-2s)} declared finite
  std::optional<Rational> beta;
  std::optional<Rational> delta_F;
  std::optional<Rational> sigma;

  void validate() const {
    if (n < 1) throw std::invalid_argument("hypothesis: need n >= 1");
    if (!(s > Rational(0) && s <= Rational(1))) throw std::invalid_argument("hypothesis: need 0 < s <= 1");
    if (!(ell > Rational(0))) throw std::invalid_argument("hypothesis: need ell > 0");
    for (const Exponent* e : {&p1, &p2, &q1, &q2})
      if (!(e->is_infinite() || e->value() > Rational(1))) throw std::invalid_argument("hypothesis: exponents must lie in (1, inf]");
    if (q_critical && !(q_critical->is_infinite() || q_critical->value() > Rational(1)))
      throw std::invalid_argument("hypothesis: exponents must lie in (1, inf]");
  }
};

/// Existence of ground states for all masses (ell < 4s/n) or for small masses (ell = 4s/n).
inline StatementVerdict check_prop_existence(const ParameterSet& p) {
  p.validate();
  using detail::add;
  using detail::cmp;
  StatementVerdict v;
  const Rational N(p.n), two(2), zero(0), one(1);
  const Rational crit = Rational(4) * p.s / N;
  add(v, "0 < s", p.s > zero, p.s.str());
  add(v, "s < 1", p.s < one, cmp(p.s, "<", one));
  add(v, "0 < ell", p.ell > zero, p.ell.str());
  add(v, "0 <= V", p.V_nonnegative);

  // V in L^{p1}_loc + L^{p2}(|x| > 1) with n/(2s) < p1, p2 < inf; a bounded V is accepted for p = inf.
  const Exponent pmin = Exponent::finite(N / (two * p.s));
  for (auto [name, e] : {std::pair{"p1", p.p1}, std::pair{"p2", p.p2}}) {
    add(v, std::string("n/(2s) < ") + name, pmin < e, cmp(pmin, "<", e));
    add(v, std::string(name) + " < inf or V bounded", !e.is_infinite() || p.V_bounded, e.str());
  }

  if (p.ell < crit) {
    v.branch = "subcritical";
    add(v, "ell < 4s/n", true, cmp(p.ell, "<", crit));
    const Exponent qmin = Exponent::finite(two * N / (Rational(4) * p.s - N * p.ell));
    for (auto [name, e] : {std::pair{"q1", p.q1}, std::pair{"q2", p.q2}}) {
      add(v, std::string("2n/(4s-n ell) < ") + name, qmin < e, cmp(qmin, "<", e));
      add(v, std::string(name) + " < inf or a bounded", !e.is_infinite() || p.a_bounded, e.str());
    }
  } else if (p.ell == crit) {
    v.branch = "critical (small mass)";
    add(v, "ell = 4s/n", true, cmp(p.ell, "=", crit));
    add(v, "a bounded", p.a_bounded);
    if (!p.q_critical) {
      add(v, "q declared for a on |x| >= 1", false, "missing");
    } else {
      const Exponent q = *p.q_critical;
      if (p.n >= 2) {
        const Exponent qmin = Exponent::finite(N * N / (Rational(4) * p.s * p.s));
        add(v, "n^2/(4s^2) < q", qmin < q, cmp(qmin, "<", q));
      } else {
        add(v, "1 < q", Exponent::finite(one) < q, cmp(Exponent::finite(one), "<", q));
      }
      add(v, "q < inf", !q.is_infinite(), q.str());
    }
  } else {
    v.branch = "supercritical";
    add(v, "ell < 4s/n", false, cmp(p.ell, "<", crit));
  }

  if (p.beta && p.delta_F) {
    const Rational lhs = N * *p.beta / two + *p.delta_F - two * p.s;
    add(v, "0 < beta", *p.beta > zero, p.beta->str());
    add(v, "0 < delta_F", *p.delta_F > zero, p.delta_F->str());
    add(v, "n beta/2 + delta_F - 2s < 0", lhs < zero, cmp(lhs, "<", zero));
  } else {
    add(v, "n beta/2 + delta_F - 2s < 0", false, "beta or delta_F not declared");
  }
  if (p.sigma) add(v, "0 < sigma", *p.sigma > zero, p.sigma->str());
  detail::finish(v);
  return v;
}

/// int_{|x|>1} V(x) |x|^{-(n-2s)} dx for a radial profile; nullopt when it diverges.
inline std::optional<double> potential_tail_integral(const PotentialModel& V, int n, double s) {
  if (n < 1 || n > 3) throw std::invalid_argument("potential_tail_integral: need 1 <= n <= 3");
  const double sphere = n == 1 ? 2.0 : n == 2 ? 2.0 * pi : 4.0 * pi;
  // radial integrand V(r) r^{2s-1}
  if (std::holds_alternative<ZeroProfile>(V)) return 0.0;
  double rmax = 1.0;
  if (auto g = std::get_if<GaussianProfile>(&V)) {
    rmax = 1.0 + 12.0 * g->width;
  } else if (auto c = std::get_if<CutoffPowerProfile>(&V)) {
    if (!(c->exponent > 2.0 * s)) return std::nullopt;
    // closed form above the core radius, quadrature below
    const double lo = std::max(1.0, c->core_radius);
    double total = c->amplitude * std::pow(lo, 2.0 * s - c->exponent) / (c->exponent - 2.0 * s);
    if (c->core_radius > 1.0) total += c->amplitude * std::pow(c->core_radius, -c->exponent) *
                                       (std::pow(c->core_radius, 2.0 * s) - 1.0) / (2.0 * s);
    return sphere * total;
  }
  // composite Simpson on [1, rmax]
  const int m = 4096;
  const double h = (rmax - 1.0) / m;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) {
    const double r = 1.0 + i * h;
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * evaluate(V, r) * std::pow(r, 2.0 * s - 1.0);
  }
  return sphere * acc * h / 3.0;
}

/// Existence of radial ground states. The tail condition on V is a declaration;
/// when a sampled profile is supplied its tail integral is evaluated as well.
inline StatementVerdict check_prop_radial(const ParameterSet& p, const PotentialModel* V = nullptr) {
  p.validate();
  using detail::add;
  using detail::cmp;
  StatementVerdict v;
  const Rational N(p.n), half(1, 2), one(1), zero(0);
  const Rational crit = Rational(4) * p.s / N;
  add(v, "n >= 2", p.n >= 2, std::to_string(p.n));
  add(v, "1/2 < s", half < p.s, cmp(half, "<", p.s));
  add(v, "s < 1", p.s < one, cmp(p.s, "<", one));
  add(v, "0 < ell", p.ell > zero, p.ell.str());
  if (p.ell < crit) {
    v.branch = "subcritical";
    add(v, "ell < 4s/n", true, cmp(p.ell, "<", crit));
  } else if (p.ell == crit) {
    v.branch = "critical (small mass)";
    add(v, "ell = 4s/n", true, cmp(p.ell, "=", crit));
  } else {
    v.branch = "supercritical";
    add(v, "ell <= 4s/n", false, cmp(p.ell, "<=", crit));
  }
  add(v, "radial symmetry declared", p.radial);
  add(v, "0 <= V", p.V_nonnegative);
  add(v, "V locally bounded", p.V_bounded);
  add(v, "a bounded", p.a_bounded);
  add(v, "tail integral of V |x|^{-(n-2s)} finite (declared)", p.cond_V);
  if (V) {
    const auto tail = potential_tail_integral(*V, std::min(p.n, 3), p.s.to_double());
    char buf[64];
    if (tail) std::snprintf(buf, sizeof buf, "%.12g", *tail);
    add(v, "tail integral of V |x|^{-(n-2s)} finite (sampled)", tail.has_value(), tail ? buf : "diverges");
  }
  detail::finish(v);
  return v;
}

/// Exponents of the weighted Strichartz uniqueness argument (n >= 2).
struct StrichartzExponents {
  Rational delta_q;        // (n+2s)/q - n/2
  Rational inv_q_tilde;    // 1/2 - (2s/q - 1/2)/(n-1)
  Rational inv_m1, inv_m1_tilde, inv_m2, inv_m2_tilde;
  Rational window_lower;   // 1/2 + (n-1) ell (n-2s)/(2n) <= 2s/q
  Rational window_upper;   // 2s/q <= s
  bool window_nonempty = false;
  bool q_in_window = false;
  bool m2_nonnegative = false;
  bool m2_tilde_nonnegative = false;
  Rational ell_cap_le;     // ell <= n(2s-1)/((n-1)(n-2s))
  Rational ell_cap_lt;     // ell <  n(2s-1)/(2s(n-2s))
  bool ell_le_cap = false;
  bool ell_lt_cap = false;
};

inline StrichartzExponents strichartz_exponents(int n, Rational s, Rational q, Rational ell) {
  if (n < 2) throw std::invalid_argument("strichartz_exponents: need n >= 2");
  if (!(s > Rational(0) && s < Rational(1))) throw std::invalid_argument("strichartz_exponents: need 0 < s < 1");
  if (!(q > Rational(0))) throw std::invalid_argument("strichartz_exponents: need q > 0");
  const Rational N(n), half(1, 2), two(2), one(1), zero(0);
  StrichartzExponents e;
  const Rational tsq = two * s / q;
  const Rational loss = ell * (N - two * s) / (two * N);
  e.delta_q = (N + two * s) / q - N / two;
  e.inv_q_tilde = half - (tsq - half) / (N - one);
  e.inv_m1 = half - one / q;
  e.inv_m1_tilde = (tsq - half) / (N - one);
  e.inv_m2 = e.inv_m1 - loss;
  e.inv_m2_tilde = e.inv_m1_tilde - loss;
  e.window_lower = half + (N - one) * loss;
  e.window_upper = s;
  e.window_nonempty = e.window_lower <= e.window_upper;
  e.q_in_window = e.window_lower <= tsq && tsq <= e.window_upper;
  e.m2_nonnegative = e.inv_m2 >= zero;
  e.m2_tilde_nonnegative = e.inv_m2_tilde >= zero;
  e.ell_cap_le = N * (two * s - one) / ((N - one) * (N - two * s));
  e.ell_cap_lt = N * (two * s - one) / (two * s * (N - two * s));
  e.ell_le_cap = ell <= e.ell_cap_le;
  e.ell_lt_cap = ell < e.ell_cap_lt;
  return e;
}

/// Pairs (q, r) with 2s/q + n/r = n/2 for radial data.
inline StatementVerdict admissible_pair_check(int n, Rational s, Exponent q, Exponent r) {
  using detail::add;
  using detail::cmp;
  if (n < 1) throw std::invalid_argument("admissible_pair_check: need n >= 1");
  StatementVerdict v;
  v.branch = "radial Strichartz";
  const Rational N(n), two(2), one(1);
  const Rational smin = N / (two * N - one);
  add(v, "n/(2n-1) <= s", smin <= s, cmp(smin, "<=", s));
  add(v, "s < 1", s < one, cmp(s, "<", one));
  add(v, "2 <= q", Exponent::finite(two) <= q, cmp(Exponent::finite(two), "<=", q));
  add(v, "2 <= r", Exponent::finite(two) <= r, cmp(Exponent::finite(two), "<=", r));
  add(v, "r < inf", !r.is_infinite(), r.str());
  const Rational lhs = two * s * q.reciprocal() + N * r.reciprocal();
  add(v, "2s/q + n/r = n/2", lhs == N / two, cmp(lhs, "=", N / two));
  bool endpoint = false;
  if (2 * n - 3 != 0) {
    const Rational rend = Rational(4 * n - 2, 2 * n - 3);
    endpoint = !q.is_infinite() && q.value() == two && rend > Rational(0) && !r.is_infinite() && r.value() == rend;
  }
  add(v, "(q, r) != (2, (4n-2)/(2n-3))", !endpoint, "(" + q.str() + ", " + r.str() + ")");
  detail::finish(v);
  return v;
}

/// r from 2s/q + n/r = n/2; nullopt when the identity leaves no finite r >= 2.
inline std::optional<Exponent> admissible_r(int n, Rational s, Exponent q) {
  if (n < 1) throw std::invalid_argument("admissible_r: need n >= 1");
  const Rational N(n), two(2);
  const Rational inv_r = (N / two - two * s * q.reciprocal()) / N;
  if (inv_r.sign() <= 0 || inv_r > Rational(1, 2)) return std::nullopt;
  return Exponent::from_reciprocal(inv_r);
}

struct RadialPair {
  bool in_scope = false;
  std::string branch;  // "subcritical", "critical", or why it is out of scope
  Exponent q0, r0;
  Rational inv_q1;     // 1 - (ell+2)/q0, from 1/q0' = (ell+1)/q0 + 1/q1
  bool critical = false;
  bool identity_holds = false;
  bool s_in_range = false;  // n/(2n-1) <= s < 1
};

inline RadialPair radial_wellposed_pair(int n, Rational s, Rational ell) {
  if (n < 1) throw std::invalid_argument("radial_wellposed_pair: need n >= 1");
  const Rational N(n), two(2), one(1);
  RadialPair rp;
  if (N <= two * s) {
    rp.branch = "n <= 2s: outside the range of the radial local theory";
    return rp;
  }
  const Rational cap = Rational(4) * s / (N - two * s);
  if (!(ell > Rational(0) && ell <= cap))
    throw std::domain_error("radial_wellposed_pair: need 0 < ell <= 4s/(n-2s), got ell = " + ell.str());
  rp.in_scope = true;
  rp.r0 = Exponent::finite(N * (ell + two) / (N + s * ell));
  rp.q0 = Exponent::finite(Rational(4) * s * (ell + two) / (ell * (N - two * s)));
  rp.inv_q1 = one - (ell + two) * rp.q0.reciprocal();
  rp.critical = ell == cap;
  rp.branch = rp.critical ? "critical" : "subcritical";
  rp.identity_holds = two * s * rp.q0.reciprocal() + N * rp.r0.reciprocal() == N / two;
  rp.s_in_range = N / (two * N - one) <= s && s < one;
  return rp;
}

/// Unconditional uniqueness windows, on 1/q for n = 2 and on 2s/q for n >= 3.
struct UniquenessWindow {
  StatementVerdict verdict;
  Rational lower, upper;  // lower < x <= upper
  bool nonempty = false;
  bool q_inside = false;
};

inline UniquenessWindow check_uniqueness_corollaries(int n, Rational s, Rational ell, Rational q) {
  using detail::add;
  using detail::cmp;
  if (n < 2) throw std::invalid_argument("uniqueness windows: need n >= 2");
  if (!(q > Rational(0))) throw std::invalid_argument("uniqueness windows: need q > 0");
  const Rational N(n), half(1, 2), two(2), one(1), zero(0);
  UniquenessWindow w;
  StatementVerdict& v = w.verdict;
  add(v, "1/2 < s", half < s, cmp(half, "<", s));
  add(v, "s < 1", s < one, cmp(s, "<", one));
  add(v, "0 < ell", ell > zero, ell.str());
  if (n == 2) {
    v.branch = "n = 2, window on 1/q";
    w.lower = one / (Rational(4) * s);
    w.upper = rmin(half - ell * (one - s) / s, one / (one + two * s));
    const Rational x = one / q;
    w.nonempty = w.lower < w.upper;
    add(v, "window 1/(4s) < min(1/2 - ell(1-s)/s, 1/(1+2s)) nonempty", w.nonempty, cmp(w.lower, "<", w.upper));
    add(v, "1/(4s) < 1/q", w.lower < x, cmp(w.lower, "<", x));
    add(v, "1/q <= min(1/2 - ell(1-s)/s, 1/(1+2s))", x <= w.upper, cmp(x, "<=", w.upper));
  } else {
    v.branch = "n >= 3, window on 2s/q";
    w.lower = rmax(rmax(half, N * s / (N + two * s)), half + (N - one) * ell * (N - two * s) / (two * N));
    w.upper = N * s / (N + two * s - one);
    const Rational x = two * s / q;
    const Rational cap = N * (two * s - one) / ((N - two * s) * (N + two * s - one));
    w.nonempty = w.lower < w.upper;
    add(v, "ell <= n(2s-1)/((n-2s)(n+2s-1))", ell <= cap, cmp(ell, "<=", cap));
    add(v, "window max(1/2, ns/(n+2s), 1/2 + (n-1)ell(n-2s)/(2n)) < ns/(n+2s-1) nonempty", w.nonempty,
        cmp(w.lower, "<", w.upper));
    add(v, "max(1/2, ns/(n+2s), 1/2 + (n-1)ell(n-2s)/(2n)) < 2s/q", w.lower < x, cmp(w.lower, "<", x));
    add(v, "2s/q <= ns/(n+2s-1)", x <= w.upper, cmp(x, "<=", w.upper));
  }
  w.q_inside = w.nonempty && w.lower < (n == 2 ? one / q : two * s / q) &&
               (n == 2 ? one / q : two * s / q) <= w.upper;
  detail::finish(v);
  return w;
}

/// Everything the calculator derives from one ParameterSet.
struct HypothesisReport {
  ParameterSet params;
  std::optional<CriticalExponents> exponents;
  std::string exponents_note;
  StatementVerdict existence;
  std::optional<StatementVerdict> radial_existence;
  std::optional<StrichartzExponents> strichartz;
  std::optional<RadialPair> radial_pair;
  std::string radial_pair_note;
  std::optional<UniquenessWindow> uniqueness;

  std::string key_values() const;
  std::string human() const;
};

inline HypothesisReport build_hypothesis_report(const ParameterSet& p, const PotentialModel* V = nullptr) {
  p.validate();
  HypothesisReport r;
  r.params = p;
  try {
    r.exponents = critical_exponents(p.n, p.s, p.ell);
  } catch (const std::invalid_argument& e) {
    r.exponents_note = e.what();
  }
  r.existence = check_prop_existence(p);
  if (p.radial) r.radial_existence = check_prop_radial(p, V);
  const bool frac = p.s < Rational(1);
  if (p.n >= 2 && frac && p.strichartz_q) {
    r.strichartz = strichartz_exponents(p.n, p.s, *p.strichartz_q, p.ell);
    r.uniqueness = check_uniqueness_corollaries(p.n, p.s, p.ell, *p.strichartz_q);
  }
  try {
    r.radial_pair = radial_wellposed_pair(p.n, p.s, p.ell);
  } catch (const std::domain_error& e) {
    r.radial_pair_note = e.what();
  }
  return r;
}

namespace detail {

inline std::string fmt_rational(const Rational& x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x.to_double());
  return x.str() + " (" + buf + ")";
}
inline std::string fmt_exponent(const Exponent& x) { return x.is_infinite() ? "inf" : fmt_rational(x.value()); }

inline void verdict_lines(std::ostringstream& os, const std::string& key, const StatementVerdict& v) {
  os << key << ".applies=" << (v.applies ? "true" : "false") << "\n";
  os << key << ".branch=" << v.branch << "\n";
  for (const auto& c : v.clauses) os << key << ".clause[" << c.name << "]=" << (c.ok ? "pass" : "fail") << "\n";
}

}  // namespace detail

inline std::string HypothesisReport::key_values() const {
  std::ostringstream os;
  const auto& p = params;
  os << "n=" << p.n << "\ns=" << p.s.str() << "\nell=" << p.ell.str() << "\n";
  os << "p1=" << p.p1.str() << "\np2=" << p.p2.str() << "\nq1=" << p.q1.str() << "\nq2=" << p.q2.str() << "\n";
  if (exponents) {
    os << "s_star=" << exponents->s_star.str() << "\n";
    os << "mass_critical=" << exponents->mass_critical.str() << "\n";
    os << "ell0=" << (exponents->ell0 ? exponents->ell0->str() : "inf") << "\n";
    os << "q0=" << (exponents->q0 ? exponents->q0->str() : "none") << "\n";
  } else {
    os << "exponents=unavailable\n";
  }
  detail::verdict_lines(os, "existence", existence);
  if (radial_existence) detail::verdict_lines(os, "radial_existence", *radial_existence);
  if (strichartz) {
    const auto& e = *strichartz;
    os << "delta_q=" << e.delta_q.str() << "\ninv_q_tilde=" << e.inv_q_tilde.str() << "\n";
    os << "inv_m1=" << e.inv_m1.str() << "\ninv_m1_tilde=" << e.inv_m1_tilde.str() << "\n";
    os << "inv_m2=" << e.inv_m2.str() << "\ninv_m2_tilde=" << e.inv_m2_tilde.str() << "\n";
    os << "strichartz_window=[" << e.window_lower.str() << "," << e.window_upper.str() << "]\n";
    os << "strichartz_q_in_window=" << (e.q_in_window ? "true" : "false") << "\n";
  }
  if (radial_pair) {
    os << "radial_pair.in_scope=" << (radial_pair->in_scope ? "true" : "false") << "\n";
    os << "radial_pair.branch=" << radial_pair->branch << "\n";
    if (radial_pair->in_scope) {
      os << "radial_pair.q0=" << radial_pair->q0.str() << "\nradial_pair.r0=" << radial_pair->r0.str() << "\n";
      os << "radial_pair.inv_q1=" << radial_pair->inv_q1.str() << "\n";
      os << "radial_pair.identity=" << (radial_pair->identity_holds ? "true" : "false") << "\n";
    }
  } else {
    os << "radial_pair.in_scope=false\n";
  }
  if (uniqueness) {
    os << "uniqueness.window=(" << uniqueness->lower.str() << "," << uniqueness->upper.str() << "]\n";
    os << "uniqueness.nonempty=" << (uniqueness->nonempty ? "true" : "false") << "\n";
    os << "uniqueness.q_inside=" << (uniqueness->q_inside ? "true" : "false") << "\n";
  }
  return os.str();
}

inline std::string HypothesisReport::human() const {
  std::ostringstream os;
  const auto& p = params;
  os << "Parameters: n = " << p.n << ", s = " << detail::fmt_rational(p.s) << ", ell = " << detail::fmt_rational(p.ell)
     << "\n";
  if (exponents) {
    os << "  Sobolev exponent s*      " << detail::fmt_exponent(exponents->s_star) << "\n";
    os << "  mass-critical 4s/n       " << detail::fmt_rational(exponents->mass_critical) << "\n";
    os << "  uniqueness cap ell0      " << (exponents->ell0 ? detail::fmt_rational(*exponents->ell0) : "inf") << "\n";
    os << "  threshold q0             " << (exponents->q0 ? detail::fmt_exponent(*exponents->q0) : "none") << "\n";
  } else {
    os << "  critical exponents unavailable: " << exponents_note << "\n";
  }
  auto section = [&](const char* title, const StatementVerdict& v) {
    os << title << ": " << (v.applies ? "applies" : "does not apply") << " [" << v.branch << "]\n";
    for (const auto& c : v.clauses)
      os << "  " << (c.ok ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "   (" + c.detail + ")") << "\n";
  };
  section("Existence of ground states", existence);
  if (radial_existence) section("Existence of radial ground states", *radial_existence);
  if (strichartz) {
    const auto& e = *strichartz;
    os << "Weighted Strichartz exponents at q = " << p.strichartz_q->str() << "\n";
    os << "  delta_q " << detail::fmt_rational(e.delta_q) << "\n";
    os << "  1/m1 " << e.inv_m1.str() << ", 1/m1~ " << e.inv_m1_tilde.str() << ", 1/m2 " << e.inv_m2.str() << ", 1/m2~ "
       << e.inv_m2_tilde.str() << "\n";
    os << "  window " << e.window_lower.str() << " <= 2s/q <= " << e.window_upper.str()
       << (e.window_nonempty ? "" : " (empty)") << (e.q_in_window ? ", q inside" : ", q outside") << "\n";
  }
  if (uniqueness) section("Unconditional uniqueness", uniqueness->verdict);
  if (radial_pair && radial_pair->in_scope) {
    os << "Radial well-posedness pair: q0 = " << detail::fmt_exponent(radial_pair->q0)
       << ", r0 = " << detail::fmt_exponent(radial_pair->r0) << ", 1/q1 = " << radial_pair->inv_q1.str() << " ["
       << radial_pair->branch << "]\n";
  } else if (radial_pair) {
    os << "Radial well-posedness pair: " << radial_pair->branch << "\n";
  } else {
    os << "Radial well-posedness pair: " << radial_pair_note << "\n";
  }
  return os.str();
}

}  // namespace fracnls
