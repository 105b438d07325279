#include <gtest/gtest.h>

#include <algorithm>

#include "fracnls/config.hpp"

using namespace fracnls;

namespace {

std::vector<std::string> errors_of(std::string_view text, std::optional<Task> t = std::nullopt) {
  try {
    parse_config(text, t);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, std::string_view needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::string lookup(const RunConfig& c, const std::string& key) {
  for (const auto& [k, v] : c.effective)
    if (k == key) return v;
  return "<missing>";
}

}  // namespace

TEST(ParseConfig, MinimalFillsDefaultsAndEchoes) {
  auto c = parse_config("# free evolution\nmodel.weight_a = constant(0)\n", Task::evolve);
  EXPECT_EQ(c.N, 256);
  EXPECT_EQ(c.n, 1);
  EXPECT_DOUBLE_EQ(c.L, 32.0);
  EXPECT_DOUBLE_EQ(c.initial_width(), 4.0);
  EXPECT_EQ(lookup(c, "grid.N"), "256");
  EXPECT_EQ(lookup(c, "model.weight_a"), "constant(0)");
  EXPECT_EQ(lookup(c, "task.width"), "4");
  EXPECT_NE(c.echo().find("task.dt = 0.001\n"), std::string::npos);
}

TEST(ParseConfig, ValuesListsAndProfiles) {
  auto c = parse_config(R"(grid.n = 2
grid.N = 64
grid.L = 20*pi
model.s = 0.75
model.ell = 1
model.potential = gaussian(2, 1.5)
model.weight_a = cutoff_power(1, 0.25, 1)
task.deltas = 0, 1e-3, 1e-2
task.kinds = random, dilation, translation
task.backward = false
task.seed = 42
hyp.q1 = 8
hyp.q2 = inf
hyp.strichartz_q = 3
)");
  EXPECT_NEAR(c.L, 20 * pi, 1e-12);
  EXPECT_EQ(c.deltas, (std::vector<double>{0.0, 1e-3, 1e-2}));
  EXPECT_EQ(c.kinds.size(), 3u);
  EXPECT_FALSE(c.backward);
  EXPECT_EQ(c.seed, 42u);
  ASSERT_TRUE(std::holds_alternative<GaussianProfile>(c.model.potential));
  EXPECT_DOUBLE_EQ(std::get<GaussianProfile>(c.model.potential).width, 1.5);
  EXPECT_EQ(c.hyp.s, Rational(3, 4));
  EXPECT_EQ(c.hyp.q1, Exponent::finite(Rational(8)));
  EXPECT_TRUE(c.hyp.q2.is_infinite());
  EXPECT_EQ(*c.hyp.strichartz_q, Rational(3));
  EXPECT_EQ(c.model.n, 2);
}

TEST(ParseConfig, OddNNamesGridInvariant) {
  auto e = errors_of("grid.N = 255\n");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NE(e[0].find("grid invariant \"N even\""), std::string::npos);
}

TEST(ParseConfig, CollectsAllErrors) {
  auto e = errors_of(R"(grid.N = 255
grid.L = -1
model.s = 1.5
task.dt = fast
bogus.key = 1
grid.n = 1
grid.n = 1
not a pair
)");
  EXPECT_TRUE(any_contains(e, "\"N even\""));
  EXPECT_TRUE(any_contains(e, "\"L > 0\""));
  EXPECT_TRUE(any_contains(e, "\"0 < s <= 1\""));
  EXPECT_TRUE(any_contains(e, "line 4: task.dt: expected a number"));
  EXPECT_TRUE(any_contains(e, "line 5: bogus.key: unknown key"));
  EXPECT_TRUE(any_contains(e, "line 7: grid.n: duplicate key"));
  EXPECT_TRUE(any_contains(e, "line 8: expected 'section.key = value'"));
  EXPECT_GE(e.size(), 7u);
}

TEST(ParseConfig, PreconditionsNamed) {
  EXPECT_TRUE(any_contains(errors_of("task.lambdas = 1, 1.5\n"), "0 < lambda <= 1"));
  EXPECT_TRUE(any_contains(errors_of("task.nus = 0.5, 1\n"), "0 < nu/mu < 1"));
  EXPECT_TRUE(any_contains(errors_of("task.radii = 40\n"), "0 < r <= L"));
  EXPECT_TRUE(any_contains(errors_of("task.deltas = -1\n"), "delta >= 0"));
  EXPECT_TRUE(any_contains(errors_of("task.kinds = wobble\n"), "unknown perturbation kind 'wobble'"));
  EXPECT_TRUE(any_contains(errors_of("model.potential = gaussian(1)\n"), "model.potential"));
  EXPECT_TRUE(any_contains(errors_of("hyp.q1 = 0.5\n"), "hyp"));
  EXPECT_TRUE(any_contains(errors_of("task.dt = 2\ntask.T = 1\n"), "|dt| <= T"));
}

TEST(ParseConfig, MassCriticalGate) {
  const char* crit = "model.s = 0.5\nmodel.ell = 2\ntask.mu = 100\n";
  auto e = errors_of(crit, Task::ground_state);
  ASSERT_EQ(e.size(), 1u);
  EXPECT_NE(e[0].find("smallness condition C ||a||_inf mu^(2s/n) < 1/4"), std::string::npos);
  // the gate applies only where a mass enters
  EXPECT_TRUE(errors_of(crit, Task::check).empty());
  EXPECT_TRUE(errors_of("model.s = 0.5\nmodel.ell = 2\ntask.mu = 0.1\n", Task::ground_state).empty());
}

TEST(ParseConfig, HypothesisDefaultsFromModel) {
  auto c = parse_config("model.s = 0.75\nmodel.ell = 2\nmodel.delta_F = 0.25\nmodel.kappa = 0.25\n");
  EXPECT_EQ(*c.hyp.beta, Rational(2));
  EXPECT_EQ(*c.hyp.sigma, Rational(2));
  EXPECT_EQ(*c.hyp.delta_F, Rational(1, 4));
  EXPECT_TRUE(c.hyp.a_bounded);
  auto d = parse_config("model.s = 0.75\nmodel.ell = 2\n");
  EXPECT_FALSE(d.hyp.beta.has_value());
}

TEST(ParseConfig, Helpers) {
  EXPECT_EQ(cfg::split("gaussian(1, 2), 3", ','), (std::vector<std::string>{"gaussian(1, 2)", "3"}));
  EXPECT_NEAR(*cfg::number("2*pi"), 2 * pi, 1e-15);
  EXPECT_FALSE(cfg::number("pi pi").has_value());
  EXPECT_EQ(parse_task("probe-subadd"), Task::probe_subadd);
  EXPECT_FALSE(parse_task("nope").has_value());
}
