#include "doctest.h"

#include "moepgg/analysis.hpp"

#include <cmath>
#include <random>

using namespace moepgg;

namespace {

PreferencePair sym(double beta) { return {RiskPreference(beta), RiskPreference(beta)}; }

// Closed-form expectation: linear in the cooperation probabilities.
VectorReturn closed_form_return(const std::vector<double>& coins, double f, const std::vector<double>& p,
                                std::size_t i) {
  double pool = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) pool += coins[j] * p[j];
  return VectorReturn(pool * f / static_cast<double>(p.size()), coins[i] * (1.0 - p[i]));
}

bool has(const std::vector<NashResult>& eq, double p0, double p1) {
  for (const auto& e : eq)
    if (std::abs(e.strategy[0] - p0) < 1e-12 && std::abs(e.strategy[1] - p1) < 1e-12) return true;
  return false;
}

// Exhaustive lattice NE: no unilateral lattice deviation gains more than tol.
std::vector<std::pair<std::size_t, std::size_t>> brute_force_nash(const GameSpec& spec, const PreferencePair& prefs,
                                                                  const SweepGrid& grid, double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const JointStrategy s{grid[i], grid[j]};
      const double u0 = ser_value(spec, s, 0, prefs[0]);
      const double u1 = ser_value(spec, s, 1, prefs[1]);
      bool stable = true;
      for (std::size_t k = 0; k < grid.size() && stable; ++k) {
        if (ser_value(spec, JointStrategy{grid[k], grid[j]}, 0, prefs[0]) > u0 + tol) stable = false;
        if (ser_value(spec, JointStrategy{grid[i], grid[k]}, 1, prefs[1]) > u1 + tol) stable = false;
      }
      if (stable) out.emplace_back(i, j);
    }
  return out;
}

}  // namespace

TEST_CASE("joint strategy and grid") {
  CHECK_THROWS_AS(JointStrategy({0.5, 1.2}), std::invalid_argument);
  CHECK_THROWS_AS(JointStrategy({-0.1, 0.0}), std::invalid_argument);
  const SweepGrid g(0.01);
  CHECK(g.size() == 101);
  CHECK(g[0] == 0.0);
  CHECK(g[100] == 1.0);
  CHECK(g[37] == 0.37);
  CHECK(g.nearest(0.374) == 37);
  CHECK(SweepGrid(0.5).size() == 3);
  CHECK(SweepGrid(0.3).values().back() == 1.0);
  CHECK_THROWS_AS(SweepGrid(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SweepGrid(0.7), std::invalid_argument);
}

TEST_CASE("expected vector return examples") {
  CHECK(expected_vector_return(GameSpec::uniform(2, 4, 0.5), {1, 1}, 0) == VectorReturn(2, 0));
  CHECK(expected_vector_return(GameSpec::uniform(2, 4, 1.5), {0.5, 0.5}, 0).isApprox(VectorReturn(3, 2)));
  CHECK(expected_vector_return(GameSpec::uniform(2, 4, 2.5), {0, 1}, 0) == VectorReturn(5, 4));
  CHECK_THROWS_AS(expected_vector_return(GameSpec::uniform(2, 4, 2.5), {0, 1, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(expected_vector_return(GameSpec::uniform(2, 4, 2.5), {0, 1}, 2), std::out_of_range);
}

TEST_CASE("expected return matches closed form on random samples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(k % 3);
    std::vector<double> coins(n), p(n);
    for (auto& c : coins) c = 10.0 * u(rng);
    for (auto& q : p) q = u(rng);
    const double f = 6.0 * u(rng);
    const GameSpec spec(coins, f);
    Eigen::VectorXd pv = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const VectorReturn got = expected_vector_return(spec, JointStrategy(pv), i);
      CHECK((got - closed_form_return(coins, f, p, i)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("profile probabilities sum to one") {
  const JointStrategy s{0.3, 0.8, 0.1};
  double total = 0.0;
  for (const auto& a : enumerate_profiles(3)) total += profile_probability(s, a);
  CHECK(total == doctest::Approx(1.0));
  CHECK(profile_probability(JointStrategy{0.3, 0.8}, {Action::Cooperate, Action::Defect}) ==
        doctest::Approx(0.3 * 0.2));
}

TEST_CASE("ser and esr examples") {
  const auto g05 = GameSpec::uniform(2, 4, 0.5);
  CHECK(ser_value(g05, {1, 1}, 0, RiskPreference(3)) == doctest::Approx(8.0));
  for (double f : {0.5, 1.5, 6.0})
    for (double b : {0.3, 1.0, 4.0}) CHECK(ser_value(GameSpec::uniform(2, 4, f), {0, 0}, 0, RiskPreference(b)) == 4.0);
  CHECK(ser_value(GameSpec::uniform(2, 4, 1.0), {1, 0}, 1, RiskPreference(2)) == doctest::Approx(8.0));
  CHECK(esr_value(g05, {0.5, 0.5}, 0, RiskPreference(2)) == doctest::Approx(3.5));
  CHECK(esr_value(g05, {0, 0}, 0, RiskPreference(0.7)) == 4.0);
}

TEST_CASE("ser and esr coincide on pure strategies only") {
  for (double f : {0.5, 1.5, 2.5})
    for (double b : {0.5, 1.0, 2.0, 3.0})
      for (double p0 : {0.0, 1.0})
        for (double p1 : {0.0, 1.0}) {
          const auto spec = GameSpec::uniform(2, 4, f);
          for (std::size_t i = 0; i < 2; ++i)
            CHECK(ser_value(spec, {p0, p1}, i, RiskPreference(b)) ==
                  doctest::Approx(esr_value(spec, {p0, p1}, i, RiskPreference(b))));
        }
  const auto spec = GameSpec::uniform(2, 4, 1.5);
  CHECK(std::abs(ser_value(spec, {0.4, 0.7}, 0, RiskPreference(2)) - esr_value(spec, {0.4, 0.7}, 0, RiskPreference(2))) >
        0.1);
}

TEST_CASE("esr cooperation preference") {
  CHECK(esr_cooperation_preferred(4, 0.5, 3));
  CHECK_FALSE(esr_cooperation_preferred(4, 0.5, 1));
  CHECK(esr_cooperation_preferred(4, 2.5, 1));
  CHECK_FALSE(esr_cooperation_preferred(4, 0.0, 0.0));  // 0^0 = 1 < 4
  CHECK_FALSE(esr_cooperation_preferred(4, 0.25, 2.0));  // cf = 1
  CHECK(esr_beta_threshold(4, 0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(esr_cooperation_preferred(0, 1, 1), std::invalid_argument);
}

TEST_CASE("threshold examples") {
  const auto t3 = best_response_coop_threshold(4, 0.5, 3);
  REQUIRE(t3);
  CHECK(std::abs(*t3 - 0.6) <= 0.05);
  CHECK_FALSE(best_response_coop_threshold(4, 0.5, 2));
  REQUIRE(best_response_coop_threshold(4, 1.5, 2));
  CHECK(*best_response_coop_threshold(4, 1.5, 2) == 0.0);
  const auto t4 = best_response_coop_threshold(4, 0.5, 4);
  REQUIRE(t4);
  CHECK(std::abs(*t4 - 0.4) <= 0.05);
  // Closed form at beta = 3: cooperation advantage vanishes at p = (sqrt(5) - 1) / 2.
  CHECK(*t3 == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-5));
}

TEST_CASE("thresholds fed back into best responses") {
  for (double f : {0.5, 1.0, 1.5, 2.5})
    for (double b : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
      const auto t = best_response_coop_threshold(4, f, b);
      if (!t) continue;
      const auto spec = GameSpec::uniform(2, 4, f);
      CAPTURE(f);
      CAPTURE(b);
      if (*t + 0.01 <= 1.0) CHECK(best_response(spec, RiskPreference(b), *t + 0.01) == 1.0);
      if (*t - 0.01 >= 0.0) CHECK(best_response(spec, RiskPreference(b), *t - 0.01) == 0.0);
    }
}

TEST_CASE("best response examples") {
  CHECK(best_response(GameSpec::uniform(2, 4, 2.5), RiskPreference(1.5), 1.0) == 1.0);
  for (double opp : {0.0, 0.3, 0.7, 1.0})
    CHECK(best_response(GameSpec::uniform(2, 4, 0.5), RiskPreference(1), opp) == 0.0);
  CHECK(best_response(GameSpec::uniform(2, 4, 0.5), RiskPreference(0.5), 0.0) == doctest::Approx(0.015625));
  CHECK(*stationarity_sum(4, 0.5, 0.5) == doctest::Approx(0.015625));
  CHECK_FALSE(stationarity_sum(4, 0.5, 1.5));
  // f = n with beta = 1 is an exact tie; it goes to defection.
  CHECK(best_response(GameSpec::uniform(2, 4, 2.0), RiskPreference(1), 0.5) == 0.0);
  CHECK_THROWS_AS(best_response(GameSpec::uniform(2, 4, 2.0), RiskPreference(1), 1.5), std::invalid_argument);
}

TEST_CASE("best response beats every lattice alternative") {
  const SweepGrid grid(0.01);
  for (double f : {0.5, 1.5, 3.0})
    for (double b : {0.3, 0.5, 0.9, 1.0, 1.7, 3.0})
      for (double opp : {0.0, 0.25, 0.6, 1.0}) {
        const auto spec = GameSpec::uniform(2, 4, f);
        const RiskPreference pref(b);
        const double br = best_response(spec, pref, opp);
        const double u_br = ser_value(spec, {br, opp}, 0, pref);
        for (double p : grid.values()) CHECK(ser_value(spec, {p, opp}, 0, pref) <= u_br + 1e-12);
        // Player 1 mirror.
        CHECK(best_response(spec, pref, opp, 1) == doctest::Approx(br));
      }
}

TEST_CASE("nash examples") {
  const SweepGrid grid(0.01);
  {
    const auto eq = find_nash_equilibria(GameSpec::uniform(2, 4, 2.5), sym(1.5), grid);
    CHECK(has(eq, 1, 1));
    CHECK_FALSE(has(eq, 0, 0));
  }
  CHECK(has(find_nash_equilibria(GameSpec::uniform(2, 4, 1.5), sym(1.0), grid), 0, 0));
  {
    const auto eq = find_nash_equilibria(GameSpec::uniform(2, 4, 0.5), sym(0.5), grid);
    REQUIRE_FALSE(eq.empty());
    for (const auto& e : eq) {
      CHECK(std::abs(e.strategy[0] + e.strategy[1] - 0.015625) <= 0.02);
      CHECK(std::max(e.strategy[0], e.strategy[1]) < 0.1);
    }
    const auto clusters = cluster_equilibria(eq, grid, GameSpec::uniform(2, 4, 0.5), sym(0.5));
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].kind == ClusterKind::StationaritySegment);
  }
  {
    const auto eq = find_nash_equilibria(GameSpec::uniform(2, 4, 3.0), sym(1.5), grid);
    REQUIRE(eq.size() == 1);
    CHECK(has(eq, 1, 1));
    const auto clusters = cluster_equilibria(eq, grid, GameSpec::uniform(2, 4, 3.0), sym(1.5));
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].kind == ClusterKind::Pure);
  }
  {
    const auto eq = find_nash_equilibria(GameSpec::uniform(2, 4, 1.5), sym(1.2), grid);
    CHECK(has(eq, 0, 0));
    CHECK(has(eq, 1, 1));
  }
}

TEST_CASE("nash equilibria are verified and symmetric") {
  const SweepGrid grid(0.05);
  for (double f : {0.5, 1.0, 1.5, 2.5})
    for (double b : {0.0, 0.3, 0.8, 1.0, 1.5, 2.0, 3.0}) {
      const auto eq = find_nash_equilibria(GameSpec::uniform(2, 4, f), sym(b), grid);
      for (const auto& e : eq) {
        CHECK(e.verified);
        CHECK(has(eq, e.strategy[1], e.strategy[0]));
      }
    }
}

TEST_CASE("nash sweep at resolution 0.5 matches brute force") {
  const SweepGrid grid(0.5);
  for (double f : {0.5, 1.0, 1.5, 2.5, 3.0})
    for (double b : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0}) {
      const auto spec = GameSpec::uniform(2, 4, f);
      const auto eq = find_nash_equilibria(spec, sym(b), grid);
      const auto oracle = brute_force_nash(spec, sym(b), grid, 1e-9);
      REQUIRE(eq.size() == oracle.size());
      for (std::size_t k = 0; k < eq.size(); ++k) {
        CHECK(eq[k].i0 == oracle[k].first);
        CHECK(eq[k].i1 == oracle[k].second);
      }
    }
}

TEST_CASE("ser landscape") {
  const SweepGrid grid(0.01);
  const auto m = ser_landscape(GameSpec::uniform(2, 4, 0.5), sym(0.5), grid, 0);
  CHECK(m.rows() == 101);
  CHECK(m.cols() == 101);
  CHECK(m(0, 0) == 4.0);
  CHECK(m(100, 100) == doctest::Approx(std::sqrt(2.0)));
  const auto m1 = ser_landscape(GameSpec::uniform(2, 4, 0.5), sym(0.5), grid, 1);
  CHECK(m1.isApprox(m.transpose()));
  CHECK_THROWS_AS(ser_landscape(GameSpec::uniform(2, 4, 0.5), sym(0.5), grid, 2), std::out_of_range);
}

TEST_CASE("pareto coverage set at resolution 0.5 matches exhaustive dominance") {
  const SweepGrid grid(0.5);
  for (double f : {0.0, 0.5, 1.0, 1.5, 2.5, 4.0}) {
    const auto spec = GameSpec::uniform(2, 4, f);
    const auto pcs = pareto_coverage_set(spec, grid);
    for (std::size_t player = 0; player < 2; ++player)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          const auto v = closed_form_return({4, 4}, f, {grid[i], grid[j]}, player);
          bool dominated = false;
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) {
              const auto w = closed_form_return({4, 4}, f, {grid[a], grid[b]}, player);
              if ((w.array() >= v.array()).all() && (w.array() > v.array()).any()) dominated = true;
            }
          CAPTURE(f);
          CAPTURE(player);
          CHECK(pcs.contains(player, i, j) == !dominated);
        }
  }
}

TEST_CASE("pareto coverage set structure") {
  const SweepGrid grid(0.01);
  for (double f : {0.5, 1.5, 2.5}) {
    const auto pcs = pareto_coverage_set(GameSpec::uniform(2, 4, f), grid);
    CHECK(pcs.contains(0, 100, 100));
    CHECK(pcs.contains(1, 100, 100));
    // A player's front is every strategy where the opponent fully cooperates.
    for (std::size_t k = 0; k < grid.size(); ++k) {
      CHECK(pcs.contains(0, k, 100));
      CHECK(pcs.contains(1, 100, k));
    }
    CHECK(pcs.front(0, grid).size() == grid.size());
  }
  CHECK_FALSE(pareto_coverage_set(GameSpec::uniform(2, 4, 0.5), grid).contains(0, 0, 0));
}

TEST_CASE("opponent cooperation never hurts either objective") {
  for (double f : {0.5, 1.5, 2.5})
    for (double own : {0.0, 0.4, 1.0})
      for (double q = 0.0; q < 1.0; q += 0.1) {
        const auto spec = GameSpec::uniform(2, 4, f);
        const auto lo = expected_vector_return(spec, {own, q}, 0);
        const auto hi = expected_vector_return(spec, {own, std::min(1.0, q + 0.1)}, 0);
        CHECK((hi.array() >= lo.array()).all());
      }
}

TEST_CASE("welfare") {
  CHECK(welfare(GameSpec::uniform(2, 4, 1.0), {1, 1}, sym(2)) == doctest::Approx(32.0));
  CHECK(welfare(GameSpec::uniform(2, 4, 1.7), {0, 0}, sym(0.8)) == 8.0);
  CHECK(welfare(GameSpec::uniform(2, 4, 2.5), {1, 1}, sym(1)) == doctest::Approx(20.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 50; ++k) {
    const auto spec = GameSpec::uniform(2, 4, 3 * u(rng));
    const PreferencePair prefs{RiskPreference(3 * u(rng)), RiskPreference(3 * u(rng))};
    const JointStrategy s{u(rng), u(rng)};
    CHECK(welfare(spec, s, prefs) == ser_value(spec, s, 0, prefs[0]) + ser_value(spec, s, 1, prefs[1]));
  }
}

TEST_CASE("price of anarchy") {
  const SweepGrid grid(0.01);
  CHECK(price_of_anarchy(GameSpec::uniform(2, 4, 2.5), sym(1.5), grid) == doctest::Approx(1.0).epsilon(0.01));
  const double poa03 = price_of_anarchy(GameSpec::uniform(2, 4, 0.5), sym(0.3), grid);
  CHECK(poa03 >= 1.0);
  CHECK(poa03 <= 1.05);
  CHECK(std::abs(price_of_anarchy(GameSpec::uniform(2, 4, 1.0), sym(2), grid) - 4.0) <= 0.05);
  for (double f : {0.5, 1.0, 2.0})
    for (double b : {0.0, 0.7, 1.3, 2.6})
      CHECK(price_of_anarchy(GameSpec::uniform(2, 4, f), sym(b), SweepGrid(0.05)) >= 1.0 - 0.05);
  CHECK_THROWS_AS(price_of_anarchy(GameSpec::uniform(2, 4, 1.0), sym(2), grid, -1.0), NoEquilibriumError);
}

TEST_CASE("two-player restriction") {
  const auto spec = GameSpec::uniform(3, 4, 1.0);
  CHECK_THROWS_AS(pareto_coverage_set(spec, SweepGrid(0.5)), std::invalid_argument);
  CHECK_THROWS_AS(find_nash_equilibria(spec, sym(1), SweepGrid(0.5)), std::invalid_argument);
}
