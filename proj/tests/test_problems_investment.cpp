#include <catch_amalgamated.hpp>

#include <cmath>

#include "monostop/mc_engine.hpp"
#include "monostop/problems/investment.hpp"
#include "oracles.hpp"

using namespace monostop;

namespace {

InvestmentParams deterministic_1d() {
    InvestmentParams p;
    p.dimension = 1;
    p.discount = 0.05;
    p.weights = {1.0};
    p.drifts = {-0.5};
    p.jumps = {JumpSpec::none()};
    return p;
}

InvestmentParams symmetric_2d() {
    InvestmentParams p;
    p.dimension = 2;
    p.discount = 0.05;
    p.weights = {0.45, 0.45};
    p.drifts = {-0.05, -0.05};
    p.jumps = {JumpSpec::compound_poisson(0.5, JumpMagnitude::point_mass(std::log(2.0))),
               JumpSpec::compound_poisson(0.5, JumpMagnitude::point_mass(std::log(2.0)))};
    return p;
}

}  // namespace

TEST_CASE("investment_coeff closed forms") {
    CHECK(investment_coeff(1.0, 0.05, -0.5, JumpSpec::none()) ==
          Catch::Approx(0.55).margin(1e-15));
    // rate 2 jumps of size -ln 2: E(e^z - 1) = -1/2, so the jump term adds 1
    CHECK(investment_coeff(1.0, 0.1, 0.0,
                           JumpSpec::compound_poisson(
                               2.0, JumpMagnitude::point_mass(std::log(2.0)))) ==
          Catch::Approx(1.1).margin(1e-15));
    // linear in the weight
    const auto jump = JumpSpec::compound_poisson(1.5, JumpMagnitude::exponential(0.8));
    CHECK(investment_coeff(2.0, 0.05, -0.1, jump) ==
          Catch::Approx(2.0 * investment_coeff(1.0, 0.05, -0.1, jump)).epsilon(1e-15));
}

TEST_CASE("invalid jump models are rejected") {
    CHECK_THROWS_AS(JumpMagnitude::point_mass(-0.5), UsageError);
    CHECK_THROWS_AS(JumpMagnitude::point_mass(0.0), UsageError);
    CHECK_THROWS_AS(JumpMagnitude::exponential(-1.0), UsageError);
    CHECK_THROWS_AS(JumpSpec::compound_poisson(0.0, JumpMagnitude::point_mass(1.0)),
                    UsageError);
    CHECK_THROWS_AS(investment_coeff(1.0, 0.05, 0.5, JumpSpec::none()), UsageError);
    CHECK_THROWS_AS(investment_coeff(1.0, -0.05, 0.0, JumpSpec::none()), UsageError);
}

TEST_CASE("investment_coeff matches an independent integrator for exponential jumps") {
    Rng rng(63);
    for (int i = 0; i < 100; ++i) {
        const double y = 0.2 + 2.0 * rng.uniform01();
        const double r = 0.02 + 0.2 * rng.uniform01();
        const double a = -0.5 * rng.uniform01();
        const double rate = 0.2 + 2.0 * rng.uniform01();
        const double mean = 0.2 + 1.5 * rng.uniform01();
        CHECK(investment_coeff(y, r, a,
                               JumpSpec::compound_poisson(rate, JumpMagnitude::exponential(mean))) ==
              Catch::Approx(oracles::investment_coeff_exp_jumps(y, r, a, rate, mean))
                  .margin(1e-8));
    }
}

TEST_CASE("deterministic problem stops at the closed-form time") {
    const auto params = deterministic_1d();
    const auto problem = make_investment_problem(params);
    const double c = investment_coeff(1.0, 0.05, -0.5, JumpSpec::none());
    const double t_expected = std::log(0.05 / c) / -0.5;
    CHECK(t_expected == Catch::Approx(4.7957905455967414).margin(1e-12));
    for (std::uint64_t seed : {1ull, 23ull}) {
        const auto sim = simulate_path(problem, myopic_rule(), seed);
        CHECK(sim.stop_time == Catch::Approx(t_expected).margin(1e-9));
        const double expected_reward = std::exp(-0.05 * sim.stop_time) *
                                       (1.0 - std::exp(-0.5 * sim.stop_time));
        CHECK(sim.reward == Catch::Approx(expected_reward).margin(1e-12));
        // located crossing has a vanishing advantage rate
        CHECK(std::abs(sim.path.y_values.back()) <= 1e-9);
    }
}

TEST_CASE("an initial state inside the half-space stops at time zero") {
    InvestmentParams params;
    params.dimension = 1;
    params.discount = 0.05;
    params.weights = {0.5};
    params.drifts = {0.0};
    params.jumps = {JumpSpec::none()};
    const auto problem = make_investment_problem(params);
    const auto sim = simulate_path(problem, myopic_rule(), 7);
    CHECK(sim.stop_time == 0.0);
    CHECK(sim.reward == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("advantage sign mirrors the half-space margin exactly") {
    const auto params = symmetric_2d();
    const auto problem = make_investment_problem(params);
    const auto set = investment_stopping_set(params);
    Rng rng(15);
    for (int i = 0; i < 10000; ++i) {
        const State s{rng.uniform01(), rng.uniform01()};
        const double t = 10.0 * rng.uniform01();
        REQUIRE(membership(set, s) == (problem.y_rate(s, t) <= 0.0));
    }
}

TEST_CASE("reward stays within its pathwise bounds") {
    const auto params = symmetric_2d();
    const auto problem = make_investment_problem(params, 40.0);
    const double lower = 1.0 - params.weight_sum();
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(path_seed(2, seed));
        const auto path = problem.sample_path(rng);
        for (std::size_t k = 0; k < path.segments(); ++k) {
            for (int j = 0; j <= 3; ++j) {
                const double t =
                    path.events[k] + (path.events[k + 1] - path.events[k]) * j / 3.0;
                const double x = problem.reward(path.state(k, t), t);
                CHECK(x <= 1.0 + 1e-12);
                CHECK(x >= lower - 1e-12);
            }
        }
    }
}

TEST_CASE("cost factors never increase along a path") {
    const auto params = symmetric_2d();
    const auto problem = make_investment_problem(params, 30.0);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(path_seed(3, seed));
        const auto path = problem.sample_path(rng);
        State prev = path.state(0, 0.0);
        for (std::size_t k = 0; k < path.segments(); ++k) {
            for (int j = 1; j <= 3; ++j) {
                const double t =
                    path.events[k] + (path.events[k + 1] - path.events[k]) * j / 3.0;
                const State s = path.state(k, t);
                for (int i = 0; i < 2; ++i) {
                    CHECK(s[static_cast<std::size_t>(i)] <=
                          prev[static_cast<std::size_t>(i)] + 1e-12);
                    CHECK(s[static_cast<std::size_t>(i)] > 0.0);
                }
                prev = s;
            }
        }
    }
}

TEST_CASE("monotone scan passes for the investment problem") {
    const auto problem = make_investment_problem(symmetric_2d(), 40.0);
    const auto report = monotone_violation_scan(problem, 1000, 19);
    CHECK(report.violation_count == 0);
}

TEST_CASE("tail bound is the documented discount envelope") {
    const auto params = symmetric_2d();
    const auto problem = make_investment_problem(params);
    CHECK(problem.tail_bound(problem.t_max) <= 1e-8);
    CHECK(problem.tail_bound(10.0) ==
          Catch::Approx(std::exp(-0.05 * 10.0) * 1.0).epsilon(1e-12));
    double prev = problem.tail_bound(0.0);
    for (double t = 1.0; t <= 50.0; t += 1.0) {
        const double b = problem.tail_bound(t);
        CHECK(b >= 0.0);
        CHECK(b <= prev);
        prev = b;
    }
}

TEST_CASE("myopic paths rarely hit the default horizon") {
    const auto problem = make_investment_problem(symmetric_2d());
    const auto report = estimate_value(problem, myopic_rule(), 500, 11);
    CHECK(report.truncated_frac == 0.0);
    CHECK(report.stderr_ >= 0.0);
}

TEST_CASE("myopic and first-entry rules stop at the same instant") {
    const auto params = symmetric_2d();
    const auto problem = make_investment_problem(params, 60.0);
    const auto entry = first_entry_rule(investment_stopping_set(params));
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto a = simulate_path(problem, myopic_rule(), seed);
        const auto b = simulate_path(problem, entry, seed);
        REQUIRE(std::abs(a.stop_time - b.stop_time) <= 1e-12);
        REQUIRE(a.reward == b.reward);
    }
}
