#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "monostop/mc_engine.hpp"
#include "monostop/problems/burglar.hpp"
#include "monostop/problems/house.hpp"
#include "monostop/stopping_core.hpp"

using namespace monostop;

namespace {

HouseParams uniform_house(int m, double c) {
    HouseParams p;
    p.dimension = m;
    p.offers.assign(static_cast<std::size_t>(m), OfferDistribution::uniform01());
    p.cost = c;
    return p;
}

BurglarParams symmetric_burglars(int m, double p, double mean_gain) {
    BurglarParams b;
    b.dimension = m;
    b.survival.assign(static_cast<std::size_t>(m), p);
    b.gains.assign(static_cast<std::size_t>(m), GainDistribution::exponential(mean_gain));
    return b;
}

// Fabricated constant problems used to exercise the diagnostics.
DiscreteProblem constant_problem(double y_value) {
    DiscreteProblem p;
    p.name = "constant";
    p.dimension = 1;
    p.initial = [](Rng&) { return State{1.0}; };
    p.step = [](const State& s, std::size_t, Rng&) { return s; };
    p.reward = [](const State&, std::size_t) { return 1.0; };
    p.y_increment = [y_value](const State&, std::size_t) { return y_value; };
    p.ratio = [](const State&, std::size_t) { return 1.0; };
    return p;
}

}  // namespace

TEST_CASE("myopic_time stops at the first nonpositive advantage") {
    CHECK(myopic_time(std::vector<double>{2, 1, -1, 5}) == 3);
    CHECK(myopic_time(std::vector<double>{1, 1, 1}, 3) == 3);
    CHECK(myopic_time(std::vector<double>{0, 1}) == 1);  // equality stops
    CHECK(myopic_time(std::vector<double>{1, 1, 1}) == kNever);
    CHECK(myopic_time(std::vector<double>{2, -1, 5}, 10) == 2);
    CHECK_THROWS_AS(myopic_time(std::vector<double>{}), UsageError);
}

TEST_CASE("compensator accumulates partial sums with A_1 = 0") {
    CHECK(compensator(std::vector<double>{1, -1}) == std::vector<double>{0, 1, 0});
    CHECK(compensator(std::vector<double>{}) == std::vector<double>{0});
    CHECK(compensator(std::vector<double>{2, 2, -3}) == std::vector<double>{0, 2, 4, 1});
}

TEST_CASE("compensator output length and head are fixed") {
    Rng rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> y;
        const int n = static_cast<int>(rng.next_u64() % 40);
        for (int i = 0; i < n; ++i) y.push_back(rng.uniform01() - 0.5);
        const auto a = compensator(y);
        REQUIRE(a.size() == y.size() + 1);
        CHECK(a.front() == 0.0);
    }
}

TEST_CASE("truncated myopic decisions agree with myopic below the horizon") {
    const StoppingRule trunc = truncated_rule(myopic_rule(), 20.0);
    const StoppingRule plain = myopic_rule();
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const double y = rng.uniform01() - 0.5;
        const double t = 1.0 + static_cast<double>(rng.next_u64() % 19);
        const State obs{rng.uniform01()};
        REQUIRE(trunc.stops(obs, y, t) == plain.stops(obs, y, t));
    }
    CHECK(trunc.stops(State{0.5}, 1.0, 20.0));  // always stops at the horizon
}

TEST_CASE("compensator attains its maximum at the myopic time on monotone paths") {
    const auto problem = make_house_problem(uniform_house(2, 0.3), HouseVariant::sum);
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto sim = simulate_path(problem, constant_time_rule(40.0), seed);
        const auto& y = sim.path.y_values;
        const auto a = compensator(y);  // a[n-1] = A_n

        const std::size_t tau = myopic_time(y, y.size());
        double a_max = a.front();
        for (std::size_t n = 0; n < y.size(); ++n) a_max = std::max(a_max, a[n]);
        CHECK(a[tau - 1] == a_max);

        const std::size_t L = 5;
        const std::size_t tau_l = myopic_time(y, L);
        double a_max_l = a.front();
        for (std::size_t n = 0; n < L; ++n) a_max_l = std::max(a_max_l, a[n]);
        CHECK(a[tau_l - 1] == a_max_l);
    }
}

TEST_CASE("monotone scan finds no violations on monotone families") {
    const auto house = make_house_problem(uniform_house(2, 0.3), HouseVariant::sum);
    const auto house_report = monotone_violation_scan(house, 500, 60, 2024);
    CHECK(house_report.violation_count == 0);
    CHECK(house_report.monotone_evidence());
    CHECK(!house_report.witness.has_value());

    const auto single = make_burglar_sum_problem(symmetric_burglars(1, 0.5, 1.0));
    const auto single_report = monotone_violation_scan(single, 500, 40, 99);
    CHECK(single_report.violation_count == 0);
}

TEST_CASE("monotone scan finds violations on the two-gang burglar sum") {
    const auto problem = make_burglar_sum_problem(symmetric_burglars(2, 0.5, 1.0));
    const auto report = monotone_violation_scan(problem, 2000, 30, 5);
    CHECK(report.violation_count > 0);
    REQUIRE(report.witness.has_value());
    REQUIRE(report.witness_index >= 2);
    // the witness path indeed crosses and comes back
    const auto& y = report.witness->y_values;
    const std::size_t k = report.witness_index;
    REQUIRE(k <= y.size());
    CHECK(y[k - 1] > 0.0);
    bool crossed_before = false;
    for (std::size_t j = 0; j + 1 < k; ++j) crossed_before = crossed_before || y[j] <= 0.0;
    CHECK(crossed_before);
}

TEST_CASE("scan length precondition") {
    const auto problem = make_house_problem(uniform_house(1, 0.1), HouseVariant::sum);
    CHECK_THROWS_AS(monotone_violation_scan(problem, 10, 1, 1), UsageError);
}

TEST_CASE("one-step increment consistency: uniform house sum") {
    HouseParams hp = uniform_house(1, 0.1);
    const auto problem = make_house_problem(hp, HouseVariant::sum);
    const State s{0.5};
    const auto check = increment_consistency_check(problem, s, 1, 20000, 42);
    CHECK(check.analytic == Catch::Approx(0.025).margin(1e-15));
    CHECK(check.pass);
    CHECK(std::abs(check.estimate - check.analytic) <= 4.0 * check.stderr_ + 1e-12);
}

TEST_CASE("one-step increment consistency: degenerate offers are exact") {
    HouseParams hp;
    hp.dimension = 1;
    hp.offers = {OfferDistribution::point_mass(1.0)};
    hp.cost = 0.2;
    const auto problem = make_house_problem(hp, HouseVariant::sum);
    const auto check = increment_consistency_check(problem, State{1.0}, 1, 200, 1);
    CHECK(check.analytic == -0.2);
    CHECK(check.estimate == Catch::Approx(-0.2).margin(1e-14));
    CHECK(check.stderr_ == 0.0);
    CHECK(check.pass);
}

TEST_CASE("one-step increment consistency: caught burglar is exactly zero") {
    const auto problem = make_burglar_sum_problem(symmetric_burglars(1, 0.5, 1.0));
    const State caught{2.5, 0.0};  // pile 2.5, gang already caught
    const auto check = increment_consistency_check(problem, caught, 3, 500, 9);
    CHECK(check.analytic == 0.0);
    CHECK(check.estimate == 0.0);
    CHECK(check.stderr_ == 0.0);
    CHECK(check.pass);
}

TEST_CASE("increment consistency sample precondition") {
    const auto problem = make_house_problem(uniform_house(1, 0.1), HouseVariant::sum);
    CHECK_THROWS_AS(increment_consistency_check(problem, State{0.5}, 1, 99, 1), UsageError);
}

TEST_CASE("measure-change diagnostic: immediate stop gives all-zero estimates") {
    const auto problem = constant_problem(-1.0);  // tau* == 1 on every path
    const auto report = measure_change_diagnostic(problem, {1, 3, 5}, 500, 3);
    for (double e : report.estimates) CHECK(e == 0.0);
    CHECK(report.pass);
}

TEST_CASE("measure-change diagnostic: never-stopping constant problem fails") {
    const auto problem = constant_problem(1.0);  // advantage stays positive
    const auto report = measure_change_diagnostic(problem, {5, 10, 20}, 300, 3);
    for (double e : report.estimates) CHECK(e == 1.0);
    CHECK(!report.pass);
}

TEST_CASE("measure-change diagnostic preconditions") {
    auto no_ratio = constant_problem(1.0);
    no_ratio.ratio = nullptr;
    CHECK_THROWS_AS(measure_change_diagnostic(no_ratio, {2}, 200, 1), UsageError);

    auto negative = constant_problem(1.0);
    negative.reward = [](const State&, std::size_t) { return -1.0; };
    CHECK_THROWS_AS(measure_change_diagnostic(negative, {2}, 200, 1), UsageError);
}

TEST_CASE("increment consistency holds across shipped families at random states") {
    // 20 random (state, time) points per family, one-step Monte Carlo with
    // 1e5 samples against the analytic advantage
    std::vector<DiscreteProblem> problems;
    problems.push_back(make_house_problem(uniform_house(2, 0.3), HouseVariant::sum));
    {
        HouseParams p;
        p.dimension = 2;
        p.offers.assign(2, OfferDistribution::exponential1());
        p.cost = 1.0;
        problems.push_back(make_house_problem(p, HouseVariant::sum));
    }
    {
        HouseParams p;
        p.dimension = 1;
        p.offers = {OfferDistribution::discrete({0.0, 0.5, 1.0}, {0.3, 0.4, 0.3})};
        p.cost = 0.2;
        problems.push_back(make_house_problem(p, HouseVariant::sum));
    }
    {
        HouseParams p;
        p.dimension = 2;
        p.offers.assign(2, OfferDistribution::uniform01());
        p.discount = 0.9;
        problems.push_back(make_house_problem(p, HouseVariant::product));
    }
    problems.push_back(make_burglar_sum_problem(symmetric_burglars(2, 0.5, 1.0)));
    {
        BurglarParams b = symmetric_burglars(2, 0.5, 1.0);
        problems.push_back(make_burglar_product_problem(b));
    }

    std::uint64_t salt = 0;
    for (const auto& problem : problems) {
        for (int point = 0; point < 20; ++point) {
            Rng rng(path_seed(31337, salt++));
            State s = problem.initial(rng);
            const std::size_t depth = 1 + rng.next_u64() % 8;
            for (std::size_t n = 1; n < depth; ++n) s = problem.step(s, n, rng);
            const auto check =
                increment_consistency_check(problem, s, depth, 100000, path_seed(7, salt));
            INFO(problem.name << " point " << point << ": analytic " << check.analytic
                              << " estimate " << check.estimate << " se " << check.stderr_);
            REQUIRE(check.pass);
        }
    }
}
