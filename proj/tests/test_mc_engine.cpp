#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "monostop/mc_engine.hpp"
#include "monostop/problems/burglar.hpp"
#include "monostop/problems/disorder.hpp"
#include "monostop/problems/house.hpp"
#include "monostop/problems/investment.hpp"

using namespace monostop;

namespace {

HouseParams bernoulli_house(double c) {
    HouseParams p;
    p.dimension = 1;
    p.offers = {OfferDistribution::discrete({0.0, 1.0}, {0.5, 0.5})};
    p.cost = c;
    return p;
}

HouseParams uniform_house(int m, double c) {
    HouseParams p;
    p.dimension = m;
    p.offers.assign(static_cast<std::size_t>(m), OfferDistribution::uniform01());
    p.cost = c;
    return p;
}

}  // namespace

TEST_CASE("one-path simulation of the Bernoulli problem under constant-time(1)") {
    const auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    const double lo = 0.0 - 0.2, hi = 1.0 - 0.2;
    std::set<double> seen;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto sim = simulate_path(problem, constant_time_rule(1.0), seed);
        CHECK(sim.stop_time == 1.0);
        CHECK((sim.reward == lo || sim.reward == hi));
        seen.insert(sim.reward);
        REQUIRE(sim.path.size() == 1);
    }
    CHECK(seen.size() == 2);  // both offers occur across seeds
}

TEST_CASE("estimate_value: Bernoulli constant-time(1) is near 0.3") {
    const auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    const auto report = estimate_value(problem, constant_time_rule(1.0), 20000, 42);
    CHECK(std::abs(report.mean - 0.3) <= 3.0 * report.stderr_);
    CHECK(report.stderr_ > 0.0);
    CHECK(report.truncated_frac == 0.0);
    CHECK(report.n_paths == 20000);
}

TEST_CASE("estimate_value: degenerate offers give an exact value") {
    HouseParams p;
    p.dimension = 1;
    p.offers = {OfferDistribution::point_mass(1.0)};
    p.cost = 0.2;
    const auto problem = make_house_problem(p, HouseVariant::sum);
    const auto report = estimate_value(problem, constant_time_rule(1.0), 1000, 1);
    CHECK(report.mean == 1.0 - 0.2);
    CHECK(report.stderr_ == 0.0);
}

TEST_CASE("estimate_value: truncated myopic at 2 is near the backward-induction value") {
    const auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    const auto report =
        estimate_value(problem, truncated_rule(myopic_rule(), 2.0), 20000, 7);
    CHECK(std::abs(report.mean - 0.45) <= 3.0 * report.stderr_);
}

TEST_CASE("compare_rules: common random numbers and pathwise differences") {
    const auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    const std::vector<StoppingRule> rules = {truncated_rule(myopic_rule(), 2.0),
                                             constant_time_rule(1.0)};
    const auto cmp = compare_rules(problem, rules, 20000, 11);
    const auto& d = cmp.pair(0, 1);
    CHECK(std::abs(d.mean_diff - 0.15) <= 3.0 * d.stderr_diff);
    CHECK(d.stderr_diff > 0.0);
    CHECK(d.stderr_diff < cmp.rules[0].stderr_ + cmp.rules[1].stderr_);
}

TEST_CASE("compare_rules: an identical rule twice differs by exactly zero") {
    const auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    const std::vector<StoppingRule> rules = {myopic_rule(), myopic_rule()};
    const auto cmp = compare_rules(problem, rules, 5000, 3);
    const auto& d = cmp.pair(0, 1);
    CHECK(d.mean_diff == 0.0);
    CHECK(d.stderr_diff == 0.0);
    CHECK(cmp.rules[0].mean == cmp.rules[1].mean);
}

TEST_CASE("myopic beats a shrunken entry ball up to noise") {
    const auto params = uniform_house(2, 0.3);
    const auto problem = make_house_problem(params, HouseVariant::sum);
    // entry ball of radius 0.5 sqrt(0.6), i.e. radius factor 1/2
    const std::vector<StoppingRule> rules = {
        myopic_rule(),
        first_entry_rule(house_stopping_set(params, HouseVariant::sum, 0.5), "entry:0.5")};
    const auto cmp = compare_rules(problem, rules, 20000, 5);
    const auto& d = cmp.pair(0, 1);
    CHECK(d.mean_diff >= -2.0 * d.stderr_diff);
}

TEST_CASE("determinism: identical inputs give bit-identical reports") {
    const auto problem = make_house_problem(uniform_house(2, 0.3), HouseVariant::sum);
    const auto a = estimate_value(problem, myopic_rule(), 5000, 99);
    const auto b = estimate_value(problem, myopic_rule(), 5000, 99);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK(a.truncated_frac == b.truncated_frac);
    const auto s1 = simulate_path(problem, myopic_rule(), 123);
    const auto s2 = simulate_path(problem, myopic_rule(), 123);
    CHECK(s1.stop_time == s2.stop_time);
    CHECK(s1.reward == s2.reward);
    REQUIRE(s1.path.size() == s2.path.size());
    for (std::size_t i = 0; i < s1.path.size(); ++i)
        CHECK(s1.path.y_values[i] == s2.path.y_values[i]);
}

TEST_CASE("continuous crossings land on a zero or an event jump") {
    DisorderParams dp;
    dp.dimension = 2;
    dp.prior_rates = {1.0, 1.0};
    dp.pre_intensities = {1.0, 1.0};
    dp.post_intensities = {1.5, 1.5};
    dp.delay_costs = {1.0, 1.0};
    const auto problem = make_disorder_problem(dp);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Rng rng(seed);
        const auto path = problem.sample_path(rng);
        const auto stop = detail::continuous_stop(problem, path, myopic_rule(), problem.t_max);
        REQUIRE(!stop.by_cap);
        const double y_at = problem.oriented_y(path.state(stop.segment, stop.time), stop.time);
        CHECK(y_at <= 0.0);
        bool at_event = false;
        for (double e : path.events) at_event = at_event || e == stop.time;
        if (!at_event) CHECK(std::abs(y_at) <= 1e-9);
    }
}

TEST_CASE("pathwise extreme statistics are ordered") {
    const auto problem = make_house_problem(uniform_house(2, 0.3), HouseVariant::sum);
    const auto stats = path_statistics(problem, 500, 60, 21);
    CHECK(stats.mean_sup_reward >= stats.mean_inf_reward);
    CHECK(stats.paths == 500);
}

TEST_CASE("engine preconditions") {
    const auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    CHECK_THROWS_AS(estimate_value(problem, myopic_rule(), 1, 1), UsageError);
    CHECK_THROWS_AS(compare_rules(problem, {myopic_rule()}, 100, 1), UsageError);
    // entry-rule dimension mismatch
    const auto wrong =
        first_entry_rule(house_stopping_set(uniform_house(2, 0.3), HouseVariant::sum, 1.0));
    CHECK_THROWS_AS(simulate_path(problem, wrong, 1), UsageError);
}

TEST_CASE("horizon cap truncates and flags never-stopping rules") {
    auto problem = make_house_problem(bernoulli_house(0.2), HouseVariant::sum);
    problem.horizon_cap = 50;
    // a constant-time rule beyond the cap never fires
    const auto sim = simulate_path(problem, constant_time_rule(1000.0), 4);
    CHECK(sim.truncated);
    CHECK(sim.stop_time == 50.0);
    const auto report = estimate_value(problem, constant_time_rule(1000.0), 200, 4);
    CHECK(report.truncated_frac == 1.0);
    CHECK(report.horizon_cap == 50.0);
}

TEST_CASE("event paths are well formed across families") {
    const auto house = make_house_problem(uniform_house(2, 0.3), HouseVariant::sum);
    DisorderParams dp;
    dp.dimension = 2;
    dp.prior_rates = {1.0, 1.0};
    dp.pre_intensities = {1.0, 1.0};
    dp.post_intensities = {1.5, 1.5};
    dp.delay_costs = {1.0, 1.0};
    const auto disorder = make_disorder_problem(dp);

    const auto inspect = [](const EventPath& path) {
        REQUIRE(path.times.size() == path.states.size());
        REQUIRE(path.times.size() == path.rewards.size());
        REQUIRE(path.times.size() == path.y_values.size());
        for (std::size_t i = 1; i < path.times.size(); ++i)
            CHECK(path.times[i] > path.times[i - 1]);
    };
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        inspect(simulate_path(house, constant_time_rule(25.0), seed).path);
        inspect(simulate_path(disorder, myopic_rule(), seed).path);
    }
}

TEST_CASE("myopic dominance holds across the remaining shipped monotone configs") {
    // lighter-weight sweep complementing the acceptance protocol
    constexpr double factors[] = {0.5, 0.9, 1.25, 2.0};
    const auto check_discrete = [&](const HouseParams& params, HouseVariant variant) {
        const auto problem = make_house_problem(params, variant);
        std::vector<StoppingRule> rules{truncated_rule(myopic_rule(), 300.0)};
        for (double f : factors)
            rules.push_back(
                truncated_rule(first_entry_rule(house_stopping_set(params, variant, f)), 300.0));
        const auto cmp = compare_rules(problem, rules, 10000, 77);
        for (std::size_t i = 1; i < rules.size(); ++i) {
            const auto& d = cmp.pair(0, i);
            CHECK(d.mean_diff >= -2.0 * d.stderr_diff);
        }
    };
    check_discrete(bernoulli_house(0.2), HouseVariant::sum);
    {
        HouseParams p;
        p.dimension = 2;
        p.offers.assign(2, OfferDistribution::exponential1());
        p.cost = 1.0;
        check_discrete(p, HouseVariant::sum);
    }
    {
        HouseParams p;
        p.dimension = 2;
        p.offers = {OfferDistribution::discrete({0.2, 0.7, 1.0}, {0.3, 0.4, 0.3}),
                    OfferDistribution::discrete({0.1, 0.9}, {0.5, 0.5})};
        p.cost = 0.15;
        check_discrete(p, HouseVariant::sum);
    }
    {
        HouseParams p;
        p.dimension = 1;
        p.offers = {OfferDistribution::uniform01()};
        p.discount = 0.5;
        check_discrete(p, HouseVariant::product);
    }
    {
        // burglar product: the entry family on the gains walk
        BurglarParams b;
        b.dimension = 2;
        b.survival = {0.5, 0.5};
        b.gains = {GainDistribution::exponential(1.0), GainDistribution::exponential(1.0)};
        const auto problem = make_burglar_product_problem(b);
        std::vector<StoppingRule> rules{truncated_rule(myopic_rule(), 300.0)};
        for (double f : factors)
            rules.push_back(truncated_rule(first_entry_rule(burglar_product_set(b, f)), 300.0));
        const auto cmp = compare_rules(problem, rules, 10000, 78);
        for (std::size_t i = 1; i < rules.size(); ++i) {
            const auto& d = cmp.pair(0, i);
            CHECK(d.mean_diff >= -2.0 * d.stderr_diff);
        }
    }
}

TEST_CASE("one-dimensional uniform values match the first-crossing closed form") {
    // With uniform offers the myopic value solves the indifference relation
    // and equals the threshold itself. Sum: stop at S >= 1 - sqrt(2c), value
    // E[Z | Z >= s*] - c E[tau] = (1+s*)/2 - c/(1-s*) = s*. Product: stop at
    // S >= s* with (1+s*^2)/(2 s*) = 1/rho, value rho(1-s*^2)/(2(1-rho s*)) = s*.
    {
        HouseParams p;
        p.dimension = 1;
        p.offers = {OfferDistribution::uniform01()};
        p.cost = 0.1;
        const auto problem = make_house_problem(p, HouseVariant::sum);
        const double s_star = 1.0 - std::sqrt(2.0 * 0.1);
        const double value = (1.0 + s_star) / 2.0 - 0.1 / (1.0 - s_star);
        CHECK(value == Catch::Approx(s_star).margin(1e-12));
        const auto report = estimate_value(problem, myopic_rule(), 40000, 2029);
        CHECK(std::abs(report.mean - value) <= 3.0 * report.stderr_);
    }
    {
        HouseParams p;
        p.dimension = 1;
        p.offers = {OfferDistribution::uniform01()};
        p.discount = 0.5;
        const auto problem = make_house_problem(p, HouseVariant::product);
        const double s_star = 2.0 - std::sqrt(3.0);  // (1+z^2)/(2z) = 2
        const double value =
            0.5 * (1.0 - s_star * s_star) / (2.0 * (1.0 - 0.5 * s_star));
        CHECK(value == Catch::Approx(s_star).margin(1e-12));
        const auto report = estimate_value(problem, myopic_rule(), 40000, 2030);
        CHECK(std::abs(report.mean - value) <= 3.0 * report.stderr_);
    }
}
