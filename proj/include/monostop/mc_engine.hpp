#pragma once

// Seeded path simulation and Monte Carlo evaluation of stopping rules.
// Every path draws its own generator from (root seed, path index), so
// estimates are bit-reproducible and rules can be compared on common random
// numbers by replaying the same per-path seed. Continuous problems are
// simulated exactly event-to-event; zero crossings of the advantage between
// events are located by bisection to 1e-12 time tolerance.

#include <cstdint>
#include <string>
#include <vector>

#include "monostop/numerics.hpp"
#include "monostop/rng.hpp"
#include "monostop/stopping_core.hpp"

namespace monostop {

inline constexpr double kCrossingTimeTol = 1e-12;

struct EstimateReport {
    std::string rule_id;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    double truncated_frac = 0.0;
    double horizon_cap = 0.0;
};

struct ComparisonReport {
    struct PairDiff {
        std::size_t first = 0;
        std::size_t second = 0;
        double mean_diff = 0.0;    // mean of pathwise (first - second)
        double stderr_diff = 0.0;  // stderr of the pathwise differences
    };

    std::vector<EstimateReport> rules;
    std::vector<PairDiff> pairs;

    const PairDiff& pair(std::size_t i, std::size_t j) const {
        for (const auto& p : pairs)
            if (p.first == i && p.second == j) return p;
        throw UsageError("comparison report: pair not found");
    }
};

struct SimResult {
    EventPath path;
    double stop_time = 0.0;
    double reward = 0.0;
    bool truncated = false;
};

namespace detail {

struct WalkOutcome {
    double stop_time = 0.0;
    double reward = 0.0;
    bool truncated = false;
};

// Discrete walk; the rule never consumes randomness, so two rules replayed
// with the same seed see the same offer/gain realizations.
template <typename Recorder>
WalkOutcome walk_discrete(const DiscreteProblem& p, const StoppingRule& rule, Rng& rng,
                          Recorder&& record) {
    State s = p.initial(rng);
    for (std::size_t n = 1;; ++n) {
        const double oy = p.oriented_y(s, n);
        const double x = p.reward(s, n);
        record(n, s, x, oy);
        if (p.absorbed && p.absorbed(s)) return {static_cast<double>(n), x, false};
        if (rule.stops(p.observable(s), oy, static_cast<double>(n)))
            return {static_cast<double>(n), x, false};
        if (n >= p.horizon_cap) {
            const double xr = p.terminal_value ? *p.terminal_value : x;
            return {static_cast<double>(n), xr, true};
        }
        s = p.step(s, n, rng);
    }
}

struct ContinuousStop {
    double time = 0.0;
    std::size_t segment = 0;
    bool by_cap = false;
};

// First stop time of a rule on a fixed event skeleton, scanned no further
// than `cap`. Crossings inside a segment are bracketed between a positive
// left value and a nonpositive right value and bisected; a nonpositive value
// at a segment start is a stop at that event (the advantage jumped across 0).
inline ContinuousStop continuous_stop(const ContinuousProblem& p, const ContinuousPath& path,
                                      const StoppingRule& rule, double cap) {
    switch (rule.kind) {
        case StoppingRule::Kind::constant_time: {
            const double t = std::min(rule.stop_time, cap);
            return {t, path.segment_of(t), rule.stop_time > cap};
        }
        case StoppingRule::Kind::truncated: {
            const ContinuousStop inner =
                continuous_stop(p, path, *rule.inner, std::min(rule.horizon, cap));
            if (inner.by_cap && rule.horizon <= cap)
                return {inner.time, inner.segment, false};  // the rule's own horizon
            return inner;
        }
        case StoppingRule::Kind::myopic:
        case StoppingRule::Kind::first_entry: break;
    }

    const bool myopic = rule.kind == StoppingRule::Kind::myopic;
    auto signal = [&](std::size_t seg, double t) {
        const State s = path.state(seg, t);
        return myopic ? p.oriented_y(s, t) : margin(rule.set, p.observable(s));
    };

    for (std::size_t k = 0; k < path.segments(); ++k) {
        const double t0 = path.events[k];
        if (t0 > cap) break;
        const double g0 = signal(k, t0);
        if (g0 <= 0.0) return {t0, k, false};
        const double t1 = std::min(path.events[k + 1], cap);
        if (t1 <= t0) break;
        const double g1 = signal(k, t1);
        if (g1 <= 0.0) {
            const double t_hat =
                bisect_crossing([&](double t) { return signal(k, t); }, t0, t1, kCrossingTimeTol);
            return {t_hat, k, false};
        }
        if (t1 < path.events[k + 1]) break;  // cap interior to this segment
    }
    return {cap, path.segment_of(cap), true};
}

template <typename Recorder>
WalkOutcome walk_continuous(const ContinuousProblem& p, const ContinuousPath& path,
                            const StoppingRule& rule, Recorder&& record) {
    const ContinuousStop stop = continuous_stop(p, path, rule, p.t_max);
    for (std::size_t k = 0; k < path.segments(); ++k) {
        const double t = path.events[k];
        if (t >= stop.time) break;
        const State s = path.state(k, t);
        record(t, s, p.reward(s, t), p.oriented_y(s, t));
    }
    const State s = path.state(stop.segment, stop.time);
    const double x = p.reward(s, stop.time);
    record(stop.time, s, x, p.oriented_y(s, stop.time));
    return {stop.time, x, stop.by_cap};
}

inline WalkOutcome walk(const DiscreteProblem& p, const StoppingRule& r, Rng& rng) {
    return walk_discrete(p, r, rng, [](std::size_t, const State&, double, double) {});
}

inline WalkOutcome walk(const ContinuousProblem& p, const StoppingRule& r, Rng& rng) {
    const ContinuousPath path = p.sample_path(rng);
    return walk_continuous(p, path, r, [](double, const State&, double, double) {});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate_path
// ---------------------------------------------------------------------------

inline SimResult simulate_path(const DiscreteProblem& problem, const StoppingRule& rule,
                               std::uint64_t seed) {
    if (rule.kind == StoppingRule::Kind::first_entry &&
        set_dimension(rule.set) != problem.dimension)
        throw UsageError("simulate_path: rule set dimension does not match problem");
    SimResult result;
    Rng rng(seed);
    const auto outcome = detail::walk_discrete(
        problem, rule, rng, [&](std::size_t n, const State& s, double x, double oy) {
            result.path.push(static_cast<double>(n), s, x, oy);
        });
    result.stop_time = outcome.stop_time;
    result.reward = outcome.reward;
    result.truncated = outcome.truncated;
    result.path.truncated = outcome.truncated;
    return result;
}

inline SimResult simulate_path(const ContinuousProblem& problem, const StoppingRule& rule,
                               std::uint64_t seed) {
    if (rule.kind == StoppingRule::Kind::first_entry &&
        set_dimension(rule.set) != problem.dimension)
        throw UsageError("simulate_path: rule set dimension does not match problem");
    SimResult result;
    Rng rng(seed);
    const ContinuousPath path = problem.sample_path(rng);
    const auto outcome = detail::walk_continuous(
        problem, path, rule, [&](double t, const State& s, double x, double oy) {
            result.path.push(t, s, x, oy);
        });
    result.stop_time = outcome.stop_time;
    result.reward = outcome.reward;
    result.truncated = outcome.truncated;
    result.path.truncated = outcome.truncated;
    return result;
}

// ---------------------------------------------------------------------------
// estimate_value / compare_rules
// ---------------------------------------------------------------------------

template <typename Problem>
EstimateReport estimate_value(const Problem& problem, const StoppingRule& rule,
                              std::size_t path_count, std::uint64_t seed) {
    if (path_count < 2) throw UsageError("estimate_value: need at least 2 paths");
    std::vector<double> rewards;
    rewards.reserve(path_count);
    std::size_t truncated = 0;
    for (std::size_t i = 0; i < path_count; ++i) {
        Rng rng(path_seed(seed, i));
        const auto out = detail::walk(problem, rule, rng);
        rewards.push_back(out.reward);
        if (out.truncated) ++truncated;
    }
    const auto ms = mean_and_stderr(rewards);
    EstimateReport report;
    report.rule_id = rule.id;
    report.mean = ms.mean;
    report.stderr_ = ms.stderr_;
    report.n_paths = path_count;
    report.seed = seed;
    report.truncated_frac = static_cast<double>(truncated) / static_cast<double>(path_count);
    if constexpr (std::is_same_v<Problem, DiscreteProblem>)
        report.horizon_cap = static_cast<double>(problem.horizon_cap);
    else
        report.horizon_cap = problem.t_max;
    return report;
}

// All rules are evaluated on identical path realizations (same per-path
// seeds); difference standard errors are computed from the pathwise
// differences, not pooled variances.
template <typename Problem>
ComparisonReport compare_rules(const Problem& problem, const std::vector<StoppingRule>& rules,
                               std::size_t path_count, std::uint64_t seed) {
    if (rules.size() < 2) throw UsageError("compare_rules: need at least 2 rules");
    const std::size_t k = rules.size();
    std::vector<std::vector<double>> rewards(k);
    std::vector<std::size_t> truncated(k, 0);
    for (auto& v : rewards) v.reserve(path_count);

    for (std::size_t i = 0; i < path_count; ++i) {
        const std::uint64_t s = path_seed(seed, i);
        if constexpr (std::is_same_v<Problem, DiscreteProblem>) {
            for (std::size_t r = 0; r < k; ++r) {
                Rng rng(s);
                const auto out = detail::walk(problem, rules[r], rng);
                rewards[r].push_back(out.reward);
                if (out.truncated) ++truncated[r];
            }
        } else {
            Rng rng(s);
            const ContinuousPath path = problem.sample_path(rng);
            for (std::size_t r = 0; r < k; ++r) {
                const auto out = detail::walk_continuous(
                    problem, path, rules[r], [](double, const State&, double, double) {});
                rewards[r].push_back(out.reward);
                if (out.truncated) ++truncated[r];
            }
        }
    }

    ComparisonReport report;
    for (std::size_t r = 0; r < k; ++r) {
        const auto ms = mean_and_stderr(rewards[r]);
        EstimateReport er;
        er.rule_id = rules[r].id;
        er.mean = ms.mean;
        er.stderr_ = ms.stderr_;
        er.n_paths = path_count;
        er.seed = seed;
        er.truncated_frac =
            static_cast<double>(truncated[r]) / static_cast<double>(path_count);
        if constexpr (std::is_same_v<Problem, DiscreteProblem>)
            er.horizon_cap = static_cast<double>(problem.horizon_cap);
        else
            er.horizon_cap = problem.t_max;
        report.rules.push_back(std::move(er));
    }
    std::vector<double> diffs(path_count);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            for (std::size_t i = 0; i < path_count; ++i)
                diffs[i] = rewards[a][i] - rewards[b][i];
            const auto ms = mean_and_stderr(diffs);
            report.pairs.push_back({a, b, ms.mean, ms.stderr_});
        }
    }
    return report;
}

// Pathwise running extrema of the reward; emitted as a diagnostic for the
// integrability conditions behind infinite-horizon optimality, which the
// artifact does not certify.
struct PathStatistics {
    double mean_sup_reward = 0.0;
    double mean_inf_reward = 0.0;
    std::size_t paths = 0;
    std::size_t length = 0;
};

inline PathStatistics path_statistics(const DiscreteProblem& problem, std::size_t path_count,
                                      std::size_t length, std::uint64_t seed) {
    CompensatedSum sup_acc, inf_acc;
    for (std::size_t p = 0; p < path_count; ++p) {
        Rng rng(path_seed(seed, p));
        State s = problem.initial(rng);
        double sup = -std::numeric_limits<double>::infinity();
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= length; ++n) {
            const double x = problem.reward(s, n);
            sup = std::max(sup, x);
            inf = std::min(inf, x);
            if (n < length) s = problem.step(s, n, rng);
        }
        sup_acc.add(sup);
        inf_acc.add(inf);
    }
    PathStatistics stats;
    stats.paths = path_count;
    stats.length = length;
    stats.mean_sup_reward = sup_acc.value() / static_cast<double>(path_count);
    stats.mean_inf_reward = inf_acc.value() / static_cast<double>(path_count);
    return stats;
}

}  // namespace monostop
