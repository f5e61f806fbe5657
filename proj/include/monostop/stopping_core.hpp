#pragma once

// Problem abstraction and additive-decomposition bookkeeping: a stopping
// problem is its reward X, its one-step advantage Y (the compensator
// increment), and optionally the one-step ratio for positive rewards.
// The myopic rule stops as soon as the advantage is nonpositive, with
// equality counting as a stop. Minimization problems carry a direction
// flag; rule logic always works on the maximization orientation.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "monostop/errors.hpp"
#include "monostop/numerics.hpp"
#include "monostop/rng.hpp"
#include "monostop/stopping_sets.hpp"

namespace monostop {

using State = std::vector<double>;

enum class Direction { maximize, minimize };

// Sentinel for "the myopic time is not reached on this data".
inline constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

// A discrete-time stopping problem, observed from time index 1 on.
// `initial` draws the state at n = 1, `step` maps the state at n to n+1.
// `y_increment` must be the analytic conditional advantage
// E(X_{n+1} | A_n) - X_n evaluated at the state; it refers to the stored
// (un-negated) reward also for minimization problems.
struct DiscreteProblem {
    std::string name;
    Direction direction = Direction::maximize;
    int dimension = 1;  // leading state coordinates visible to entry rules
    std::size_t horizon_cap = 10000;

    std::function<State(Rng&)> initial;
    std::function<State(const State&, std::size_t, Rng&)> step;
    std::function<double(const State&, std::size_t)> reward;
    std::function<double(const State&, std::size_t)> y_increment;
    // One-step ratio E(X_{n+1}/X_n | A_n); set only for positive-reward
    // (multiplicative-form) problems.
    std::function<double(const State&, std::size_t)> ratio;
    // States from which the reward is frozen and every rule stops.
    std::function<bool(const State&)> absorbed;
    // Reward assigned when a simulation is cut at the horizon cap.
    std::optional<double> terminal_value;

    double oriented_y(const State& s, std::size_t n) const {
        const double y = y_increment(s, n);
        return direction == Direction::maximize ? y : -y;
    }

    std::span<const double> observable(const State& s) const {
        return {s.data(), static_cast<std::size_t>(dimension)};
    }
};

// One realized trajectory, at event resolution. For discrete problems the
// times are the indices 1, 2, ...; for continuous problems they are the
// recorded event/sample times. `y_values` are stored in the maximization
// orientation (minimization problems record the negated increment).
struct EventPath {
    std::vector<double> times;
    std::vector<State> states;
    std::vector<double> rewards;
    std::vector<double> y_values;
    bool truncated = false;

    std::size_t size() const { return times.size(); }

    void push(double t, State s, double x, double y) {
        times.push_back(t);
        states.push_back(std::move(s));
        rewards.push_back(x);
        y_values.push_back(y);
    }
};

// Event skeleton of one continuous-time path up to t_max. `events` starts at
// 0 and ends at t_max; `state` evaluates the closed-form state within segment
// k, valid for t in [events[k], events[k+1]] with the jump at the right end
// belonging to the next segment.
struct ContinuousPath {
    std::vector<double> events;
    std::function<State(std::size_t, double)> state;

    std::size_t segments() const { return events.empty() ? 0 : events.size() - 1; }

    std::size_t segment_of(double t) const {
        std::size_t k = 0;
        while (k + 2 < events.size() && events[k + 1] <= t) ++k;
        return k;
    }

    State state_at(double t) const { return state(segment_of(t), t); }
};

// An event-driven continuous-time stopping problem. Between events the state
// is piecewise closed form and y_rate is continuous, so zero crossings are
// locatable by bisection. `tail_bound` is the documented truncation-error
// certificate as a function of the horizon; it is nonnegative and
// non-increasing.
struct ContinuousProblem {
    std::string name;
    Direction direction = Direction::maximize;
    int dimension = 1;
    double t_max = 100.0;

    std::function<ContinuousPath(Rng&)> sample_path;
    std::function<double(const State&, double)> reward;
    std::function<double(const State&, double)> y_rate;
    std::function<double(double)> tail_bound;

    double oriented_y(const State& s, double t) const {
        const double y = y_rate(s, t);
        return direction == Direction::maximize ? y : -y;
    }

    std::span<const double> observable(const State& s) const {
        return {s.data(), static_cast<std::size_t>(dimension)};
    }
};

// ---------------------------------------------------------------------------
// Stopping rules
// ---------------------------------------------------------------------------

struct StoppingRule {
    enum class Kind { myopic, first_entry, constant_time, truncated };

    Kind kind = Kind::myopic;
    std::string id = "myopic";
    StoppingSetDescriptor set{};                 // first_entry
    double stop_time = 0.0;                      // constant_time
    double horizon = 0.0;                        // truncated
    std::shared_ptr<const StoppingRule> inner;   // truncated

    // Decision at (observable state, oriented advantage, time).
    bool stops(std::span<const double> obs, double oriented_y, double time) const {
        switch (kind) {
            case Kind::myopic: return oriented_y <= 0.0;
            case Kind::first_entry: return membership(set, obs);
            case Kind::constant_time: return time >= stop_time;
            case Kind::truncated:
                return time >= horizon || inner->stops(obs, oriented_y, time);
        }
        return false;
    }
};

inline StoppingRule myopic_rule() { return {}; }

inline StoppingRule first_entry_rule(StoppingSetDescriptor set, std::string id = "entry") {
    StoppingRule r;
    r.kind = StoppingRule::Kind::first_entry;
    r.id = std::move(id);
    r.set = std::move(set);
    return r;
}

inline StoppingRule constant_time_rule(double t) {
    StoppingRule r;
    r.kind = StoppingRule::Kind::constant_time;
    r.id = "constant:" + std::to_string(t);
    r.stop_time = t;
    return r;
}

inline StoppingRule truncated_rule(StoppingRule inner, double horizon) {
    StoppingRule r;
    r.kind = StoppingRule::Kind::truncated;
    r.id = "truncated:" + std::to_string(horizon) + ":" + inner.id;
    r.horizon = horizon;
    r.inner = std::make_shared<const StoppingRule>(std::move(inner));
    return r;
}

// ---------------------------------------------------------------------------
// Myopic time and compensator on realized advantage sequences
// ---------------------------------------------------------------------------

// First 1-based index k with y[k] <= 0 (equality stops); capped by the
// horizon when given, kNever when unbounded and never crossing.
inline std::size_t myopic_time(std::span<const double> y_values,
                               std::optional<std::size_t> horizon = std::nullopt) {
    if (y_values.empty()) throw UsageError("myopic_time: empty advantage sequence");
    for (std::size_t i = 0; i < y_values.size(); ++i) {
        const std::size_t k = i + 1;
        if (horizon && k >= *horizon) return *horizon;
        if (y_values[i] <= 0.0) return k;
    }
    return horizon ? *horizon : kNever;
}

// Compensator A with A_1 = 0 and A_n = sum_{k<n} Y_k; output has one more
// entry than the input.
inline std::vector<double> compensator(std::span<const double> y_values) {
    std::vector<double> a;
    a.reserve(y_values.size() + 1);
    a.push_back(0.0);
    CompensatedSum acc;
    for (double y : y_values) {
        acc.add(y);
        a.push_back(acc.value());
    }
    return a;
}

// ---------------------------------------------------------------------------
// Monotone-case scan
// ---------------------------------------------------------------------------

// Sampling-based falsification of the monotone-case property: once the
// oriented advantage turns nonpositive it must stay nonpositive. Absence of
// violations is evidence, not proof.
struct MonotoneReport {
    std::size_t paths_scanned = 0;
    std::size_t violation_count = 0;  // paths with at least one violation
    std::optional<EventPath> witness;
    std::size_t witness_index = 0;  // 1-based position of the first Y > 0 after a crossing

    bool monotone_evidence() const { return violation_count == 0; }
};

inline MonotoneReport monotone_violation_scan(const DiscreteProblem& problem,
                                              std::size_t path_count, std::size_t length,
                                              std::uint64_t seed) {
    if (length < 2) throw UsageError("monotone_violation_scan: length must be >= 2");
    MonotoneReport report;
    report.paths_scanned = path_count;
    for (std::size_t p = 0; p < path_count; ++p) {
        Rng rng(path_seed(seed, p));
        State s = problem.initial(rng);
        bool crossed = false;
        bool violated = false;
        EventPath path;
        for (std::size_t n = 1; n <= length; ++n) {
            const double oy = problem.oriented_y(s, n);
            if (!report.witness) path.push(static_cast<double>(n), s, problem.reward(s, n), oy);
            if (crossed && oy > 0.0 && !violated) {
                violated = true;
                ++report.violation_count;
                if (!report.witness) {
                    report.witness = std::move(path);
                    report.witness_index = n;
                }
            }
            if (oy <= 0.0) crossed = true;
            if (n < length) s = problem.step(s, n, rng);
        }
    }
    return report;
}

// Continuous version; the advantage is sampled at each event time and at
// `interior_samples` points inside every inter-event segment.
inline MonotoneReport monotone_violation_scan(const ContinuousProblem& problem,
                                              std::size_t path_count, std::uint64_t seed,
                                              std::size_t interior_samples = 8) {
    MonotoneReport report;
    report.paths_scanned = path_count;
    for (std::size_t p = 0; p < path_count; ++p) {
        Rng rng(path_seed(seed, p));
        const ContinuousPath path = problem.sample_path(rng);
        bool crossed = false;
        bool violated = false;
        EventPath trace;
        std::size_t sample_no = 0;
        for (std::size_t k = 0; k < path.segments() && !violated; ++k) {
            const double t0 = path.events[k];
            const double t1 = path.events[k + 1];
            for (std::size_t j = 0; j <= interior_samples; ++j) {
                const double t =
                    j == 0 ? t0
                           : t0 + (t1 - t0) * static_cast<double>(j) /
                                      static_cast<double>(interior_samples + 1);
                const State s = path.state(k, t);
                const double oy = problem.oriented_y(s, t);
                ++sample_no;
                if (!report.witness) trace.push(t, s, problem.reward(s, t), oy);
                if (crossed && oy > 0.0) {
                    violated = true;
                    ++report.violation_count;
                    if (!report.witness) {
                        report.witness = std::move(trace);
                        report.witness_index = sample_no;
                    }
                    break;
                }
                if (oy <= 0.0) crossed = true;
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// One-step increment consistency
// ---------------------------------------------------------------------------

// Monte Carlo check of the identity Y_n = E(X_{n+1} | A_n) - X_n at a fixed
// state: the analytic increment must agree with the sampled one-step change
// within four standard errors.
struct IncrementCheck {
    double analytic = 0.0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

inline IncrementCheck increment_consistency_check(const DiscreteProblem& problem,
                                                  const State& state, std::size_t time,
                                                  std::size_t sample_count,
                                                  std::uint64_t seed) {
    if (sample_count < 100)
        throw UsageError("increment_consistency_check: need at least 100 samples");
    IncrementCheck check;
    check.analytic = problem.y_increment(state, time);
    check.samples = sample_count;
    const double x_now = problem.reward(state, time);
    std::vector<double> diffs;
    diffs.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        Rng rng(path_seed(seed, i));
        const State next = problem.step(state, time, rng);
        diffs.push_back(problem.reward(next, time + 1) - x_now);
    }
    const auto ms = mean_and_stderr(diffs);
    check.estimate = ms.mean;
    check.stderr_ = ms.stderr_;
    const double slack = std::max(4.0 * ms.stderr_, 4e-15 * std::max(1.0, std::abs(check.analytic)));
    check.pass = std::abs(check.analytic - check.estimate) <= slack;
    return check;
}

// ---------------------------------------------------------------------------
// Measure-change diagnostic
// ---------------------------------------------------------------------------

// Estimates e_n = E[X_n 1{tau* > n}] for a positive-reward problem. The
// optimality argument behind the multiplicative decomposition needs e_n -> 0;
// the verdict passes when the sequence has dropped (non-strictly) from its
// first value and the last estimate is below epsilon.
struct MeasureChangeReport {
    std::vector<std::size_t> indices;
    std::vector<double> estimates;
    std::vector<double> stderrs;
    double epsilon = 0.01;
    bool pass = false;
};

inline MeasureChangeReport measure_change_diagnostic(const DiscreteProblem& problem,
                                                     std::vector<std::size_t> indices,
                                                     std::size_t path_count,
                                                     std::uint64_t seed,
                                                     double epsilon = 0.01) {
    if (!problem.ratio)
        throw UsageError("measure_change_diagnostic: problem has no multiplicative form");
    if (indices.empty()) throw UsageError("measure_change_diagnostic: no indices");
    MeasureChangeReport report;
    report.indices = indices;
    report.epsilon = epsilon;
    const std::size_t n_max = *std::max_element(indices.begin(), indices.end());

    std::vector<std::vector<double>> samples(indices.size());
    for (auto& v : samples) v.reserve(path_count);
    for (std::size_t p = 0; p < path_count; ++p) {
        Rng rng(path_seed(seed, p));
        State s = problem.initial(rng);
        std::size_t tau = kNever;
        std::vector<double> x_at(indices.size(), 0.0);
        for (std::size_t n = 1; n <= n_max; ++n) {
            const double x = problem.reward(s, n);
            if (x <= 0.0)
                throw UsageError(
                    "measure_change_diagnostic: non-positive reward observed; "
                    "problem is not in multiplicative form");
            if (tau == kNever && problem.oriented_y(s, n) <= 0.0) tau = n;
            for (std::size_t j = 0; j < indices.size(); ++j)
                if (indices[j] == n && (tau == kNever || tau > n)) x_at[j] = x;
            if (tau != kNever && tau <= n) {
                // all remaining indicators are zero
                bool pending = false;
                for (std::size_t j = 0; j < indices.size(); ++j)
                    if (indices[j] > n) pending = true;
                if (!pending) break;
            }
            if (n < n_max) s = problem.step(s, n, rng);
        }
        for (std::size_t j = 0; j < indices.size(); ++j) samples[j].push_back(x_at[j]);
    }
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto ms = mean_and_stderr(samples[j]);
        report.estimates.push_back(ms.mean);
        report.stderrs.push_back(ms.stderr_);
    }
    report.pass = report.estimates.back() <= report.estimates.front() &&
                  report.estimates.back() < epsilon;
    return report;
}

}  // namespace monostop
