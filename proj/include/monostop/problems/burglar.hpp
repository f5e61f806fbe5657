#pragma once

// Multidimensional burglar problem: m gangs accumulate nonnegative gains and
// are wiped out when caught. Each gang alone is a monotone-case problem; the
// sum over independent gangs is not (a rich gang's catch can flip the
// aggregate advantage back positive), while the product with geometric
// exponents is, with first entry of the gain random walk into
// {prod_i h_i(y_i) <= 1/lambda}.

#include <cmath>
#include <string>
#include <vector>

#include "monostop/closed_forms.hpp"
#include "monostop/distributions.hpp"
#include "monostop/errors.hpp"
#include "monostop/stopping_core.hpp"

namespace monostop {

struct BurglarParams {
    int dimension = 1;
    std::vector<double> survival;           // p^i in (0,1), per gang
    std::vector<GainDistribution> gains;    // nonnegative, one per gang
    bool shared_delta = false;              // one catch draw wipes every gang
    std::vector<double> alphas;             // product exponents, default all 1

    double lambda() const {
        double l = 1.0;
        for (double p : survival) l *= p;
        return l;
    }

    void validate() const {
        if (dimension < 1) throw UsageError("burglar: dimension must be >= 1");
        if (survival.size() != static_cast<std::size_t>(dimension) ||
            gains.size() != static_cast<std::size_t>(dimension))
            throw UsageError("burglar: need survival and gains per gang");
        for (double p : survival)
            if (!(p > 0.0 && p < 1.0))
                throw UsageError("burglar: survival probabilities must lie in (0,1)");
        if (shared_delta)
            for (double p : survival)
                if (p != survival.front())
                    throw UsageError("burglar: shared catches need identical survival");
        if (!alphas.empty()) {
            if (alphas.size() != static_cast<std::size_t>(dimension))
                throw UsageError("burglar: need one exponent per gang");
            for (double a : alphas)
                if (!(a > 0.0)) throw UsageError("burglar: exponents must be > 0");
        }
    }

    std::vector<double> exponents() const {
        return alphas.empty() ? std::vector<double>(static_cast<std::size_t>(dimension), 1.0)
                              : alphas;
    }
};

// Per-gang one-step advantage: S(p-1) + a p while alive, 0 once caught.
inline double burglar_y(double accumulated, bool alive, double p, double a) {
    if (!(accumulated >= 0.0)) throw UsageError("burglar_y: accumulated gain must be >= 0");
    return alive ? accumulated * (p - 1.0) + a * p : 0.0;
}

namespace detail {

// State layout: [S_1..S_m, alive_1..alive_m].
inline void burglar_step_into(State& s, const BurglarParams& params, Rng& rng) {
    const int m = params.dimension;
    if (params.shared_delta) {
        const double d = rng.bernoulli(params.survival[0]) ? 1.0 : 0.0;
        for (int i = 0; i < m; ++i) {
            s[static_cast<std::size_t>(m + i)] *= d;
            s[static_cast<std::size_t>(i)] += params.gains[static_cast<std::size_t>(i)].sample(rng);
        }
    } else {
        for (int i = 0; i < m; ++i) {
            const double d = rng.bernoulli(params.survival[static_cast<std::size_t>(i)]) ? 1.0 : 0.0;
            s[static_cast<std::size_t>(m + i)] *= d;
            s[static_cast<std::size_t>(i)] += params.gains[static_cast<std::size_t>(i)].sample(rng);
        }
    }
}

}  // namespace detail

inline DiscreteProblem make_burglar_sum_problem(const BurglarParams& params) {
    params.validate();
    const int m = params.dimension;
    std::vector<double> means;
    for (const auto& g : params.gains) means.push_back(g.mean());

    DiscreteProblem p;
    p.name = "burglar-sum";
    p.dimension = m;
    p.initial = [params, m](Rng& rng) {
        State s(static_cast<std::size_t>(2 * m), 0.0);
        for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(m + i)] = 1.0;
        detail::burglar_step_into(s, params, rng);
        return s;
    };
    p.step = [params](const State& s, std::size_t, Rng& rng) {
        State next = s;
        detail::burglar_step_into(next, params, rng);
        return next;
    };
    p.reward = [m](const State& s, std::size_t) {
        double total = 0.0;
        for (int i = 0; i < m; ++i)
            total += s[static_cast<std::size_t>(m + i)] * s[static_cast<std::size_t>(i)];
        return total;
    };
    p.y_increment = [params, means, m](const State& s, std::size_t) {
        double total = 0.0;
        for (int i = 0; i < m; ++i)
            total += burglar_y(s[static_cast<std::size_t>(i)],
                               s[static_cast<std::size_t>(m + i)] != 0.0,
                               params.survival[static_cast<std::size_t>(i)],
                               means[static_cast<std::size_t>(i)]);
        return total;
    };
    p.absorbed = [m](const State& s) {
        for (int i = 0; i < m; ++i)
            if (s[static_cast<std::size_t>(m + i)] != 0.0) return false;
        return true;
    };
    p.terminal_value = std::nullopt;
    return p;
}

inline StoppingSetDescriptor burglar_product_set(const BurglarParams& params,
                                                 double factor = 1.0) {
    params.validate();
    return ProductHSet{params.gains, params.exponents(), params.lambda(), factor};
}

inline DiscreteProblem make_burglar_product_problem(const BurglarParams& params) {
    params.validate();
    for (const auto& g : params.gains) {
        const bool positive = (g.kind == GainDistribution::Kind::exponential) ||
                              (g.kind == GainDistribution::Kind::point_mass && g.mean_param > 0.0) ||
                              (g.kind == GainDistribution::Kind::discrete && g.values.front() > 0.0);
        if (!positive)
            throw UsageError("burglar product: gains must be strictly positive");
    }
    const int m = params.dimension;
    const auto alphas = params.exponents();
    const StoppingSetDescriptor set1 = burglar_product_set(params, 1.0);

    DiscreteProblem p;
    p.name = "burglar-product";
    p.dimension = m;
    p.initial = [params, m](Rng& rng) {
        State s(static_cast<std::size_t>(2 * m), 0.0);
        for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(m + i)] = 1.0;
        detail::burglar_step_into(s, params, rng);
        return s;
    };
    p.step = [params](const State& s, std::size_t, Rng& rng) {
        State next = s;
        detail::burglar_step_into(next, params, rng);
        return next;
    };
    auto all_alive = [m](const State& s) {
        for (int i = 0; i < m; ++i)
            if (s[static_cast<std::size_t>(m + i)] == 0.0) return false;
        return true;
    };
    p.reward = [m, alphas, all_alive](const State& s, std::size_t) {
        if (!all_alive(s)) return 0.0;
        double prod = 1.0;
        for (int i = 0; i < m; ++i)
            prod *= std::pow(s[static_cast<std::size_t>(i)], alphas[static_cast<std::size_t>(i)]);
        return prod;
    };
    // Caught is absorbing: the reward is 0 from then on, the one-step ratio
    // drops to 0, and every rule stops.
    p.ratio = [set1, all_alive, m](const State& s, std::size_t) {
        if (!all_alive(s)) return 0.0;
        return margin(set1, {s.data(), static_cast<std::size_t>(m)}) + 1.0;
    };
    p.y_increment = [set1, all_alive, m, reward = p.reward](const State& s, std::size_t n) {
        if (!all_alive(s)) return 0.0;
        return reward(s, n) * margin(set1, {s.data(), static_cast<std::size_t>(m)});
    };
    p.absorbed = [all_alive](const State& s) { return !all_alive(s); };
    p.terminal_value = std::nullopt;
    return p;
}

// ---------------------------------------------------------------------------
// Deterministic non-monotonicity witness for the multi-gang sum
// ---------------------------------------------------------------------------

// Evaluates the aggregate advantage on the forced two-gang path: both gangs
// alive after the first round, then the second gang is caught while the first
// survives. With a small surviving pile and a large confiscated one the
// aggregate advantage flips back positive.
struct BurglarWitness {
    bool found = false;
    double y_before = 0.0;        // aggregate advantage at index 1
    double y_after = 0.0;         // aggregate advantage at index 2
    std::size_t violation_index = 0;
    std::string note;
    EventPath path;
};

inline BurglarWitness burglar_sum_witness(double p, double mean_gain,
                                          std::array<double, 2> gang1_gains,
                                          double gang2_gain, bool shared_delta = false,
                                          int gangs = 2) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("burglar_sum_witness: p must lie in (0,1)");
    BurglarWitness w;
    if (gangs < 2) {
        w.note = "single gang: each coordinate alone is monotone, no witness";
        return w;
    }
    if (shared_delta) {
        w.note = "shared catches collapse the sum to one dimension, no witness";
        return w;
    }
    const double a = mean_gain;
    const double s1_1 = gang1_gains[0];
    const double s2_1 = gang2_gain;
    w.y_before = burglar_y(s1_1, true, p, a) + burglar_y(s2_1, true, p, a);
    const double s1_2 = gang1_gains[0] + gang1_gains[1];
    w.y_after = burglar_y(s1_2, true, p, a) + burglar_y(s2_1, false, p, a);
    w.path.push(1.0, State{s1_1, s2_1, 1.0, 1.0}, s1_1 + s2_1, w.y_before);
    w.path.push(2.0, State{s1_2, s2_1, 1.0, 0.0}, s1_2, w.y_after);
    if (w.y_before <= 0.0 && w.y_after > 0.0) {
        w.found = true;
        w.violation_index = 2;
    } else {
        w.note = "supplied gains do not flip the aggregate advantage, no witness";
    }
    return w;
}

}  // namespace monostop
