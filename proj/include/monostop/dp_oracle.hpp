#pragma once

// Exact finite-horizon backward induction on finitely discretized instances;
// the independent ground truth for myopic-rule optimality at every horizon.
// Chains are stationary sparse transition tables over explicit state vectors;
// rewards may depend on the time index. Desk-scale tool: the value table is
// capped at 10^6 (state x time) entries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "monostop/errors.hpp"
#include "monostop/problems/burglar.hpp"
#include "monostop/problems/house.hpp"
#include "monostop/stopping_core.hpp"

namespace monostop {

inline constexpr std::size_t kChainEntryCap = 1000000;

struct FiniteChain {
    std::vector<State> states;
    int horizon = 1;
    std::vector<double> initial;  // distribution over states at n = 1
    // stationary sparse rows: state -> [(next state, probability)]
    std::vector<std::vector<std::pair<int, double>>> next;
    std::function<double(int, int)> reward;       // (state id, time index n >= 1)
    std::function<double(int, int)> y_increment;  // maximization orientation

    std::size_t size() const { return states.size(); }

    void check_capacity(int L) const {
        if (states.size() * static_cast<std::size_t>(L) > kChainEntryCap)
            throw UsageError("finite chain exceeds the 10^6 state-time entry cap");
    }
};

inline void validate_chain(const FiniteChain& chain) {
    if (chain.states.empty()) throw UsageError("finite chain: no states");
    if (chain.horizon < 1) throw UsageError("finite chain: horizon must be >= 1");
    chain.check_capacity(chain.horizon);
    if (chain.initial.size() != chain.size() || chain.next.size() != chain.size())
        throw UsageError("finite chain: table sizes do not match the state list");
    double init_sum = 0.0;
    for (double p : chain.initial) {
        if (p < 0.0) throw UsageError("finite chain: negative initial probability");
        init_sum += p;
    }
    if (std::abs(init_sum - 1.0) > 1e-12)
        throw UsageError("finite chain: initial distribution must sum to 1");
    for (const auto& row : chain.next) {
        double row_sum = 0.0;
        for (const auto& [to, p] : row) {
            if (p < 0.0) throw UsageError("finite chain: negative transition probability");
            if (to < 0 || static_cast<std::size_t>(to) >= chain.size())
                throw UsageError("finite chain: transition to unknown state");
            row_sum += p;
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw UsageError("finite chain: transition row must sum to 1");
    }
}

struct DPResult {
    int horizon = 1;
    // indexed [n-1][state], n = 1..horizon
    std::vector<std::vector<double>> value;
    std::vector<std::vector<double>> continuation;
    std::vector<std::vector<std::uint8_t>> stop;
    double value_at_initial = 0.0;
};

// Exact Bellman recursion with forced stop at the horizon; ties resolve to
// stop.
inline DPResult dp_solve(const FiniteChain& chain, int horizon = 0) {
    const int L = horizon > 0 ? horizon : chain.horizon;
    chain.check_capacity(L);
    const std::size_t K = chain.size();
    DPResult res;
    res.horizon = L;
    res.value.assign(static_cast<std::size_t>(L), std::vector<double>(K, 0.0));
    res.continuation.assign(static_cast<std::size_t>(L), std::vector<double>(K, 0.0));
    res.stop.assign(static_cast<std::size_t>(L), std::vector<std::uint8_t>(K, 1));
    for (std::size_t s = 0; s < K; ++s) {
        const double x = chain.reward(static_cast<int>(s), L);
        res.value[static_cast<std::size_t>(L - 1)][s] = x;
        res.continuation[static_cast<std::size_t>(L - 1)][s] = x;
    }
    for (int n = L - 1; n >= 1; --n) {
        const auto& ahead = res.value[static_cast<std::size_t>(n)];
        for (std::size_t s = 0; s < K; ++s) {
            CompensatedSum cont;
            for (const auto& [to, p] : chain.next[s])
                cont.add(p * ahead[static_cast<std::size_t>(to)]);
            const double c = cont.value();
            const double x = chain.reward(static_cast<int>(s), n);
            res.continuation[static_cast<std::size_t>(n - 1)][s] = c;
            if (x >= c) {
                res.value[static_cast<std::size_t>(n - 1)][s] = x;
                res.stop[static_cast<std::size_t>(n - 1)][s] = 1;
            } else {
                res.value[static_cast<std::size_t>(n - 1)][s] = c;
                res.stop[static_cast<std::size_t>(n - 1)][s] = 0;
            }
        }
    }
    CompensatedSum v0;
    for (std::size_t s = 0; s < K; ++s) v0.add(chain.initial[s] * res.value[0][s]);
    res.value_at_initial = v0.value();
    return res;
}

namespace detail {

// Exact expected reward of a state/time-decidable stop predicate by forward
// recursion on the occupation measure, with forced stop at the horizon.
inline double forward_policy_value(const FiniteChain& chain, int L,
                                   const std::function<bool(int, int)>& stops) {
    const std::size_t K = chain.size();
    std::vector<double> alive = chain.initial;
    CompensatedSum total;
    for (int n = 1; n <= L; ++n) {
        std::vector<double> carried(K, 0.0);
        for (std::size_t s = 0; s < K; ++s) {
            if (alive[s] == 0.0) continue;
            if (n >= L || stops(static_cast<int>(s), n))
                total.add(alive[s] * chain.reward(static_cast<int>(s), n));
            else
                carried[s] = alive[s];
        }
        if (n >= L) break;
        std::vector<double> next_mass(K, 0.0);
        for (std::size_t s = 0; s < K; ++s) {
            if (carried[s] == 0.0) continue;
            for (const auto& [to, p] : chain.next[s])
                next_mass[static_cast<std::size_t>(to)] += carried[s] * p;
        }
        alive.swap(next_mass);
    }
    return total.value();
}

}  // namespace detail

inline double policy_value(const FiniteChain& chain, const StoppingRule& rule,
                           int horizon = 0) {
    const int L = horizon > 0 ? horizon : chain.horizon;
    chain.check_capacity(L);
    return detail::forward_policy_value(chain, L, [&](int s, int n) {
        const auto& coords = chain.states[static_cast<std::size_t>(s)];
        return rule.stops(coords, chain.y_increment(s, n), static_cast<double>(n));
    });
}

// Evaluate a solved action table (self-consistency route).
inline double policy_value(const FiniteChain& chain, const DPResult& solved) {
    return detail::forward_policy_value(chain, solved.horizon, [&](int s, int n) {
        return solved.stop[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(s)] != 0;
    });
}

// ---------------------------------------------------------------------------
// DP vs myopic agreement
// ---------------------------------------------------------------------------

struct AgreementRecord {
    int horizon = 0;
    double dp_value = 0.0;
    double myopic_value = 0.0;
    double gap = 0.0;  // dp - myopic
    // action-table cells where DP and the myopic decision differ and the
    // continuation is not tied with the immediate reward
    int disagreements = 0;
    double max_disagreement_gap = 0.0;
};

struct AgreementReport {
    bool monotone_certified = false;
    std::string note;
    std::vector<AgreementRecord> records;

    double max_gap() const {
        double g = 0.0;
        for (const auto& r : records) g = std::max(g, std::abs(r.gap));
        return g;
    }
};

// For monotone chains the truncated myopic rule attains the DP value at every
// horizon; the caller certifies monotonicity (from a violation scan), since
// this report does not prove it.
inline AgreementReport agreement_report(const FiniteChain& chain,
                                        const std::vector<int>& horizons,
                                        bool monotone_certified,
                                        double tie_tol = 1e-12) {
    AgreementReport report;
    report.monotone_certified = monotone_certified;
    if (!monotone_certified)
        report.note = "monotone precondition unmet: the myopic value may fall short of DP";
    for (int L : horizons) {
        const DPResult dp = dp_solve(chain, L);
        AgreementRecord rec;
        rec.horizon = L;
        rec.dp_value = dp.value_at_initial;
        rec.myopic_value = policy_value(chain, myopic_rule(), L);
        rec.gap = rec.dp_value - rec.myopic_value;
        for (int n = 1; n < L; ++n) {
            for (std::size_t s = 0; s < chain.size(); ++s) {
                const bool dp_stop =
                    dp.stop[static_cast<std::size_t>(n - 1)][s] != 0;
                const bool myo_stop = chain.y_increment(static_cast<int>(s), n) <= 0.0;
                if (dp_stop == myo_stop) continue;
                const double tie_gap =
                    std::abs(chain.reward(static_cast<int>(s), n) -
                             dp.continuation[static_cast<std::size_t>(n - 1)][s]);
                if (tie_gap <= tie_tol) continue;
                ++rec.disagreements;
                rec.max_disagreement_gap = std::max(rec.max_disagreement_gap, tie_gap);
            }
        }
        report.records.push_back(rec);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Discretization
// ---------------------------------------------------------------------------

namespace detail {

struct CoordinateLaw {
    std::vector<double> values;
    std::vector<double> probs;

    double cdf(double v) const {
        double acc = 0.0;
        for (std::size_t l = 0; l < values.size(); ++l)
            if (values[l] <= v) acc += probs[l];
        return acc;
    }
};

inline CoordinateLaw coordinate_law(const OfferDistribution& d, int grid_resolution) {
    switch (d.kind) {
        case OfferDistribution::Kind::discrete: return {d.values, d.probs};
        case OfferDistribution::Kind::point_mass: return {{d.point}, {1.0}};
        case OfferDistribution::Kind::uniform: {
            // midpoint quantization of U(0,1) to the grid {0, h, ..., 1}
            if (grid_resolution < 2)
                throw UsageError("discretize: uniform offers need a grid resolution >= 2");
            const int G = grid_resolution;
            const double h = 1.0 / static_cast<double>(G - 1);
            CoordinateLaw law;
            for (int k = 0; k < G; ++k) {
                law.values.push_back(static_cast<double>(k) * h);
                law.probs.push_back((k == 0 || k == G - 1) ? 0.5 * h : h);
            }
            return law;
        }
        case OfferDistribution::Kind::exponential:
            throw UsageError("discretize: exponential offers are not finitely discretizable");
    }
    throw UsageError("discretize: unsupported offer distribution");
}

}  // namespace detail

// Exact finite chain of a house-sum instance: native for discrete offers,
// midpoint-quantized for uniform ones. The chain's advantage is the quantized
// problem's own advantage, so DP-vs-myopic comparisons stay self-consistent.
inline FiniteChain discretize(const HouseParams& params, int horizon,
                              int grid_resolution = 21) {
    params.validate(HouseVariant::sum);
    const int m = params.dimension;
    std::vector<detail::CoordinateLaw> laws;
    HouseParams quantized = params;
    quantized.offers.clear();
    for (const auto& d : params.offers) {
        laws.push_back(detail::coordinate_law(d, grid_resolution));
        quantized.offers.push_back(
            laws.back().values.size() == 1
                ? OfferDistribution::point_mass(laws.back().values[0])
                : OfferDistribution::discrete(laws.back().values, laws.back().probs));
    }

    FiniteChain chain;
    chain.horizon = horizon;
    std::size_t count = 1;
    for (const auto& law : laws) count *= law.values.size();
    chain.check_capacity(horizon);
    if (count * static_cast<std::size_t>(horizon) > kChainEntryCap)
        throw UsageError("finite chain exceeds the 10^6 state-time entry cap");

    // states: mixed-radix product of the per-coordinate supports
    std::vector<std::size_t> radix(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) radix[static_cast<std::size_t>(i)] = laws[static_cast<std::size_t>(i)].values.size();
    auto state_of = [&](std::size_t id) {
        State s(static_cast<std::size_t>(m));
        for (int i = m - 1; i >= 0; --i) {
            const auto r = radix[static_cast<std::size_t>(i)];
            s[static_cast<std::size_t>(i)] = laws[static_cast<std::size_t>(i)].values[id % r];
            id /= r;
        }
        return s;
    };
    auto index_in = [](const detail::CoordinateLaw& law, double v) {
        for (std::size_t l = 0; l < law.values.size(); ++l)
            if (law.values[l] == v) return l;
        throw NumericError("discretize: state value not on the grid");
    };
    for (std::size_t id = 0; id < count; ++id) chain.states.push_back(state_of(id));

    chain.initial.assign(count, 0.0);
    for (std::size_t id = 0; id < count; ++id) {
        double p = 1.0;
        std::size_t rem = id;
        for (int i = m - 1; i >= 0; --i) {
            const auto& law = laws[static_cast<std::size_t>(i)];
            p *= law.probs[rem % law.values.size()];
            rem /= law.values.size();
        }
        chain.initial[id] = p;
    }

    chain.next.resize(count);
    for (std::size_t id = 0; id < count; ++id) {
        // per-coordinate move options: stay at the max, or jump to a larger offer
        std::vector<std::vector<std::pair<std::size_t, double>>> options(
            static_cast<std::size_t>(m));
        const State& s = chain.states[id];
        for (int i = 0; i < m; ++i) {
            const auto& law = laws[static_cast<std::size_t>(i)];
            const double here = s[static_cast<std::size_t>(i)];
            auto& opts = options[static_cast<std::size_t>(i)];
            opts.push_back({index_in(law, here), law.cdf(here)});
            for (std::size_t l = 0; l < law.values.size(); ++l)
                if (law.values[l] > here) opts.push_back({l, law.probs[l]});
        }
        std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
        while (true) {
            std::size_t to = 0;
            double p = 1.0;
            for (int i = 0; i < m; ++i) {
                const auto& opt = options[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
                to = to * radix[static_cast<std::size_t>(i)] + opt.first;
                p *= opt.second;
            }
            if (p > 0.0) chain.next[id].push_back({static_cast<int>(to), p});
            int i = m - 1;
            for (; i >= 0; --i) {
                if (++pick[static_cast<std::size_t>(i)] <
                    options[static_cast<std::size_t>(i)].size())
                    break;
                pick[static_cast<std::size_t>(i)] = 0;
            }
            if (i < 0) break;
        }
    }

    const double c_eff = params.effective_cost();
    const StoppingSetDescriptor set1 = house_stopping_set(quantized, HouseVariant::sum, 1.0);
    auto states_copy = chain.states;
    chain.reward = [states_copy, c_eff](int s, int n) {
        double total = 0.0;
        for (double v : states_copy[static_cast<std::size_t>(s)]) total += v;
        return total - c_eff * static_cast<double>(n);
    };
    chain.y_increment = [states_copy, set1](int s, int) {
        return margin(set1, states_copy[static_cast<std::size_t>(s)]);
    };
    validate_chain(chain);
    return chain;
}

// Finite chain of a burglar sum instance with finite-support gains, states
// enumerated breadth-first to the horizon. Caught gangs collapse to a frozen
// 0 pile. Supplied for DP-vs-myopic comparisons on the known non-monotone
// family; not part of `discretize`'s supported set.
inline FiniteChain make_burglar_sum_chain(const BurglarParams& params, int horizon) {
    params.validate();
    if (params.shared_delta)
        throw UsageError("burglar chain: shared catches reduce to one dimension; "
                         "build the one-dimensional chain instead");
    const int m = params.dimension;
    std::vector<detail::CoordinateLaw> laws;
    for (const auto& g : params.gains) {
        if (g.kind == GainDistribution::Kind::exponential)
            throw UsageError("burglar chain: gains must have finite support");
        if (g.kind == GainDistribution::Kind::point_mass)
            laws.push_back({{g.mean_param}, {1.0}});
        else
            laws.push_back({g.values, g.probs});
    }

    FiniteChain chain;
    chain.horizon = horizon;
    std::map<State, int> ids;
    std::vector<State> frontier;

    auto intern = [&](const State& s) {
        auto [it, inserted] = ids.try_emplace(s, static_cast<int>(chain.states.size()));
        if (inserted) chain.states.push_back(s);
        return it->second;
    };

    // per-gang branches from one state: (next S, next alive, probability)
    auto gang_branches = [&](double pile, double alive, int i) {
        std::vector<std::array<double, 3>> out;
        if (alive == 0.0) {
            out.push_back({0.0, 0.0, 1.0});
            return out;
        }
        const double p = params.survival[static_cast<std::size_t>(i)];
        out.push_back({0.0, 0.0, 1.0 - p});
        const auto& law = laws[static_cast<std::size_t>(i)];
        for (std::size_t l = 0; l < law.values.size(); ++l)
            out.push_back({pile + law.values[l], 1.0, p * law.probs[l]});
        return out;
    };

    auto expand = [&](const State& from,
                      const std::function<void(const State&, double)>& emit) {
        std::vector<std::vector<std::array<double, 3>>> branches;
        for (int i = 0; i < m; ++i)
            branches.push_back(gang_branches(from.empty() ? 0.0 : from[static_cast<std::size_t>(i)],
                                             from.empty() ? 1.0 : from[static_cast<std::size_t>(m + i)], i));
        std::vector<std::size_t> pick(static_cast<std::size_t>(m), 0);
        while (true) {
            State to(static_cast<std::size_t>(2 * m));
            double p = 1.0;
            for (int i = 0; i < m; ++i) {
                const auto& br = branches[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
                to[static_cast<std::size_t>(i)] = br[0];
                to[static_cast<std::size_t>(m + i)] = br[1];
                p *= br[2];
            }
            if (p > 0.0) emit(to, p);
            int i = m - 1;
            for (; i >= 0; --i) {
                if (++pick[static_cast<std::size_t>(i)] < branches[static_cast<std::size_t>(i)].size()) break;
                pick[static_cast<std::size_t>(i)] = 0;
            }
            if (i < 0) break;
        }
    };

    // initial distribution = one expansion from the pre-start state
    std::map<int, double> init_mass;
    expand(State{}, [&](const State& to, double p) {
        const int id = intern(to);
        init_mass[id] += p;
        frontier.push_back(to);
    });

    for (int depth = 1; depth < horizon; ++depth) {
        std::vector<State> next_frontier;
        for (const auto& from : frontier) {
            const int from_id = ids.at(from);
            if (static_cast<std::size_t>(from_id) < chain.next.size() &&
                !chain.next[static_cast<std::size_t>(from_id)].empty())
                continue;  // already expanded (states can recur across depths)
            if (chain.next.size() < chain.states.size()) chain.next.resize(chain.states.size());
            std::map<int, double> row;
            expand(from, [&](const State& to, double p) {
                const bool fresh = ids.find(to) == ids.end();
                const int id = intern(to);
                row[id] += p;
                if (fresh) next_frontier.push_back(to);
            });
            chain.next.resize(chain.states.size());
            for (const auto& [to, p] : row)
                chain.next[static_cast<std::size_t>(from_id)].push_back({to, p});
        }
        frontier.swap(next_frontier);
        chain.check_capacity(horizon);
    }
    chain.next.resize(chain.states.size());
    for (std::size_t s = 0; s < chain.states.size(); ++s)
        if (chain.next[s].empty()) chain.next[s].push_back({static_cast<int>(s), 1.0});

    chain.initial.assign(chain.states.size(), 0.0);
    for (const auto& [id, p] : init_mass) chain.initial[static_cast<std::size_t>(id)] = p;

    std::vector<double> means;
    for (const auto& g : params.gains) means.push_back(g.mean());
    auto states_copy = chain.states;
    const auto survival = params.survival;
    chain.reward = [states_copy, m](int s, int) {
        const State& st = states_copy[static_cast<std::size_t>(s)];
        double total = 0.0;
        for (int i = 0; i < m; ++i)
            total += st[static_cast<std::size_t>(m + i)] * st[static_cast<std::size_t>(i)];
        return total;
    };
    chain.y_increment = [states_copy, survival, means, m](int s, int) {
        const State& st = states_copy[static_cast<std::size_t>(s)];
        double total = 0.0;
        for (int i = 0; i < m; ++i)
            total += burglar_y(st[static_cast<std::size_t>(i)],
                               st[static_cast<std::size_t>(m + i)] != 0.0,
                               survival[static_cast<std::size_t>(i)],
                               means[static_cast<std::size_t>(i)]);
        return total;
    };
    validate_chain(chain);
    return chain;
}

}  // namespace monostop
