#pragma once

// Optimal investment with non-increasing cost factors: the log cost processes
// are negative subordinators (nonpositive drift plus negative compound-Poisson
// jumps), so each discounted advantage is a positive common factor times a
// non-increasing process and the aggregate problem is monotone. The myopic
// rule is the first entry of (e^{L^1},...,e^{L^m}) into the half-space
// {sum c_i x_i <= r}.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "monostop/closed_forms.hpp"
#include "monostop/distributions.hpp"
#include "monostop/errors.hpp"
#include "monostop/stopping_core.hpp"

namespace monostop {

struct InvestmentParams {
    int dimension = 1;
    double discount = 0.05;        // r > 0
    std::vector<double> weights;   // y_i > 0
    std::vector<double> drifts;    // a_i <= 0
    std::vector<JumpSpec> jumps;   // per coordinate

    void validate() const {
        if (dimension < 1) throw UsageError("investment: dimension must be >= 1");
        if (!(discount > 0.0)) throw UsageError("investment: discount rate must be > 0");
        const auto m = static_cast<std::size_t>(dimension);
        if (weights.size() != m || drifts.size() != m || jumps.size() != m)
            throw UsageError("investment: need weights, drifts, and jump models per coordinate");
        for (std::size_t i = 0; i < m; ++i) {
            if (!(weights[i] > 0.0)) throw UsageError("investment: weights must be > 0");
            if (!(drifts[i] <= 0.0))
                throw UsageError("investment: drifts must be <= 0 (non-increasing costs)");
        }
    }

    std::vector<double> coefficients() const {
        std::vector<double> c(weights.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = investment_coeff(weights[i], discount, drifts[i], jumps[i]);
        return c;
    }

    double weight_sum() const {
        double s = 0.0;
        for (double y : weights) s += y;
        return s;
    }
};

inline StoppingSetDescriptor investment_stopping_set(const InvestmentParams& params,
                                                     double factor = 1.0) {
    params.validate();
    return HalfspaceSet{params.coefficients(), factor * params.discount,
                        /*stop_when_geq=*/false, 0.0, 1.0};
}

// Truncation-error certificate: |X_t| <= e^{-rT} max(1, sum y_i - 1) for all
// t >= T, since each cost factor stays in (0, 1].
inline double investment_tail_bound(const InvestmentParams& params, double T) {
    return std::exp(-params.discount * T) * std::max(1.0, params.weight_sum() - 1.0);
}

inline double investment_default_tmax(const InvestmentParams& params, double target = 1e-8) {
    return std::log(std::max(1.0, params.weight_sum() - 1.0) / target) / params.discount;
}

inline ContinuousProblem make_investment_problem(const InvestmentParams& params,
                                                 double t_max_override = 0.0) {
    params.validate();
    const int m = params.dimension;
    const auto coeffs = params.coefficients();
    const auto weights = params.weights;
    const double r = params.discount;
    const double t_max =
        t_max_override > 0.0 ? t_max_override : investment_default_tmax(params);

    ContinuousProblem p;
    p.name = "investment";
    p.dimension = m;
    p.t_max = t_max;
    p.tail_bound = [params](double T) { return investment_tail_bound(params, T); };

    p.sample_path = [params, m, t_max](Rng& rng) {
        struct Coordinate {
            std::vector<double> jump_times;
            std::vector<double> drop_at;  // cumulated jump magnitude at merged events
        };
        auto coords = std::make_shared<std::vector<Coordinate>>(static_cast<std::size_t>(m));
        auto magnitudes = std::make_shared<std::vector<std::vector<double>>>(
            static_cast<std::size_t>(m));

        std::vector<double> events;
        events.push_back(0.0);
        for (int i = 0; i < m; ++i) {
            const auto& spec = params.jumps[static_cast<std::size_t>(i)];
            if (!spec.active) continue;
            auto& c = (*coords)[static_cast<std::size_t>(i)];
            double t = 0.0;
            while (true) {
                t += rng.exponential(1.0 / spec.rate);
                if (t > t_max) break;
                c.jump_times.push_back(t);
                (*magnitudes)[static_cast<std::size_t>(i)].push_back(
                    spec.magnitude.sample(rng));
                events.push_back(t);
            }
        }
        std::sort(events.begin(), events.end());
        events.erase(std::unique(events.begin(), events.end()), events.end());
        if (events.back() < t_max) events.push_back(t_max);

        for (int i = 0; i < m; ++i) {
            auto& c = (*coords)[static_cast<std::size_t>(i)];
            c.drop_at.resize(events.size(), 0.0);
            std::size_t jn = 0;
            double total = 0.0;
            for (std::size_t k = 0; k < events.size(); ++k) {
                while (jn < c.jump_times.size() && c.jump_times[jn] <= events[k]) {
                    total += (*magnitudes)[static_cast<std::size_t>(i)][jn];
                    ++jn;
                }
                c.drop_at[k] = total;
            }
        }

        ContinuousPath path;
        path.events = events;
        path.state = [coords, params, m](std::size_t seg, double t) {
            State s(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) {
                const double level = params.drifts[static_cast<std::size_t>(i)] * t -
                                     (*coords)[static_cast<std::size_t>(i)].drop_at[seg];
                s[static_cast<std::size_t>(i)] = std::exp(level);
            }
            return s;
        };
        return path;
    };

    p.reward = [weights, r](const State& s, double t) {
        return std::exp(-r * t) * (1.0 - weighted_sum(weights, s));
    };
    // Positive common factor times the half-space margin: same crossing times.
    p.y_rate = [coeffs, r](const State& s, double t) {
        return std::exp(-r * t) * (weighted_sum(coeffs, s) - r);
    };
    return p;
}

}  // namespace monostop
