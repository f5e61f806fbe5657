#pragma once

// Multidimensional Poisson disorder: m independent counting processes whose
// intensities switch from mu0 to mu1 at hidden exponential change times. The
// observable posterior odds phi^i are piecewise closed form between counts,
// and under prior_rate >= mu1 - mu0 >= 0 each phi^i is increasing, which is
// what makes the aggregate problem monotone. Minimization problem: the
// realized cost counts components not yet changed plus weighted delays, and
// the rule sees only the posteriors.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "monostop/errors.hpp"
#include "monostop/numerics.hpp"
#include "monostop/stopping_core.hpp"

namespace monostop {

struct DisorderParams {
    int dimension = 1;
    std::vector<double> prior_rates;       // lambda^i > 0
    std::vector<double> pre_intensities;   // mu0^i > 0
    std::vector<double> post_intensities;  // mu1^i > 0
    std::vector<double> delay_costs;       // c_i > 0

    void validate() const {
        if (dimension < 1) throw UsageError("disorder: dimension must be >= 1");
        const auto m = static_cast<std::size_t>(dimension);
        if (prior_rates.size() != m || pre_intensities.size() != m ||
            post_intensities.size() != m || delay_costs.size() != m)
            throw UsageError("disorder: need rates, intensities, and costs per coordinate");
        for (std::size_t i = 0; i < m; ++i) {
            if (!(prior_rates[i] > 0.0 && pre_intensities[i] > 0.0 &&
                  post_intensities[i] > 0.0 && delay_costs[i] > 0.0))
                throw UsageError("disorder: rates, intensities, and costs must be > 0");
            if (!(post_intensities[i] - pre_intensities[i] >= 0.0 &&
                  prior_rates[i] >= post_intensities[i] - pre_intensities[i]))
                throw UsageError(
                    "disorder: parameters must satisfy "
                    "prior_rate >= post_intensity - pre_intensity >= 0 per coordinate; "
                    "the explicit half-space solution is restricted to that region");
        }
    }

    double rate_sum() const {
        double b = 0.0;
        for (double l : prior_rates) b += l;
        return b;
    }

    std::vector<double> halfspace_weights() const {
        std::vector<double> w(prior_rates.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = delay_costs[i] + prior_rates[i];
        return w;
    }
};

namespace detail {

// integral of e^{-kappa s} over [a, b], stable for small kappa
inline double exp_segment(double kappa, double a, double b) {
    if (kappa == 0.0) return b - a;
    return std::exp(-kappa * a) * (-std::expm1(-kappa * (b - a))) / kappa;
}

inline double phi_to_pi(double phi) {
    if (!(phi < std::numeric_limits<double>::infinity())) return 1.0;
    return phi > 1.0 ? 1.0 / (1.0 + 1.0 / phi) : phi / (1.0 + phi);
}

}  // namespace detail

// Posterior odds phi_t of one coordinate from its observed count path:
// phi_t = lambda e^{kappa t} beta^{N_t} int_0^t e^{-kappa s} beta^{-N_s} ds
// with kappa = lambda + mu0 - mu1 and beta = mu1/mu0. N is constant between
// jumps, so the integral is a finite sum of closed-form pieces.
inline double disorder_phi(std::span<const double> jump_times, double lambda, double mu0,
                           double mu1, double t) {
    if (!(lambda > 0.0 && mu0 > 0.0 && mu1 > 0.0))
        throw UsageError("disorder_phi: rates must be > 0");
    if (!(mu1 - mu0 >= 0.0 && lambda >= mu1 - mu0))
        throw UsageError(
            "disorder_phi: requires prior_rate >= post_intensity - pre_intensity >= 0");
    if (t < 0.0) throw UsageError("disorder_phi: time must be >= 0");
    double prev = 0.0;
    for (double tj : jump_times) {
        if (tj < prev || tj > t)
            throw UsageError("disorder_phi: jump times must be sorted and lie in [0, t]");
        prev = tj;
    }
    const double kappa = lambda + mu0 - mu1;
    const double log_beta = std::log(mu1 / mu0);
    double integral = 0.0;
    double seg_start = 0.0;
    std::size_t n = 0;
    for (double tj : jump_times) {
        integral += std::exp(-static_cast<double>(n) * log_beta) *
                    detail::exp_segment(kappa, seg_start, tj);
        seg_start = tj;
        ++n;
    }
    integral += std::exp(-static_cast<double>(n) * log_beta) *
                detail::exp_segment(kappa, seg_start, t);
    return lambda * std::exp(kappa * t) *
           std::exp(static_cast<double>(n) * log_beta) * integral;
}

// One-coordinate advantage rate of the delay cost: -lambda + (c+lambda) pi.
inline double disorder_y(double pi, double lambda, double cost) {
    if (!(pi >= 0.0 && pi <= 1.0))
        throw UsageError("disorder_y: posterior probability must lie in [0,1]");
    return -lambda + (cost + lambda) * pi;
}

inline StoppingSetDescriptor disorder_stopping_set(const DisorderParams& params,
                                                   double factor = 1.0) {
    params.validate();
    return HalfspaceSet{params.halfspace_weights(), factor * params.rate_sum(),
                        /*stop_when_geq=*/true, 0.0, 1.0};
}

// Deterministic pathwise lower bound on phi^i: the observation factor
// beta^{N_t - N_s} is >= 1, so phi^i_t >= lambda (e^{kappa t} - 1)/kappa.
// The aggregate advantage therefore crosses 0 no later than the root of
// sum_i w_i pi_lower_i(t) = sum_i lambda_i, which bounds the myopic time for
// every path.
inline double disorder_myopic_time_bound(const DisorderParams& params) {
    params.validate();
    const auto w = params.halfspace_weights();
    auto lower_pressure = [&](double t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double kappa =
                params.prior_rates[i] + params.pre_intensities[i] - params.post_intensities[i];
            const double phi_lower = kappa > 0.0
                                         ? params.prior_rates[i] * std::expm1(kappa * t) / kappa
                                         : params.prior_rates[i] * t;
            acc += w[i] * detail::phi_to_pi(phi_lower);
        }
        return acc;
    };
    return solve_increasing(lower_pressure, params.rate_sum(), 1.0, 1e-9);
}

inline ContinuousProblem make_disorder_problem(const DisorderParams& params,
                                               double t_max_override = 0.0) {
    params.validate();
    const int m = params.dimension;
    const auto w = params.halfspace_weights();
    const double b = params.rate_sum();
    const double t_star = disorder_myopic_time_bound(params);
    const double t_max = t_max_override > 0.0 ? t_max_override : 2.5 * t_star + 5.0;

    ContinuousProblem p;
    p.name = "disorder";
    p.direction = Direction::minimize;
    p.dimension = m;
    p.t_max = t_max;
    // Certificate: the unreached part of the deterministic advantage bound.
    // Nonnegative, decreasing, and exactly 0 once every path's myopic time is
    // below the horizon, where myopic truncation error vanishes.
    p.tail_bound = [params, w, b](double T) {
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double kappa =
                params.prior_rates[i] + params.pre_intensities[i] - params.post_intensities[i];
            const double phi_lower = kappa > 0.0
                                         ? params.prior_rates[i] * std::expm1(kappa * T) / kappa
                                         : params.prior_rates[i] * T;
            acc += w[i] * detail::phi_to_pi(phi_lower);
        }
        return std::max(0.0, b - acc);
    };

    p.sample_path = [params, m, t_max](Rng& rng) {
        struct Coordinate {
            double sigma = 0.0;
            std::vector<double> jumps;
            std::vector<int> n_at;      // count at each merged event
            std::vector<double> i_at;   // integral value at each merged event
        };
        auto coords = std::make_shared<std::vector<Coordinate>>(static_cast<std::size_t>(m));

        std::vector<double> events;
        events.push_back(0.0);
        for (int i = 0; i < m; ++i) {
            auto& c = (*coords)[static_cast<std::size_t>(i)];
            const double lambda = params.prior_rates[static_cast<std::size_t>(i)];
            const double mu0 = params.pre_intensities[static_cast<std::size_t>(i)];
            const double mu1 = params.post_intensities[static_cast<std::size_t>(i)];
            c.sigma = rng.exponential(1.0 / lambda);
            double t = 0.0;
            bool changed = false;
            while (true) {
                const double gap = rng.exponential(changed ? 1.0 / mu1 : 1.0 / mu0);
                double next = t + gap;
                if (!changed && next >= c.sigma) {
                    // memoryless restart at the change point with the new rate
                    t = c.sigma;
                    changed = true;
                    continue;
                }
                if (next > t_max) break;
                c.jumps.push_back(next);
                events.push_back(next);
                t = next;
            }
        }
        std::sort(events.begin(), events.end());
        events.erase(std::unique(events.begin(), events.end()), events.end());
        if (events.back() < t_max) events.push_back(t_max);

        // prefix counts and integrals per coordinate at every merged event
        for (int i = 0; i < m; ++i) {
            auto& c = (*coords)[static_cast<std::size_t>(i)];
            const double lambda = params.prior_rates[static_cast<std::size_t>(i)];
            const double mu0 = params.pre_intensities[static_cast<std::size_t>(i)];
            const double mu1 = params.post_intensities[static_cast<std::size_t>(i)];
            const double kappa = lambda + mu0 - mu1;
            const double log_beta = std::log(mu1 / mu0);
            c.n_at.resize(events.size());
            c.i_at.resize(events.size());
            std::size_t jn = 0;
            double integral = 0.0;
            c.n_at[0] = 0;
            c.i_at[0] = 0.0;
            for (std::size_t k = 1; k < events.size(); ++k) {
                const int n_prev = static_cast<int>(jn);
                integral += std::exp(-n_prev * log_beta) *
                            detail::exp_segment(kappa, events[k - 1], events[k]);
                while (jn < c.jumps.size() && c.jumps[jn] <= events[k]) ++jn;
                c.n_at[k] = static_cast<int>(jn);
                c.i_at[k] = integral;
            }
        }

        ContinuousPath path;
        path.events = events;
        path.state = [coords, params, m, events](std::size_t seg, double t) {
            State s(static_cast<std::size_t>(2 * m));
            for (int i = 0; i < m; ++i) {
                const auto& c = (*coords)[static_cast<std::size_t>(i)];
                const double lambda = params.prior_rates[static_cast<std::size_t>(i)];
                const double mu0 = params.pre_intensities[static_cast<std::size_t>(i)];
                const double mu1 = params.post_intensities[static_cast<std::size_t>(i)];
                const double kappa = lambda + mu0 - mu1;
                const double log_beta = std::log(mu1 / mu0);
                const int n = c.n_at[seg];
                const double integral =
                    c.i_at[seg] +
                    std::exp(-n * log_beta) * detail::exp_segment(kappa, events[seg], t);
                const double phi =
                    lambda * std::exp(kappa * t) * std::exp(n * log_beta) * integral;
                s[static_cast<std::size_t>(i)] = detail::phi_to_pi(phi);
                s[static_cast<std::size_t>(m + i)] = c.sigma;
            }
            return s;
        };
        return path;
    };

    // Realized cost from the hidden change times; rules never see them.
    p.reward = [params, m](const State& s, double t) {
        double cost = 0.0;
        for (int i = 0; i < m; ++i) {
            const double sigma = s[static_cast<std::size_t>(m + i)];
            cost += (sigma >= t ? 1.0 : 0.0) +
                    params.delay_costs[static_cast<std::size_t>(i)] * std::max(t - sigma, 0.0);
        }
        return cost;
    };
    // Mirrors the half-space margin so membership and the advantage sign
    // agree exactly.
    p.y_rate = [w, b, m](const State& s, double) {
        return weighted_sum(w, {s.data(), static_cast<std::size_t>(m)}) - b;
    };
    return p;
}

}  // namespace monostop
