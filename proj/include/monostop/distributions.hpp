#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "monostop/errors.hpp"
#include "monostop/rng.hpp"

namespace monostop {

// Offer distribution for the house-selling families.
struct OfferDistribution {
    enum class Kind { uniform, exponential, discrete, point_mass };

    Kind kind = Kind::uniform;
    std::vector<double> values;  // discrete: support, strictly increasing
    std::vector<double> probs;   // discrete: probabilities, positive, sum 1
    double point = 1.0;          // point_mass

    static OfferDistribution uniform01() { return {}; }

    static OfferDistribution exponential1() {
        OfferDistribution d;
        d.kind = Kind::exponential;
        return d;
    }

    static OfferDistribution discrete(std::vector<double> v, std::vector<double> p) {
        OfferDistribution d;
        d.kind = Kind::discrete;
        d.values = std::move(v);
        d.probs = std::move(p);
        d.validate();
        return d;
    }

    static OfferDistribution point_mass(double v) {
        OfferDistribution d;
        d.kind = Kind::point_mass;
        d.point = v;
        return d;
    }

    void validate() const {
        if (kind != Kind::discrete) return;
        if (values.empty() || values.size() != probs.size())
            throw UsageError("discrete offer distribution: values/probs size mismatch");
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i + 1 < values.size() && !(values[i] < values[i + 1]))
                throw UsageError("discrete offer distribution: values must be strictly increasing");
            if (!(probs[i] > 0.0 && probs[i] < 1.0 + 1e-12))
                throw UsageError("discrete offer distribution: probabilities must lie in (0,1]");
            total += probs[i];
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw UsageError("discrete offer distribution: probabilities must sum to 1");
    }

    double mean() const {
        switch (kind) {
            case Kind::uniform: return 0.5;
            case Kind::exponential: return 1.0;
            case Kind::point_mass: return point;
            case Kind::discrete: {
                double m = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
                return m;
            }
        }
        return 0.0;
    }

    double min_support() const {
        switch (kind) {
            case Kind::uniform: return 0.0;
            case Kind::exponential: return 0.0;
            case Kind::point_mass: return point;
            case Kind::discrete: return values.front();
        }
        return 0.0;
    }

    double max_support() const {
        switch (kind) {
            case Kind::uniform: return 1.0;
            case Kind::exponential: return std::numeric_limits<double>::infinity();
            case Kind::point_mass: return point;
            case Kind::discrete: return values.back();
        }
        return 0.0;
    }

    // Strictly positive support (required by the product-form problems).
    bool positive_support() const {
        switch (kind) {
            case Kind::uniform: return true;  // P(Z = 0) = 0
            case Kind::exponential: return true;
            case Kind::point_mass: return point > 0.0;
            case Kind::discrete: return values.front() > 0.0;
        }
        return false;
    }

    double sample(Rng& rng) const {
        switch (kind) {
            case Kind::uniform: return rng.uniform01();
            case Kind::exponential: return rng.exponential(1.0);
            case Kind::point_mass: return point;
            case Kind::discrete: {
                const double u = rng.uniform01();
                double cum = 0.0;
                for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                    cum += probs[i];
                    if (u <= cum) return values[i];
                }
                return values.back();
            }
        }
        return 0.0;
    }
};

// Nonnegative gain distribution for the burglar families.
struct GainDistribution {
    enum class Kind { exponential, point_mass, discrete };

    Kind kind = Kind::exponential;
    double mean_param = 1.0;     // exponential mean / point-mass value
    std::vector<double> values;  // discrete
    std::vector<double> probs;

    static GainDistribution exponential(double mean) {
        if (!(mean > 0.0)) throw UsageError("gain distribution: exponential mean must be > 0");
        GainDistribution d;
        d.kind = Kind::exponential;
        d.mean_param = mean;
        return d;
    }

    static GainDistribution point_mass(double v) {
        if (!(v >= 0.0)) throw UsageError("gain distribution: gains must be nonnegative");
        GainDistribution d;
        d.kind = Kind::point_mass;
        d.mean_param = v;
        return d;
    }

    static GainDistribution discrete(std::vector<double> v, std::vector<double> p) {
        GainDistribution d;
        d.kind = Kind::discrete;
        d.values = std::move(v);
        d.probs = std::move(p);
        if (d.values.empty() || d.values.size() != d.probs.size())
            throw UsageError("gain distribution: values/probs size mismatch");
        double total = 0.0;
        for (std::size_t i = 0; i < d.values.size(); ++i) {
            if (d.values[i] < 0.0) throw UsageError("gain distribution: gains must be nonnegative");
            total += d.probs[i];
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw UsageError("gain distribution: probabilities must sum to 1");
        return d;
    }

    double mean() const {
        if (kind == Kind::discrete) {
            double m = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
            return m;
        }
        return mean_param;
    }

    double sample(Rng& rng) const {
        switch (kind) {
            case Kind::exponential: return rng.exponential(mean_param);
            case Kind::point_mass: return mean_param;
            case Kind::discrete: {
                const double u = rng.uniform01();
                double cum = 0.0;
                for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                    cum += probs[i];
                    if (u <= cum) return values[i];
                }
                return values.back();
            }
        }
        return 0.0;
    }
};

// Magnitude law of the (negative) jumps of an investment cost process.
// The jump itself is -magnitude with magnitude > 0.
struct JumpMagnitude {
    enum class Kind { point_mass, exponential };

    Kind kind = Kind::point_mass;
    double value = 1.0;  // point-mass magnitude / exponential mean

    static JumpMagnitude point_mass(double magnitude) {
        if (!(magnitude > 0.0))
            throw UsageError("jump model: magnitudes must be positive (jumps negative)");
        return {Kind::point_mass, magnitude};
    }

    static JumpMagnitude exponential(double mean) {
        if (!(mean > 0.0))
            throw UsageError("jump model: magnitudes must be positive (jumps negative)");
        return {Kind::exponential, mean};
    }

    // E e^{z} for the jump z = -magnitude.
    double mean_exp_jump() const {
        switch (kind) {
            case Kind::point_mass: return std::exp(-value);
            case Kind::exponential: return 1.0 / (1.0 + value);
        }
        return 1.0;
    }

    double sample(Rng& rng) const {
        return kind == Kind::point_mass ? value : rng.exponential(value);
    }
};

// Per-coordinate jump model for the investment problem.
struct JumpSpec {
    bool active = false;          // none if false
    double rate = 0.0;            // compound-Poisson intensity
    JumpMagnitude magnitude{};

    static JumpSpec none() { return {}; }

    static JumpSpec compound_poisson(double rate, JumpMagnitude mag) {
        if (!(rate > 0.0)) throw UsageError("jump model: rate must be > 0");
        JumpSpec s;
        s.active = true;
        s.rate = rate;
        s.magnitude = mag;
        return s;
    }
};

}  // namespace monostop
