#pragma once

// Multidimensional house selling: m independent offer streams, per-coordinate
// running maxima S^i. The sum variant pays sum_i S^i - c n (one observation
// cost per period by default); the product variant pays rho^{nm} prod_i S^i.
// Both are monotone-case problems; the myopic rule is the first entry of S
// into a closed-form region.

#include <cmath>
#include <string>
#include <vector>

#include "monostop/closed_forms.hpp"
#include "monostop/distributions.hpp"
#include "monostop/errors.hpp"
#include "monostop/stopping_core.hpp"

namespace monostop {

enum class HouseVariant { sum, product };

struct HouseParams {
    int dimension = 1;
    std::vector<OfferDistribution> offers;  // one per coordinate
    double cost = 0.1;                      // sum variant
    double discount = 0.9;                  // product variant, in (0,1)
    // Charge the observation cost once per coordinate and period instead of
    // once per period.
    bool per_coordinate_cost = false;

    void validate(HouseVariant variant) const {
        if (dimension < 1) throw UsageError("house: dimension must be >= 1");
        if (offers.size() != static_cast<std::size_t>(dimension))
            throw UsageError("house: need one offer distribution per coordinate");
        for (const auto& d : offers) d.validate();
        if (variant == HouseVariant::sum && !(cost > 0.0))
            throw UsageError("house sum: cost must be > 0");
        if (variant == HouseVariant::product) {
            if (!(discount > 0.0 && discount < 1.0))
                throw UsageError("house product: discount must lie in (0,1)");
            for (const auto& d : offers)
                if (!d.positive_support())
                    throw UsageError("house product: offers must be strictly positive");
        }
    }

    double effective_cost() const {
        return per_coordinate_cost ? static_cast<double>(dimension) * cost : cost;
    }

    bool homogeneous(OfferDistribution::Kind kind) const {
        for (const auto& d : offers)
            if (d.kind != kind) return false;
        return true;
    }
};

// Whether the family has one of the named closed-form stopping sets.
inline bool house_has_named_set(const HouseParams& params, HouseVariant variant) {
    if (variant == HouseVariant::product)
        return params.homogeneous(OfferDistribution::Kind::uniform);
    if (params.homogeneous(OfferDistribution::Kind::uniform) ||
        params.homogeneous(OfferDistribution::Kind::exponential))
        return true;
    for (const auto& d : params.offers)
        if (d.kind != OfferDistribution::Kind::discrete &&
            d.kind != OfferDistribution::Kind::point_mass)
            return false;
    return true;
}

// Stopping-set descriptor of the myopic rule, with a perturbation factor:
// the factor scales the ball radius for uniform offers and the threshold for
// the other variants (factor 1 is the myopic set itself).
inline StoppingSetDescriptor house_stopping_set(const HouseParams& params, HouseVariant variant,
                                                double factor = 1.0) {
    params.validate(variant);
    if (variant == HouseVariant::product) {
        if (!params.homogeneous(OfferDistribution::Kind::uniform))
            throw UsageError("house product: stopping set shipped for uniform offers only");
        return ProductUniformSet{params.dimension, params.discount, factor};
    }
    const double c = params.effective_cost();
    if (params.homogeneous(OfferDistribution::Kind::uniform))
        return BallComplementSet{params.dimension, c * factor * factor};
    if (params.homogeneous(OfferDistribution::Kind::exponential))
        return ExpSumSet{params.dimension, c * factor};
    // discrete and point-mass offers make sum_i f_i piecewise linear
    std::vector<OfferDistribution> discs;
    for (const auto& d : params.offers) {
        if (d.kind == OfferDistribution::Kind::discrete)
            discs.push_back(d);
        else if (d.kind == OfferDistribution::Kind::point_mass)
            discs.push_back(OfferDistribution::discrete({d.point}, {1.0}));
        else
            throw UsageError("house sum: mixed offer kinds have no named stopping set");
    }
    return PolyhedronSet{std::move(discs), c * factor};
}

inline DiscreteProblem make_house_problem(const HouseParams& params, HouseVariant variant) {
    params.validate(variant);
    const int m = params.dimension;
    const auto offers = params.offers;
    const double c_eff = params.effective_cost();
    const double rho = params.discount;
    const bool named = house_has_named_set(params, variant);

    DiscreteProblem p;
    p.name = variant == HouseVariant::sum ? "house-sum" : "house-product";
    p.dimension = m;
    p.initial = [offers, m](Rng& rng) {
        State s(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) s[static_cast<std::size_t>(i)] = offers[i].sample(rng);
        return s;
    };
    p.step = [offers, m](const State& s, std::size_t, Rng& rng) {
        State next = s;
        for (int i = 0; i < m; ++i) {
            const double z = offers[i].sample(rng);
            auto& v = next[static_cast<std::size_t>(i)];
            if (z > v) v = z;
        }
        return next;
    };

    // The advantage shares its arithmetic with the named set's margin, so
    // first entry and the myopic time coincide index by index.
    std::function<double(const State&)> margin_fn;
    if (named) {
        margin_fn = [set1 = house_stopping_set(params, variant, 1.0)](const State& s) {
            return margin(set1, s);
        };
    } else if (variant == HouseVariant::sum) {
        margin_fn = [offers, m, c_eff](const State& s) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i) acc += house_f(offers[i], s[static_cast<std::size_t>(i)]);
            return acc - c_eff;
        };
    } else {
        margin_fn = [offers, m, rho](const State& s) {
            double prod = 1.0;
            for (int i = 0; i < m; ++i) prod *= house_g(offers[i], s[static_cast<std::size_t>(i)]);
            for (int i = 0; i < m; ++i) prod *= rho;
            return prod - 1.0;
        };
    }

    if (variant == HouseVariant::sum) {
        p.reward = [c_eff](const State& s, std::size_t n) {
            double total = 0.0;
            for (double v : s) total += v;
            return total - c_eff * static_cast<double>(n);
        };
        p.y_increment = [margin_fn](const State& s, std::size_t) { return margin_fn(s); };
    } else {
        const int mm = m;
        p.reward = [rho, mm](const State& s, std::size_t n) {
            double prod = 1.0;
            for (double v : s) prod *= v;
            return std::pow(rho, static_cast<double>(mm) * static_cast<double>(n)) * prod;
        };
        p.ratio = [margin_fn](const State& s, std::size_t) { return margin_fn(s) + 1.0; };
        p.y_increment = [margin_fn, reward = p.reward](const State& s, std::size_t n) {
            return reward(s, n) * margin_fn(s);
        };
    }
    return p;
}

}  // namespace monostop
