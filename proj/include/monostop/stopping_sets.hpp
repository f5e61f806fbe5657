#pragma once

// Closed-form stopping regions of the shipped problem families, as explicit
// descriptors with exact membership tests and boundary sampling for figure
// export. Margins are evaluated with the same arithmetic as the families'
// one-step advantage, so membership(set, s) <=> aggregate Y(s) <= 0 holds
// exactly, not just up to rounding.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "monostop/closed_forms.hpp"
#include "monostop/distributions.hpp"
#include "monostop/errors.hpp"

namespace monostop {

// {z : sum_i (1-z_i)^2 <= 2c} intersected with [0,1]^m; complement-ball form
// of the all-uniform sum problem. `threshold` is the bound on sum_i f(z_i).
struct BallComplementSet {
    int dimension = 2;
    double threshold = 0.3;
};

// {z : sum_i e^{-z_i} <= c}, all-exponential sum problem.
struct ExpSumSet {
    int dimension = 2;
    double threshold = 1.0;
};

// {z : sum_i f_i(z_i) <= c} with piecewise-linear f_i from discrete offers.
struct PolyhedronSet {
    std::vector<OfferDistribution> offers;  // all discrete
    double threshold = 0.0;
};

// {z : rho^m prod_i g(z_i) <= factor}, all-uniform discounted product problem.
struct ProductUniformSet {
    int dimension = 2;
    double rho = 0.9;
    double factor = 1.0;
};

// {y : lambda prod_i h_i(y_i) <= factor}, burglar product problem.
struct ProductHSet {
    std::vector<GainDistribution> gains;
    std::vector<double> alphas;
    double lambda = 0.25;
    double factor = 1.0;
};

// {z : sum_i w_i z_i >= b} (or <= b), within the coordinate box [lo, hi]^m.
struct HalfspaceSet {
    std::vector<double> weights;
    double threshold = 0.0;
    bool stop_when_geq = true;
    double box_lo = 0.0;
    double box_hi = 1.0;
};

using StoppingSetDescriptor =
    std::variant<BallComplementSet, ExpSumSet, PolyhedronSet, ProductUniformSet,
                 ProductHSet, HalfspaceSet>;

inline int set_dimension(const StoppingSetDescriptor& set) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PolyhedronSet>)
                return static_cast<int>(s.offers.size());
            else if constexpr (std::is_same_v<T, ProductHSet>)
                return static_cast<int>(s.gains.size());
            else if constexpr (std::is_same_v<T, HalfspaceSet>)
                return static_cast<int>(s.weights.size());
            else
                return s.dimension;
        },
        set);
}

inline double weighted_sum(std::span<const double> w, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

namespace detail {
inline const OfferDistribution& uniform_offer() {
    static const OfferDistribution d = OfferDistribution::uniform01();
    return d;
}
inline const OfferDistribution& exponential_offer() {
    static const OfferDistribution d = OfferDistribution::exponential1();
    return d;
}
}  // namespace detail

// Signed margin: <= 0 inside the stopping set (boundary counts as inside).
inline double margin(const StoppingSetDescriptor& set, std::span<const double> point) {
    if (static_cast<int>(point.size()) != set_dimension(set))
        throw UsageError("stopping set: point dimension mismatch");
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BallComplementSet>) {
                double acc = 0.0;
                for (double z : point) acc += house_f(detail::uniform_offer(), z);
                return acc - s.threshold;
            } else if constexpr (std::is_same_v<T, ExpSumSet>) {
                double acc = 0.0;
                for (double z : point) acc += house_f(detail::exponential_offer(), z);
                return acc - s.threshold;
            } else if constexpr (std::is_same_v<T, PolyhedronSet>) {
                double acc = 0.0;
                for (std::size_t i = 0; i < point.size(); ++i)
                    acc += house_f(s.offers[i], point[i]);
                return acc - s.threshold;
            } else if constexpr (std::is_same_v<T, ProductUniformSet>) {
                double prod = 1.0;
                for (double z : point) prod *= house_g(detail::uniform_offer(), z);
                for (int i = 0; i < s.dimension; ++i) prod *= s.rho;
                return prod - s.factor;
            } else if constexpr (std::is_same_v<T, ProductHSet>) {
                double prod = s.lambda;
                for (std::size_t i = 0; i < point.size(); ++i)
                    prod *= burglar_h(s.gains[i], s.alphas[i], point[i]);
                return prod - s.factor;
            } else {  // HalfspaceSet
                const double wx = weighted_sum(s.weights, point);
                return s.stop_when_geq ? s.threshold - wx : wx - s.threshold;
            }
        },
        set);
}

inline bool membership(const StoppingSetDescriptor& set, std::span<const double> point) {
    return margin(set, point) <= 0.0;
}

// ---------------------------------------------------------------------------
// Boundary sampling (m = 2 curves)
// ---------------------------------------------------------------------------

using Point2 = std::array<double, 2>;

namespace detail {

// Exact piecewise-linear inverse of z -> E(Z-z)^+ for a discrete law.
// Returns the z with f(z) = target, clipped to [min support, max support].
inline double discrete_f_inverse(const OfferDistribution& d, double target) {
    const double lo = d.values.front();
    const double hi = d.values.back();
    if (target <= 0.0) return hi;
    if (target >= house_f(d, lo)) return lo;
    // piece between consecutive support points (f linear, slope -B_k there)
    for (std::size_t k = 0; k + 1 < d.values.size(); ++k) {
        const double fk1 = house_f(d, d.values[k + 1]);
        if (target >= fk1) {
            double a = 0.0, b = 0.0;  // f(z) = a - b z on this piece
            for (std::size_t l = k + 1; l < d.values.size(); ++l) {
                a += d.values[l] * d.probs[l];
                b += d.probs[l];
            }
            return (a - target) / b;
        }
    }
    return hi;
}

// Boundary points are generated from defining equalities, so their margin is
// zero only up to rounding. Membership counts the boundary as inside; points
// that land a few ulps outside are nudged along the inward normal, far below
// the 1e-9 equality budget.
inline void snap_inside(const StoppingSetDescriptor& set, Point2& p) {
    if (margin(set, p) <= 0.0) return;
    const double h = 1e-7;
    std::array<double, 2> grad{};
    for (int i = 0; i < 2; ++i) {
        Point2 hi = p, lo = p;
        hi[static_cast<std::size_t>(i)] += h;
        lo[static_cast<std::size_t>(i)] -= h;
        grad[static_cast<std::size_t>(i)] = (margin(set, hi) - margin(set, lo)) / (2.0 * h);
    }
    const double norm = std::hypot(grad[0], grad[1]);
    if (norm == 0.0) return;
    const double scale = 1.0 + std::max(std::abs(p[0]), std::abs(p[1]));
    for (double step = 1e-15 * scale; step <= 1e-10 * scale; step *= 2.0) {
        const Point2 q{p[0] - step * grad[0] / norm, p[1] - step * grad[1] / norm};
        if (margin(set, q) <= 0.0) {
            p = q;
            return;
        }
    }
}

inline double product_h_inverse(const GainDistribution& g, double alpha, double target) {
    // h decreasing from +inf to 1 on (0, inf); requires target > 1.
    double lo = 1e-12, hi = 1.0;
    while (burglar_h(g, alpha, hi) > target) {
        hi *= 2.0;
        if (hi > 1e15) throw NumericError("product_h_inverse: no bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (burglar_h(g, alpha, mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace detail

namespace detail {

inline std::vector<Point2> boundary_points(const StoppingSetDescriptor& set, int resolution) {
    std::vector<Point2> pts;
    const std::size_t n = static_cast<std::size_t>(resolution);

    if (const auto* ball = std::get_if<BallComplementSet>(&set)) {
        const double r2 = 2.0 * ball->threshold;
        if (r2 >= 2.0) return pts;  // covers the whole unit square
        if (r2 <= 0.0) return pts;
        const double r = std::sqrt(r2);
        const double theta0 = r > 1.0 ? std::acos(1.0 / r) : 0.0;
        const double theta1 = 0.5 * M_PI - theta0;
        for (std::size_t j = 0; j < n; ++j) {
            const double t =
                theta0 + (theta1 - theta0) * static_cast<double>(j) / static_cast<double>(n - 1);
            pts.push_back({1.0 - r * std::cos(t), 1.0 - r * std::sin(t)});
        }
        return pts;
    }

    if (const auto* es = std::get_if<ExpSumSet>(&set)) {
        const double c = es->threshold;
        if (c >= 2.0 || c <= 0.0) return pts;
        const double view = std::max(6.0, -std::log(c) + 6.0);
        const double z_hi = c > 1.0 ? -std::log(c - 1.0) : view;
        const double z_lo = c > 1.0 ? 0.0 : -std::log(c - std::exp(-view));
        for (std::size_t j = 0; j < n; ++j) {
            const double z1 =
                z_lo + (z_hi - z_lo) * static_cast<double>(j) / static_cast<double>(n - 1);
            pts.push_back({z1, -std::log(c - std::exp(-z1))});
        }
        return pts;
    }

    if (const auto* ph = std::get_if<PolyhedronSet>(&set)) {
        const auto& d1 = ph->offers[0];
        const auto& d2 = ph->offers[1];
        const double c = ph->threshold;
        const double f2_top = house_f(d2, d2.values.front());
        // z1 range where 0 <= c - f1(z1) <= f2(min support)
        const double z1_lo = detail::discrete_f_inverse(d1, std::min(c, house_f(d1, d1.values.front())));
        const double z1_hi = detail::discrete_f_inverse(d1, std::max(0.0, c - f2_top));
        if (!(z1_lo <= z1_hi)) return pts;
        // vertices: both families of kinks, plus a uniform fill
        std::vector<double> xs;
        for (std::size_t j = 0; j < n; ++j)
            xs.push_back(z1_lo + (z1_hi - z1_lo) * static_cast<double>(j) /
                                     static_cast<double>(n - 1));
        for (double v : d1.values)
            if (v >= z1_lo && v <= z1_hi) xs.push_back(v);
        for (double v2 : d2.values) {
            const double t = c - house_f(d2, v2);
            if (t >= 0.0) {
                const double x = detail::discrete_f_inverse(d1, t);
                if (x >= z1_lo && x <= z1_hi) xs.push_back(x);
            }
        }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        for (double z1 : xs)
            pts.push_back({z1, detail::discrete_f_inverse(d2, c - house_f(d1, z1))});
        return pts;
    }

    if (const auto* pu = std::get_if<ProductUniformSet>(&set)) {
        // prod H(z_i) = T with H(z) = (1+z^2)/z = 2 g(z); H inverse is closed form.
        const double T = pu->factor * (2.0 / pu->rho) * (2.0 / pu->rho);
        if (T < 4.0) return pts;  // set empty: min of the product is 4 at (1,1)
        auto h_inv = [](double y) { return 0.5 * (y - std::sqrt(y * y - 4.0)); };
        const double z_lo = h_inv(0.5 * T);
        for (std::size_t j = 0; j < n; ++j) {
            const double z1 =
                z_lo + (1.0 - z_lo) * static_cast<double>(j) / static_cast<double>(n - 1);
            const double h1 = (1.0 + z1 * z1) / z1;
            pts.push_back({z1, h_inv(T / h1)});
        }
        return pts;
    }

    if (const auto* phs = std::get_if<ProductHSet>(&set)) {
        const double ratio_bound = phs->factor / phs->lambda;
        if (ratio_bound <= 1.0) return pts;  // h >= 1 makes the set unreachable
        const double y1_min =
            detail::product_h_inverse(phs->gains[0], phs->alphas[0], ratio_bound);
        const double y_view = y1_min * 20.0 + 20.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double y1 = y1_min * (1.0 + 1e-9) +
                              (y_view - y1_min) * static_cast<double>(j) /
                                  static_cast<double>(n - 1);
            const double target = ratio_bound / burglar_h(phs->gains[0], phs->alphas[0], y1);
            if (target <= 1.0) continue;
            pts.push_back(
                {y1, detail::product_h_inverse(phs->gains[1], phs->alphas[1], target)});
        }
        return pts;
    }

    const auto& hs = std::get<HalfspaceSet>(set);
    const double w1 = hs.weights[0], w2 = hs.weights[1], b = hs.threshold;
    const double lo = hs.box_lo, hi = hs.box_hi;
    std::vector<Point2> ends;
    auto push_end = [&](double x, double y) {
        if (x < lo - 1e-12 || x > hi + 1e-12 || y < lo - 1e-12 || y > hi + 1e-12) return;
        for (const auto& e : ends)
            if (std::abs(e[0] - x) < 1e-12 && std::abs(e[1] - y) < 1e-12) return;
        ends.push_back({x, y});
    };
    if (w2 != 0.0) {
        push_end(lo, (b - w1 * lo) / w2);
        push_end(hi, (b - w1 * hi) / w2);
    }
    if (w1 != 0.0) {
        push_end((b - w2 * lo) / w1, lo);
        push_end((b - w2 * hi) / w1, hi);
    }
    if (ends.size() < 2) return pts;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) / static_cast<double>(n - 1);
        pts.push_back({ends[0][0] + t * (ends[1][0] - ends[0][0]),
                       ends[0][1] + t * (ends[1][1] - ends[0][1])});
    }
    return pts;
}

}  // namespace detail

// Points on the defining equality of a 2-D stopping set, ordered along the
// curve and clipped to the support. Empty when the set has no boundary inside
// the support (whole support stops, or the set is unreachable).
inline std::vector<Point2> boundary_sample(const StoppingSetDescriptor& set, int resolution) {
    if (set_dimension(set) != 2)
        throw UsageError("boundary_sample: curve export requires dimension 2");
    if (resolution < 8) throw UsageError("boundary_sample: resolution must be >= 8");
    auto pts = detail::boundary_points(set, resolution);
    for (auto& p : pts) detail::snap_inside(set, p);
    return pts;
}

// Reduce an m>2 set to the (z1, z2) slice at fixed remaining coordinates by
// folding their contribution into the threshold.
inline StoppingSetDescriptor reduce_to_slice(const StoppingSetDescriptor& set,
                                             std::span<const double> tail) {
    const int m = set_dimension(set);
    if (static_cast<int>(tail.size()) != m - 2)
        throw UsageError("reduce_to_slice: need m-2 fixed coordinates");
    if (const auto* s = std::get_if<BallComplementSet>(&set)) {
        double used = 0.0;
        for (double z : tail) used += house_f(detail::uniform_offer(), z);
        return BallComplementSet{2, s->threshold - used};
    }
    if (const auto* s = std::get_if<ExpSumSet>(&set)) {
        double used = 0.0;
        for (double z : tail) used += house_f(detail::exponential_offer(), z);
        return ExpSumSet{2, s->threshold - used};
    }
    if (const auto* s = std::get_if<PolyhedronSet>(&set)) {
        double used = 0.0;
        for (std::size_t i = 0; i < tail.size(); ++i) used += house_f(s->offers[2 + i], tail[i]);
        return PolyhedronSet{{s->offers[0], s->offers[1]}, s->threshold - used};
    }
    if (const auto* s = std::get_if<ProductUniformSet>(&set)) {
        double used = 1.0;
        for (double z : tail) used *= s->rho * house_g(detail::uniform_offer(), z);
        ProductUniformSet out{2, s->rho, s->factor / used};
        return out;
    }
    if (const auto* s = std::get_if<ProductHSet>(&set)) {
        double used = 1.0;
        for (std::size_t i = 0; i < tail.size(); ++i)
            used *= burglar_h(s->gains[2 + i], s->alphas[2 + i], tail[i]);
        ProductHSet out{{s->gains[0], s->gains[1]},
                        {s->alphas[0], s->alphas[1]},
                        s->lambda * used,
                        s->factor};
        return out;
    }
    const auto& hs = std::get<HalfspaceSet>(set);
    double used = 0.0;
    for (std::size_t i = 0; i < tail.size(); ++i) used += hs.weights[2 + i] * tail[i];
    return HalfspaceSet{{hs.weights[0], hs.weights[1]},
                        hs.threshold - used,
                        hs.stop_when_geq,
                        hs.box_lo,
                        hs.box_hi};
}

// Axis ranges used for SVG scaling.
inline std::array<std::array<double, 2>, 2> support_box(const StoppingSetDescriptor& set) {
    if (const auto* es = std::get_if<ExpSumSet>(&set)) {
        const double view = std::max(6.0, -std::log(std::max(es->threshold, 1e-12)) + 6.0);
        return {{{0.0, view}, {0.0, view}}};
    }
    if (const auto* ph = std::get_if<PolyhedronSet>(&set)) {
        return {{{ph->offers[0].values.front(), ph->offers[0].values.back()},
                 {ph->offers[1].values.front(), ph->offers[1].values.back()}}};
    }
    if (const auto* phs = std::get_if<ProductHSet>(&set)) {
        const double bound = phs->factor / phs->lambda;
        double view = 40.0;
        if (bound > 1.0)
            view = detail::product_h_inverse(phs->gains[0], phs->alphas[0], bound) * 20.0 + 20.0;
        return {{{0.0, view}, {0.0, view}}};
    }
    if (const auto* hs = std::get_if<HalfspaceSet>(&set)) {
        return {{{hs->box_lo, hs->box_hi}, {hs->box_lo, hs->box_hi}}};
    }
    return {{{0.0, 1.0}, {0.0, 1.0}}};
}

// ---------------------------------------------------------------------------
// Figure export
// ---------------------------------------------------------------------------

inline void write_boundary_csv(const std::string& path, const std::vector<Point2>& pts,
                               const std::string& provenance) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open output file: " + path);
    out << "# " << provenance << "\n";
    out << "x,y\n";
    char buf[80];
    for (const auto& p : pts) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p[0], p[1]);
        out << buf;
    }
}

inline void write_boundary_svg(const std::string& path, const std::vector<Point2>& pts,
                               const std::array<std::array<double, 2>, 2>& box,
                               const std::string& provenance) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open output file: " + path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<!-- " << provenance << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" "
           "width=\"480\" height=\"480\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"white\" "
           "stroke=\"#888\" stroke-width=\"0.002\"/>\n";
    out << "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.004\" points=\"";
    char buf[64];
    const double sx = box[0][1] - box[0][0];
    const double sy = box[1][1] - box[1][0];
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double x = (pts[i][0] - box[0][0]) / (sx > 0 ? sx : 1.0);
        const double y = 1.0 - (pts[i][1] - box[1][0]) / (sy > 0 ? sy : 1.0);
        std::snprintf(buf, sizeof buf, "%s%.6f,%.6f", i ? " " : "", x, y);
        out << buf;
    }
    out << "\"/>\n</svg>\n";
}

}  // namespace monostop
