#pragma once

// Closed-form ingredient functions of the shipped problem families:
// one-step offer gain f, offer ratio g, burglar gain ratio h, and the
// investment drift coefficient. Where no closed form exists the value is
// computed by adaptive quadrature to 1e-10 absolute tolerance.

#include <cmath>

#include "monostop/distributions.hpp"
#include "monostop/errors.hpp"
#include "monostop/numerics.hpp"

namespace monostop {

inline constexpr double kQuadratureTol = 1e-11;

// f(z) = E (Z - z)^+ for an offer Z.
inline double house_f(const OfferDistribution& dist, double z) {
    switch (dist.kind) {
        case OfferDistribution::Kind::uniform: {
            if (z >= 1.0) return 0.0;
            if (z <= 0.0) return 0.5 - z;
            const double d = 1.0 - z;
            return 0.5 * d * d;
        }
        case OfferDistribution::Kind::exponential:
            return z >= 0.0 ? std::exp(-z) : 1.0 - z;
        case OfferDistribution::Kind::point_mass:
            return dist.point > z ? dist.point - z : 0.0;
        case OfferDistribution::Kind::discrete: {
            double s = 0.0;
            for (std::size_t l = 0; l < dist.values.size(); ++l)
                if (dist.values[l] > z) s += (dist.values[l] - z) * dist.probs[l];
            return s;
        }
    }
    throw UsageError("house_f: unsupported offer distribution");
}

// g(z) = E max(1, Z/z) for an offer Z, z > 0. Uniform offers have the closed
// form (1+z^2)/(2z) on (0,1]; discrete laws are exact finite sums; the
// exponential case is integrated numerically.
inline double house_g(const OfferDistribution& dist, double z) {
    if (!(z > 0.0)) throw UsageError("house_g: requires z > 0");
    switch (dist.kind) {
        case OfferDistribution::Kind::uniform:
            if (z >= 1.0) return 1.0;
            return (1.0 + z * z) / (2.0 * z);
        case OfferDistribution::Kind::point_mass:
            return dist.point > z ? dist.point / z : 1.0;
        case OfferDistribution::Kind::discrete: {
            double s = 0.0;
            for (std::size_t l = 0; l < dist.values.size(); ++l)
                s += dist.probs[l] * (dist.values[l] > z ? dist.values[l] / z : 1.0);
            return s;
        }
        case OfferDistribution::Kind::exponential: {
            // E max(1, Z/z) = P(Z <= z) + (1/z) E Z 1{Z > z}, split at the kink.
            const double head = 1.0 - std::exp(-z);
            const double cut = std::max(z, 1.0) + 80.0;
            const double tail = adaptive_simpson(
                [z](double u) { return u / z * std::exp(-u); }, z, cut, kQuadratureTol);
            return head + tail;
        }
    }
    throw UsageError("house_g: unsupported offer distribution");
}

// h(y) = E (1 + Z/y)^alpha for a nonnegative gain Z, y > 0, alpha > 0.
// alpha = 1 reduces to 1 + EZ/y for every law; point masses and discrete laws
// are exact; the remaining exponential case is integrated numerically.
inline double burglar_h(const GainDistribution& dist, double alpha, double y) {
    if (!(y > 0.0)) throw UsageError("burglar_h: requires y > 0");
    if (!(alpha > 0.0)) throw UsageError("burglar_h: requires alpha > 0");
    if (alpha == 1.0) return 1.0 + dist.mean() / y;
    switch (dist.kind) {
        case GainDistribution::Kind::point_mass:
            return std::pow(1.0 + dist.mean_param / y, alpha);
        case GainDistribution::Kind::discrete: {
            double s = 0.0;
            for (std::size_t l = 0; l < dist.values.size(); ++l)
                s += dist.probs[l] * std::pow(1.0 + dist.values[l] / y, alpha);
            return s;
        }
        case GainDistribution::Kind::exponential: {
            const double a = dist.mean_param;
            const double cut = a * (130.0 + 20.0 * alpha);
            return adaptive_simpson(
                [a, alpha, y](double zz) {
                    return std::pow(1.0 + zz / y, alpha) * std::exp(-zz / a) / a;
                },
                0.0, cut, kQuadratureTol);
        }
    }
    throw UsageError("burglar_h: unsupported gain distribution");
}

// Drift coefficient of one investment cost coordinate:
// c = y (r - a - E(e^{z} - 1) * rate), exact for the supported jump models.
inline double investment_coeff(double y, double r, double a, const JumpSpec& jump) {
    if (!(y > 0.0)) throw UsageError("investment_coeff: weight must be > 0");
    if (!(r > 0.0)) throw UsageError("investment_coeff: discount rate must be > 0");
    if (!(a <= 0.0)) throw UsageError("investment_coeff: drift must be <= 0");
    double levy = 0.0;
    if (jump.active) levy = jump.rate * (jump.magnitude.mean_exp_jump() - 1.0);
    return y * (r - a - levy);
}

}  // namespace monostop
