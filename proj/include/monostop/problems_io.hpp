#pragma once

// Problem parameter files: {"family": ..., "params": {...}} with field names
// mirroring the parameter structs. Loading yields the constructed problem,
// its stopping-set factory (perturbation factor -> descriptor), and enough
// family information for the oracle and figure commands.

#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "monostop/errors.hpp"
#include "monostop/problems/burglar.hpp"
#include "monostop/problems/disorder.hpp"
#include "monostop/problems/house.hpp"
#include "monostop/problems/investment.hpp"

namespace monostop {

namespace detail {

inline OfferDistribution parse_offer(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return OfferDistribution::uniform01();
    if (kind == "exponential") return OfferDistribution::exponential1();
    if (kind == "point_mass") return OfferDistribution::point_mass(j.at("value").get<double>());
    if (kind == "discrete")
        return OfferDistribution::discrete(j.at("values").get<std::vector<double>>(),
                                           j.at("probs").get<std::vector<double>>());
    throw UsageError("unknown offer distribution kind: " + kind);
}

inline GainDistribution parse_gain(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return GainDistribution::exponential(j.at("mean").get<double>());
    if (kind == "point_mass") return GainDistribution::point_mass(j.at("value").get<double>());
    if (kind == "discrete")
        return GainDistribution::discrete(j.at("values").get<std::vector<double>>(),
                                          j.at("probs").get<std::vector<double>>());
    throw UsageError("unknown gain distribution kind: " + kind);
}

inline JumpSpec parse_jump(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "none") return JumpSpec::none();
    if (kind == "compound_poisson") {
        const auto& mag = j.at("magnitude");
        const std::string mkind = mag.at("kind").get<std::string>();
        JumpMagnitude magnitude;
        if (mkind == "point_mass")
            magnitude = JumpMagnitude::point_mass(mag.at("value").get<double>());
        else if (mkind == "exponential")
            magnitude = JumpMagnitude::exponential(mag.at("mean").get<double>());
        else
            throw UsageError("unknown jump magnitude kind: " + mkind);
        return JumpSpec::compound_poisson(j.at("rate").get<double>(), magnitude);
    }
    throw UsageError("unknown jump model kind: " + kind);
}

// "offers" may be a single object (applied to every coordinate) or an array.
template <typename Parse>
auto parse_per_coordinate(const nlohmann::json& j, int dimension, Parse parse) {
    using T = decltype(parse(j));
    std::vector<T> out;
    if (j.is_array())
        for (const auto& e : j) out.push_back(parse(e));
    else
        out.assign(static_cast<std::size_t>(dimension), parse(j));
    return out;
}

}  // namespace detail

struct ProblemBundle {
    std::string family;
    bool continuous = false;
    DiscreteProblem discrete;
    ContinuousProblem cont;
    std::function<StoppingSetDescriptor(double)> set_factory;  // empty if none
    bool discretizable = false;
    HouseParams house;  // valid for the house families
    HouseVariant house_variant = HouseVariant::sum;
    bool burglar_shared = false;  // shared catches collapse the sum to 1-D
    std::string figure_tag;  // fig1..fig4 when the config maps to one

    Direction direction() const {
        return continuous ? cont.direction : discrete.direction;
    }

    int dimension() const { return continuous ? cont.dimension : discrete.dimension; }
};

// t_max_override (> 0) applies to the continuous families.
inline ProblemBundle load_problem(const nlohmann::json& doc, double t_max_override = 0.0) {
    ProblemBundle bundle;
    bundle.family = doc.at("family").get<std::string>();
    const auto& pj = doc.at("params");
    const int m = pj.at("dimension").get<int>();

    if (bundle.family == "house-sum" || bundle.family == "house-product") {
        const HouseVariant variant =
            bundle.family == "house-sum" ? HouseVariant::sum : HouseVariant::product;
        HouseParams params;
        params.dimension = m;
        params.offers = detail::parse_per_coordinate(pj.at("offers"), m, detail::parse_offer);
        if (variant == HouseVariant::sum) params.cost = pj.at("cost").get<double>();
        if (variant == HouseVariant::product) params.discount = pj.at("discount").get<double>();
        params.per_coordinate_cost = pj.value("per_coordinate_cost", false);
        params.validate(variant);
        bundle.discrete = make_house_problem(params, variant);
        bundle.house = params;
        bundle.house_variant = variant;
        if (house_has_named_set(params, variant))
            bundle.set_factory = [params, variant](double f) {
                return house_stopping_set(params, variant, f);
            };
        if (variant == HouseVariant::sum) {
            bundle.discretizable = true;
            for (const auto& d : params.offers)
                if (d.kind == OfferDistribution::Kind::exponential) bundle.discretizable = false;
        }
        if (m == 2) {
            if (variant == HouseVariant::sum &&
                params.homogeneous(OfferDistribution::Kind::uniform))
                bundle.figure_tag = "fig1";
            else if (variant == HouseVariant::sum &&
                     params.homogeneous(OfferDistribution::Kind::exponential))
                bundle.figure_tag = "fig2";
            else if (variant == HouseVariant::sum &&
                     params.homogeneous(OfferDistribution::Kind::discrete))
                bundle.figure_tag = "fig3";
            else if (variant == HouseVariant::product &&
                     params.homogeneous(OfferDistribution::Kind::uniform))
                bundle.figure_tag = "fig4";
        }
        return bundle;
    }

    if (bundle.family == "burglar-sum" || bundle.family == "burglar-product") {
        BurglarParams params;
        params.dimension = m;
        params.survival = pj.at("survival").get<std::vector<double>>();
        params.gains = detail::parse_per_coordinate(pj.at("gains"), m, detail::parse_gain);
        params.shared_delta = pj.value("shared_delta", false);
        if (pj.contains("alphas")) params.alphas = pj.at("alphas").get<std::vector<double>>();
        params.validate();
        bundle.burglar_shared = params.shared_delta;
        if (bundle.family == "burglar-sum") {
            bundle.discrete = make_burglar_sum_problem(params);
        } else {
            bundle.discrete = make_burglar_product_problem(params);
            bundle.set_factory = [params](double f) { return burglar_product_set(params, f); };
        }
        return bundle;
    }

    if (bundle.family == "disorder") {
        DisorderParams params;
        params.dimension = m;
        params.prior_rates = pj.at("prior_rates").get<std::vector<double>>();
        params.pre_intensities = pj.at("pre_intensities").get<std::vector<double>>();
        params.post_intensities = pj.at("post_intensities").get<std::vector<double>>();
        params.delay_costs = pj.at("delay_costs").get<std::vector<double>>();
        params.validate();
        bundle.continuous = true;
        bundle.cont = make_disorder_problem(params, t_max_override);
        bundle.set_factory = [params](double f) { return disorder_stopping_set(params, f); };
        return bundle;
    }

    if (bundle.family == "investment") {
        InvestmentParams params;
        params.dimension = m;
        params.discount = pj.at("discount").get<double>();
        params.weights = pj.at("weights").get<std::vector<double>>();
        params.drifts = pj.at("drifts").get<std::vector<double>>();
        params.jumps = detail::parse_per_coordinate(pj.at("jumps"), m, detail::parse_jump);
        params.validate();
        bundle.continuous = true;
        bundle.cont = make_investment_problem(params, t_max_override);
        bundle.set_factory = [params](double f) { return investment_stopping_set(params, f); };
        return bundle;
    }

    throw UsageError("unknown problem family: " + bundle.family);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline ProblemBundle load_problem_file(const std::string& path, double t_max_override = 0.0) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed problem file: ") + e.what());
    }
    try {
        return load_problem(doc, t_max_override);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed problem file: ") + e.what());
    }
}

inline std::string fmt_compact(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

// Rule specs: myopic | constant:T | truncated:L (truncated myopic) |
// entry[:FACTOR] (first entry into the family set scaled by FACTOR).
inline StoppingRule parse_rule(const std::string& spec, const ProblemBundle& bundle) {
    if (spec == "myopic") return myopic_rule();
    if (spec.rfind("constant:", 0) == 0) {
        try {
            return constant_time_rule(std::stod(spec.substr(9)));
        } catch (const std::exception&) {
            throw UsageError("bad rule spec: " + spec);
        }
    }
    if (spec.rfind("truncated:", 0) == 0) {
        try {
            return truncated_rule(myopic_rule(), std::stod(spec.substr(10)));
        } catch (const std::exception&) {
            throw UsageError("bad rule spec: " + spec);
        }
    }
    if (spec == "entry" || spec.rfind("entry:", 0) == 0) {
        if (!bundle.set_factory)
            throw UsageError("this problem has no named stopping set for entry rules");
        double factor = 1.0;
        if (spec.size() > 6) {
            try {
                factor = std::stod(spec.substr(6));
            } catch (const std::exception&) {
                throw UsageError("bad rule spec: " + spec);
            }
        }
        return first_entry_rule(bundle.set_factory(factor), "entry:" + fmt_compact(factor));
    }
    throw UsageError("unknown rule spec: " + spec +
                     " (expected myopic | constant:T | truncated:L | entry[:FACTOR])");
}

}  // namespace monostop
