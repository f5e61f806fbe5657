#pragma once

// Report serialization: estimate/comparison records as JSON and CSV, DP
// tables as CSV. Every artifact carries one provenance line (version, config
// hash, root seed); doubles are printed with 17 significant digits so reruns
// are byte-identical.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "monostop/dp_oracle.hpp"
#include "monostop/mc_engine.hpp"
#include "monostop/version.hpp"

namespace monostop {

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string fmt_hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string provenance_line(std::uint64_t config_hash, std::uint64_t seed) {
    return std::string("monostop ") + kVersion + " config_sha=" + fmt_hex16(config_hash) +
           " seed=" + std::to_string(seed);
}

// ---------------------------------------------------------------------------
// Estimate / comparison reports
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const EstimateReport& r) {
    return {{"rule_id", r.rule_id},       {"mean", r.mean},
            {"stderr", r.stderr_},        {"n_paths", r.n_paths},
            {"seed", r.seed},             {"truncated_frac", r.truncated_frac},
            {"horizon_cap", r.horizon_cap}};
}

inline nlohmann::json to_json(const ComparisonReport& r) {
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& er : r.rules) rules.push_back(to_json(er));
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.pairs)
        pairs.push_back({{"first", r.rules[p.first].rule_id},
                         {"second", r.rules[p.second].rule_id},
                         {"mean_diff", p.mean_diff},
                         {"stderr_diff", p.stderr_diff}});
    return {{"rules", rules}, {"pairs", pairs}};
}

inline const char* estimate_csv_header() {
    return "rule_id,mean,stderr,n_paths,seed,truncated_frac";
}

inline std::string estimate_csv_row(const EstimateReport& r) {
    return r.rule_id + "," + fmt_g17(r.mean) + "," + fmt_g17(r.stderr_) + "," +
           std::to_string(r.n_paths) + "," + std::to_string(r.seed) + "," +
           fmt_g17(r.truncated_frac);
}

inline void write_estimates_csv(const std::string& path,
                                const std::vector<EstimateReport>& reports,
                                const std::string& provenance) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open output file: " + path);
    out << "# " << provenance << "\n" << estimate_csv_header() << "\n";
    for (const auto& r : reports) out << estimate_csv_row(r) << "\n";
}

inline void write_json(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open output file: " + path);
    out << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// DP tables
// ---------------------------------------------------------------------------

inline std::string state_label(const State& s) {
    std::string label;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) label += "|";
        label += fmt_g17(s[i]);
    }
    return label;
}

inline void write_dp_csv(const std::string& path, const FiniteChain& chain,
                         const DPResult& result, const std::string& provenance) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open output file: " + path);
    out << "# " << provenance << "\n";
    out << "state,time,value,action\n";
    for (int n = 1; n <= result.horizon; ++n)
        for (std::size_t s = 0; s < chain.size(); ++s)
            out << state_label(chain.states[s]) << "," << n << ","
                << fmt_g17(result.value[static_cast<std::size_t>(n - 1)][s]) << ","
                << (result.stop[static_cast<std::size_t>(n - 1)][s] ? "stop" : "continue")
                << "\n";
}

}  // namespace monostop
