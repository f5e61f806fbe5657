// monostop: simulate, verify, and export multidimensional stopping problems.
//
// Subcommands:
//   simulate  estimate a rule's value by seeded Monte Carlo
//   verify    monotone scan, DP agreement, and myopic-dominance checks
//   boundary  export the stopping-set boundary as CSV and SVG
//   oracle    exact finite-horizon backward induction on discretizable configs
//
// Exit codes: 0 success, 2 usage/config error, 3 numeric or verification
// failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "monostop/monostop.hpp"

namespace fs = std::filesystem;
using namespace monostop;

namespace {

constexpr double kDominanceFactors[] = {0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 1.75, 2.0};

struct CommonOpts {
    std::string problem_file;
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    std::size_t paths = 10000;
    std::size_t horizon = 0;  // discrete horizon cap override
    double tmax = 0.0;        // continuous horizon override
    std::string format = "both";
};

std::string ensure_out_dir(const std::string& dir) {
    fs::create_directories(dir);
    return dir.back() == '/' ? dir : dir + "/";
}

struct LoadedConfig {
    ProblemBundle bundle;
    std::uint64_t config_hash = 0;
};

LoadedConfig load_config(const CommonOpts& opts) {
    const std::string bytes = read_file(opts.problem_file);
    LoadedConfig cfg;
    cfg.config_hash = fnv1a64(bytes);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed problem file: ") + e.what());
    }
    try {
        cfg.bundle = load_problem(doc, opts.tmax);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed problem file: ") + e.what());
    }
    if (!cfg.bundle.continuous && opts.horizon > 0)
        cfg.bundle.discrete.horizon_cap = opts.horizon;
    return cfg;
}

int cmd_simulate(const CommonOpts& opts, const std::string& rule_spec) {
    const LoadedConfig cfg = load_config(opts);
    const StoppingRule rule = parse_rule(rule_spec, cfg.bundle);
    const EstimateReport report =
        cfg.bundle.continuous
            ? estimate_value(cfg.bundle.cont, rule, opts.paths, opts.seed)
            : estimate_value(cfg.bundle.discrete, rule, opts.paths, opts.seed);

    const std::string prov = provenance_line(cfg.config_hash, opts.seed);
    const std::string out = ensure_out_dir(opts.out_dir);
    if (opts.format == "csv" || opts.format == "both")
        write_estimates_csv(out + "estimate.csv", {report}, prov);
    if (opts.format == "json" || opts.format == "both") {
        nlohmann::json doc = to_json(report);
        doc["provenance"] = prov;
        write_json(out + "estimate.json", doc);
    }
    std::cout << cfg.bundle.family << " " << rule.id << ": mean " << fmt_g17(report.mean)
              << " +/- " << fmt_g17(report.stderr_) << " (" << report.n_paths << " paths, "
              << fmt_g17(report.truncated_frac * 100.0) << "% truncated)\n";
    return 0;
}

bool family_expected_monotone(const ProblemBundle& b) {
    if (b.family != "burglar-sum") return true;
    // multi-gang sums with independent catches are the one non-monotone family;
    // a single gang or shared catches collapse to the monotone 1-D problem
    return b.dimension() == 1 || b.burglar_shared;
}

int cmd_verify(const CommonOpts& opts, std::size_t scan_paths, int dp_horizon, int grid) {
    const LoadedConfig cfg = load_config(opts);
    const ProblemBundle& bundle = cfg.bundle;
    const std::string out = ensure_out_dir(opts.out_dir);
    const std::string prov = provenance_line(cfg.config_hash, opts.seed);
    nlohmann::json summary;
    summary["provenance"] = prov;
    summary["family"] = bundle.family;
    bool all_pass = true;

    // 1. monotone scan
    const MonotoneReport scan =
        bundle.continuous
            ? monotone_violation_scan(bundle.cont, scan_paths, opts.seed)
            : monotone_violation_scan(bundle.discrete, scan_paths, 60, opts.seed);
    const bool expected_monotone = family_expected_monotone(bundle);
    const bool scan_ok = expected_monotone ? scan.violation_count == 0
                                           : scan.violation_count > 0;
    summary["monotone_scan"] = {{"paths", scan.paths_scanned},
                                {"violations", scan.violation_count},
                                {"expected_monotone", expected_monotone},
                                {"pass", scan_ok}};
    if (expected_monotone) {
        std::cout << "monotone scan: " << scan.violation_count << " violations in "
                  << scan.paths_scanned << " paths -> " << (scan_ok ? "pass" : "FAIL")
                  << " (sampling evidence, not a proof)\n";
    } else {
        std::cout << "monotone scan: not monotone as expected for a multi-gang sum with "
                     "independent catches ("
                  << scan.violation_count << " violating paths, first witness index "
                  << scan.witness_index << ") -> " << (scan_ok ? "pass" : "FAIL") << "\n";
    }
    all_pass = all_pass && scan_ok;

    // 2. DP agreement on discretizable families
    if (bundle.discretizable) {
        const FiniteChain chain = discretize(bundle.house, dp_horizon, grid);
        std::vector<int> horizons;
        for (int l = 1; l <= dp_horizon; ++l) horizons.push_back(l);
        const AgreementReport agree =
            agreement_report(chain, horizons, expected_monotone && scan_ok);
        const bool dp_ok = !agree.monotone_certified || agree.max_gap() <= 1e-10;
        summary["dp_agreement"] = {{"max_gap", agree.max_gap()},
                                   {"monotone_certified", agree.monotone_certified},
                                   {"pass", dp_ok}};
        std::cout << "dp agreement: max |dp - truncated myopic| over horizons 1.."
                  << dp_horizon << " = " << fmt_g17(agree.max_gap()) << " -> "
                  << (dp_ok ? "pass" : "FAIL") << "\n";
        all_pass = all_pass && dp_ok;
    } else {
        summary["dp_agreement"] = {{"skipped", true},
                                   {"reason", bundle.continuous
                                                  ? "continuous-time family"
                                                  : "family not finitely discretizable"}};
        std::cout << "dp agreement: skipped ("
                  << summary["dp_agreement"]["reason"].get<std::string>() << ")\n";
    }

    // 3. myopic dominance against the stock perturbation family
    if (bundle.set_factory && expected_monotone) {
        std::vector<StoppingRule> rules;
        const bool minimize = bundle.direction() == Direction::minimize;
        if (bundle.continuous) {
            rules.push_back(myopic_rule());
            for (double f : kDominanceFactors)
                rules.push_back(
                    first_entry_rule(bundle.set_factory(f), "entry:" + fmt_compact(f)));
        } else {
            const double cmp_horizon = 400.0;
            rules.push_back(truncated_rule(myopic_rule(), cmp_horizon));
            for (double f : kDominanceFactors)
                rules.push_back(truncated_rule(
                    first_entry_rule(bundle.set_factory(f), "entry:" + fmt_compact(f)),
                    cmp_horizon));
        }
        const ComparisonReport cmp =
            bundle.continuous ? compare_rules(bundle.cont, rules, opts.paths, opts.seed)
                              : compare_rules(bundle.discrete, rules, opts.paths, opts.seed);
        bool dominance_ok = true;
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t r = 1; r < rules.size(); ++r) {
            const auto& pair = cmp.pair(0, r);
            // maximization: myopic - rule >= -2 se; minimization: <= +2 se
            const bool ok = minimize ? pair.mean_diff <= 2.0 * pair.stderr_diff
                                     : pair.mean_diff >= -2.0 * pair.stderr_diff;
            dominance_ok = dominance_ok && ok;
            rows.push_back({{"rule", cmp.rules[r].rule_id},
                            {"mean_diff", pair.mean_diff},
                            {"stderr_diff", pair.stderr_diff},
                            {"pass", ok}});
        }
        summary["dominance"] = {{"rules", rows}, {"pass", dominance_ok}};
        std::cout << "myopic dominance vs " << rules.size() - 1
                  << " perturbed entry rules: " << (dominance_ok ? "pass" : "FAIL") << "\n";
        all_pass = all_pass && dominance_ok;
        write_estimates_csv(out + "verify_rules.csv", cmp.rules, prov);
    } else {
        summary["dominance"] = {{"skipped", true},
                                {"reason", expected_monotone
                                               ? "no named stopping set for this family"
                                               : "family not monotone"}};
        std::cout << "myopic dominance: skipped ("
                  << summary["dominance"]["reason"].get<std::string>() << ")\n";
    }

    // 4. pathwise extreme statistics (integrability diagnostics only)
    if (!bundle.continuous) {
        const PathStatistics stats =
            path_statistics(bundle.discrete, std::min<std::size_t>(scan_paths, 2000), 60,
                            opts.seed);
        summary["path_statistics"] = {{"mean_sup_reward", stats.mean_sup_reward},
                                      {"mean_inf_reward", stats.mean_inf_reward},
                                      {"paths", stats.paths},
                                      {"length", stats.length}};
        std::cout << "path statistics over " << stats.length
                  << " steps: mean sup reward " << fmt_g17(stats.mean_sup_reward)
                  << ", mean inf reward " << fmt_g17(stats.mean_inf_reward)
                  << " (diagnostic only)\n";
    }

    summary["pass"] = all_pass;
    write_json(out + "verify.json", summary);
    std::cout << "verdict: " << (all_pass ? "pass" : "FAIL") << "\n";
    return all_pass ? 0 : 3;
}

int cmd_boundary(const CommonOpts& opts, int resolution, double factor) {
    const LoadedConfig cfg = load_config(opts);
    const ProblemBundle& bundle = cfg.bundle;
    if (bundle.dimension() != 2) {
        std::cerr << "boundary export needs a 2-D problem configuration\n";
        return 2;
    }
    if (!bundle.set_factory) {
        std::cerr << "this family has no named stopping set to export\n";
        return 2;
    }
    const StoppingSetDescriptor set = bundle.set_factory(factor);
    const auto points = boundary_sample(set, resolution);
    const std::string stem = bundle.figure_tag.empty() ? "boundary" : bundle.figure_tag;
    const std::string out = ensure_out_dir(opts.out_dir);
    const std::string prov = provenance_line(cfg.config_hash, opts.seed);
    write_boundary_csv(out + stem + ".csv", points, prov);
    write_boundary_svg(out + stem + ".svg", points, support_box(set), prov);
    std::cout << "wrote " << points.size() << " boundary points to " << out << stem
              << ".{csv,svg}\n";
    return 0;
}

int cmd_oracle(const CommonOpts& opts, int horizon, int grid) {
    const LoadedConfig cfg = load_config(opts);
    const ProblemBundle& bundle = cfg.bundle;
    if (!bundle.discretizable) {
        std::cerr << "oracle supports house-sum configs with discrete, point-mass, or "
                     "uniform offers\n";
        return 2;
    }
    const FiniteChain chain = discretize(bundle.house, horizon, grid);
    const DPResult dp = dp_solve(chain);
    const MonotoneReport scan = monotone_violation_scan(bundle.discrete, 2000, 60, opts.seed);
    std::vector<int> horizons;
    for (int l = 1; l <= horizon; ++l) horizons.push_back(l);
    const AgreementReport agree = agreement_report(chain, horizons, scan.violation_count == 0);

    const std::string out = ensure_out_dir(opts.out_dir);
    const std::string prov = provenance_line(cfg.config_hash, opts.seed);
    write_dp_csv(out + "dp_result.csv", chain, dp, prov);
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : agree.records)
        records.push_back({{"horizon", r.horizon},
                           {"dp_value", r.dp_value},
                           {"myopic_value", r.myopic_value},
                           {"gap", r.gap},
                           {"disagreements", r.disagreements}});
    write_json(out + "agreement.json",
               {{"provenance", prov},
                {"monotone_certified", agree.monotone_certified},
                {"records", records}});
    std::cout << "dp value at horizon " << horizon << ": " << fmt_g17(dp.value_at_initial)
              << " (" << chain.size() << " states); max myopic gap "
              << fmt_g17(agree.max_gap()) << "\n";
    return 0;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"explicit solutions of multidimensional optimal stopping problems"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string rule_spec = "myopic";
    std::size_t scan_paths = 10000;
    int dp_horizon = 12;
    int grid = 21;
    int resolution = 256;
    double factor = 1.0;

    auto add_common = [&](CLI::App* sub, bool needs_problem = true) {
        auto* p = sub->add_option("--problem", opts.problem_file, "problem parameter file");
        if (needs_problem) p->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "root seed");
        sub->add_option("--paths", opts.paths, "number of simulated paths");
        sub->add_option("--horizon", opts.horizon, "discrete horizon cap");
        sub->add_option("--tmax", opts.tmax, "continuous horizon cap");
    };

    auto* simulate = app.add_subcommand("simulate", "estimate a stopping rule's value");
    add_common(simulate);
    simulate->add_option("--rule", rule_spec,
                         "myopic | constant:T | truncated:L | entry[:FACTOR]");
    simulate->add_option("--format", opts.format, "csv | json | both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    auto* verify = app.add_subcommand("verify", "run the verification bundle");
    add_common(verify);
    verify->add_option("--scan-paths", scan_paths, "paths for the monotone scan");
    verify->add_option("--dp-horizon", dp_horizon, "horizons for the DP agreement");
    verify->add_option("--grid", grid, "grid points for uniform quantization");

    auto* boundary = app.add_subcommand("boundary", "export the stopping-set boundary");
    add_common(boundary);
    boundary->add_option("--resolution", resolution, "points along the curve");
    boundary->add_option("--factor", factor, "perturbation factor for the set");

    auto* oracle = app.add_subcommand("oracle", "exact backward induction");
    add_common(oracle);
    oracle->add_option("--dp-horizon", dp_horizon, "time horizon");
    oracle->add_option("--grid", grid, "grid points for uniform quantization");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (simulate->parsed()) return cmd_simulate(opts, rule_spec);
    if (verify->parsed()) return cmd_verify(opts, scan_paths, dp_horizon, grid);
    if (boundary->parsed()) return cmd_boundary(opts, resolution, factor);
    if (oracle->parsed()) return cmd_oracle(opts, dp_horizon, grid);
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
