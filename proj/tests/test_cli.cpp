#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin_path() {
    const char* p = std::getenv("MONOSTOP_BIN");
    REQUIRE(p != nullptr);
    return p;
}

std::string config_dir() {
    const char* p = std::getenv("MONOSTOP_CONFIGS");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    const std::string cmd = bin_path() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("monostop_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("simulate writes provenance-stamped artifacts and is reproducible") {
    const auto out1 = fresh_dir("sim1");
    const auto out2 = fresh_dir("sim2");
    const std::string base = "simulate --problem " + config_dir() +
                             "/house_sum_bernoulli.json --rule constant:1 --paths 5000 "
                             "--seed 42 --out ";
    REQUIRE(run(base + out1.string()) == 0);
    REQUIRE(run(base + out2.string()) == 0);

    const std::string csv = slurp(out1 / "estimate.csv");
    CHECK(csv.rfind("# monostop", 0) == 0);
    CHECK(csv.find("rule_id,mean,stderr,n_paths,seed,truncated_frac") != std::string::npos);
    CHECK(csv == slurp(out2 / "estimate.csv"));
    CHECK(slurp(out1 / "estimate.json") == slurp(out2 / "estimate.json"));

    // mean lands near E Z - c = 0.3
    const auto row = csv.substr(csv.rfind('\n', csv.size() - 2));
    const auto first_comma = row.find(',');
    const double mean = std::stod(row.substr(first_comma + 1));
    CHECK(std::abs(mean - 0.3) < 0.02);
}

TEST_CASE("malformed configs exit with code 2") {
    const auto dir = fresh_dir("bad");
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(run("simulate --problem " + bad.string() + " --out " + dir.string()) == 2);

    const auto unknown = dir / "unknown.json";
    std::ofstream(unknown) << R"({"family":"nope","params":{"dimension":1}})";
    CHECK(run("simulate --problem " + unknown.string() + " --out " + dir.string()) == 2);

    CHECK(run("simulate --out " + dir.string()) == 2);  // missing required --problem
}

TEST_CASE("disorder configs outside the parameter region are rejected at load") {
    const auto dir = fresh_dir("region");
    const auto bad = dir / "disorder_bad.json";
    std::ofstream(bad) << R"({"family":"disorder","params":{"dimension":1,
        "prior_rates":[0.2],"pre_intensities":[1.0],"post_intensities":[1.6],
        "delay_costs":[1.0]}})";
    CHECK(run("simulate --problem " + bad.string() + " --out " + dir.string()) == 2);
}

TEST_CASE("boundary export writes the figure files") {
    const auto dir = fresh_dir("fig");
    REQUIRE(run("boundary --problem " + config_dir() + "/house_sum_uniform_2d.json --out " +
                dir.string()) == 0);
    CHECK(fs::exists(dir / "fig1.csv"));
    CHECK(fs::exists(dir / "fig1.svg"));
    const std::string svg = slurp(dir / "fig1.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("monostop") != std::string::npos);

    // 1-D configs cannot export a curve
    CHECK(run("boundary --problem " + config_dir() + "/house_sum_bernoulli.json --out " +
              dir.string()) == 2);
}

TEST_CASE("verify passes on the Bernoulli config") {
    const auto dir = fresh_dir("verify");
    REQUIRE(run("verify --problem " + config_dir() +
                "/house_sum_bernoulli.json --paths 4000 --scan-paths 2000 --dp-horizon 8 "
                "--seed 7 --out " +
                dir.string()) == 0);
    const std::string summary = slurp(dir / "verify.json");
    CHECK(summary.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("oracle writes the DP table for discretizable configs") {
    const auto dir = fresh_dir("oracle");
    REQUIRE(run("oracle --problem " + config_dir() +
                "/house_sum_bernoulli.json --dp-horizon 6 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "dp_result.csv"));
    CHECK(fs::exists(dir / "agreement.json"));
    const std::string csv = slurp(dir / "dp_result.csv");
    CHECK(csv.find("state,time,value,action") != std::string::npos);

    CHECK(run("oracle --problem " + config_dir() + "/disorder_2d.json --out " +
              dir.string()) == 2);
}

#include <json.hpp>

#include "monostop/problems_io.hpp"

TEST_CASE("problem loader: field names, broadcast offers, figure tags") {
    using nlohmann::json;
    const auto house = monostop::load_problem(json::parse(R"({
        "family": "house-sum",
        "params": {"dimension": 2, "offers": {"kind": "uniform"}, "cost": 0.3}})"));
    CHECK(house.family == "house-sum");
    CHECK(house.discrete.dimension == 2);
    CHECK(house.discretizable);
    CHECK(house.figure_tag == "fig1");
    REQUIRE(house.set_factory);

    const auto inv = monostop::load_problem(json::parse(R"({
        "family": "investment",
        "params": {"dimension": 1, "discount": 0.05, "weights": [1.0],
                   "drifts": [-0.5], "jumps": {"kind": "none"}}})"));
    CHECK(inv.continuous);
    CHECK(inv.cont.direction == monostop::Direction::maximize);

    const auto dis = monostop::load_problem(json::parse(R"({
        "family": "disorder",
        "params": {"dimension": 2, "prior_rates": [1,1], "pre_intensities": [1,1],
                   "post_intensities": [1.5,1.5], "delay_costs": [1,1]}})"));
    CHECK(dis.cont.direction == monostop::Direction::minimize);
    CHECK(dis.cont.dimension == 2);
}

TEST_CASE("problem loader rejects malformed documents") {
    using nlohmann::json;
    CHECK_THROWS_AS(monostop::load_problem(json::parse(
                        R"({"family":"house-sum","params":{"dimension":2,
                            "offers":{"kind":"triangular"},"cost":0.3}})")),
                    monostop::UsageError);
    CHECK_THROWS_AS(monostop::load_problem(json::parse(R"({"family":"zzz","params":{"dimension":1}})")),
                    monostop::UsageError);
    CHECK_THROWS_AS(
        monostop::load_problem(json::parse(
            R"({"family":"burglar-sum","params":{"dimension":2,"survival":[0.5],
                "gains":{"kind":"exponential","mean":1.0}}})")),
        monostop::UsageError);
}

TEST_CASE("rule specs parse into the expected rules") {
    using nlohmann::json;
    const auto bundle = monostop::load_problem(json::parse(R"({
        "family": "house-sum",
        "params": {"dimension": 2, "offers": {"kind": "uniform"}, "cost": 0.3}})"));
    CHECK(monostop::parse_rule("myopic", bundle).kind == monostop::StoppingRule::Kind::myopic);
    const auto c = monostop::parse_rule("constant:2.5", bundle);
    CHECK(c.kind == monostop::StoppingRule::Kind::constant_time);
    CHECK(c.stop_time == 2.5);
    const auto t = monostop::parse_rule("truncated:12", bundle);
    CHECK(t.kind == monostop::StoppingRule::Kind::truncated);
    CHECK(t.horizon == 12.0);
    CHECK(t.inner->kind == monostop::StoppingRule::Kind::myopic);
    const auto e = monostop::parse_rule("entry:1.5", bundle);
    CHECK(e.kind == monostop::StoppingRule::Kind::first_entry);
    CHECK_THROWS_AS(monostop::parse_rule("entry:zzz", bundle), monostop::UsageError);
    CHECK_THROWS_AS(monostop::parse_rule("nonsense", bundle), monostop::UsageError);

    const auto burglar_sum = monostop::load_problem(json::parse(R"({
        "family": "burglar-sum",
        "params": {"dimension": 2, "survival": [0.5, 0.5],
                   "gains": {"kind": "exponential", "mean": 1.0}}})"));
    CHECK_THROWS_AS(monostop::parse_rule("entry", burglar_sum), monostop::UsageError);
}
