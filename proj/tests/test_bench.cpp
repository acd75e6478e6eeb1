#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "batchode/bench.hpp"
#include "test_support.hpp"

using namespace batchode;
using namespace batchode::bench;
using json = nlohmann::json;

namespace {

const std::string kIcPath = std::string(BATCHODE_DATA_DIR) + "/pleiades_ic.txt";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/batchode_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

RunConfig decayConfig() {
    RunConfig cfg;
    cfg.problem = ProblemKind::ExpDecay;
    cfg.solver = SolverChoice::RKCK;
    cfg.numSystems = 4;
    cfg.hOuter = 0.25;
    cfg.perturbMagnitude = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("formatDouble17 round-trips random doubles bitwise") {
    testsupport::Rng rng(11);
    auto roundTrip = [](double v) {
        const double back = parseDouble(formatDouble17(v));
        return std::bit_cast<std::uint64_t>(back) == std::bit_cast<std::uint64_t>(v);
    };
    CHECK(roundTrip(0.0));
    CHECK(roundTrip(-0.0));
    CHECK(roundTrip(1.0 / 3.0));
    CHECK(roundTrip(std::numeric_limits<double>::denorm_min()));
    CHECK(roundTrip(std::numeric_limits<double>::max()));
    for (int k = 0; k < 20000; ++k) {
        const double mag = rng.logUniform(1e-300, 1e300);
        CHECK(roundTrip(rng.coin() ? mag : -mag));
    }
}

TEST_CASE("runIntegrate writes CSV rows and a complete JSON summary") {
    TempFile csv("integrate.csv"), summary("integrate.json");
    RunConfig cfg = decayConfig();
    cfg.outputPath = csv.path;
    cfg.summaryPath = summary.path;
    REQUIRE(run(cfg) == 0);

    // 4 windows x 4 systems + header
    std::istringstream lines(slurp(csv.path));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "outerStepIndex,t,systemIndex,var0");
    int rows = 0;
    double lastVal = 0.0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto lastComma = line.rfind(',');
        lastVal = parseDouble(line.substr(lastComma + 1));
    }
    CHECK(rows == 16);
    CHECK(testsupport::relDiff(lastVal, std::exp(-1.0)) < 1e-8);

    const json s = json::parse(slurp(summary.path));
    CHECK(s["outerSteps"] == 4);
    CHECK(s["workers"] == 1);
    for (const char* key : {"stepsAccepted", "stepsRejected", "rhsEvals",
                            "specRadEvals", "hMinSeen", "hMaxSeen",
                            "underflowCount", "underflowSystems"})
        CHECK(s["stats"].contains(key));
    CHECK(s["stats"]["stepsRejected"].get<long>() >= 0);
    CHECK(s["stats"]["specRadEvals"].get<long>() == 0);  // RKCK never estimates
    CHECK(s["config"]["problem"] == "expdecay");
    CHECK(s["wallClockPerOuterStepSeconds"].get<double>() > 0.0);
}

TEST_CASE("runIntegrate twice gives bitwise-identical CSV") {
    TempFile a("rep_a.csv"), b("rep_b.csv");
    RunConfig cfg = decayConfig();
    cfg.perturbMagnitude = 0.01;
    cfg.numSystems = 16;
    cfg.outputPath = a.path;
    REQUIRE(run(cfg) == 0);
    cfg.outputPath = b.path;
    REQUIRE(run(cfg) == 0);
    CHECK(slurp(a.path) == slurp(b.path));
}

TEST_CASE("runIntegrate with RKC on expdecay hits 1e-4") {
    TempFile csv("rkc_decay.csv");
    RunConfig cfg = decayConfig();
    cfg.solver = SolverChoice::RKC;
    cfg.numSystems = 1;
    cfg.hOuter = 1.0;
    cfg.outputPath = csv.path;
    REQUIRE(run(cfg) == 0);
    std::istringstream lines(slurp(csv.path));
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    const double got = parseDouble(row.substr(row.rfind(',') + 1));
    CHECK(testsupport::relDiff(got, std::exp(-1.0)) < 1e-4);
}

TEST_CASE("unwritable output path exits nonzero") {
    RunConfig cfg = decayConfig();
    cfg.outputPath = "/nonexistent-dir/out.csv";
    CHECK(run(cfg) == 1);
}

TEST_CASE("pleiades integrate run uses the data asset") {
    TempFile summary("plei.json");
    RunConfig cfg;
    cfg.problem = ProblemKind::Pleiades;
    cfg.numSystems = 2;
    cfg.pleiadesIcPath = kIcPath;
    cfg.summaryPath = summary.path;
    REQUIRE(run(cfg) == 0);
    const json s = json::parse(slurp(summary.path));
    CHECK(s["outerSteps"] == 10);
    CHECK(s["stats"]["stepsAccepted"].get<long>() > 0);

    cfg.pleiadesIcPath = "/missing/ic.txt";
    CHECK(run(cfg) == 1);  // IoError
}

TEST_CASE("pleiades protocol run: 10 outer snapshots, 10x1024 CSV rows") {
    TempFile csv("plei_full.csv");
    RunConfig cfg;
    cfg.problem = ProblemKind::Pleiades;
    cfg.solver = SolverChoice::RKCK;
    cfg.numSystems = 1024;
    cfg.eps = 1e-10;
    cfg.pleiadesIcPath = kIcPath;
    cfg.outputPath = csv.path;
    REQUIRE(run(cfg) == 0);
    std::istringstream lines(slurp(csv.path));
    std::string header;
    std::getline(lines, header);
    CHECK(header.rfind("outerStepIndex,t,systemIndex,var0,", 0) == 0);
    long rows = 0;
    std::string line;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 10 * 1024);
}

TEST_CASE("runConvergence slopes and ladder bookkeeping") {
    TempFile csv("conv.csv"), summary("conv.json");
    RunConfig cfg;
    cfg.mode = RunMode::Convergence;
    cfg.problem = ProblemKind::ExpDecay;
    cfg.solver = SolverChoice::RKCK;
    cfg.outputPath = csv.path;
    cfg.summaryPath = summary.path;
    REQUIRE(run(cfg) == 0);
    const json s = json::parse(slurp(summary.path));
    CHECK(s["slope"].get<double>() == doctest::Approx(5.0).epsilon(0.06));
    CHECK(s["points"].size() == 4);

    // doubling the ladder length doubles the CSV data rows
    cfg.ladderPoints = 8;
    REQUIRE(run(cfg) == 0);
    std::istringstream lines(slurp(csv.path));
    std::string line;
    int rows = -1;  // discount header
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 8);

    cfg.ladderPoints = 4;
    cfg.solver = SolverChoice::RKC;
    REQUIRE(run(cfg) == 0);
    const json s2 = json::parse(slurp(summary.path));
    CHECK(s2["slope"].get<double>() == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("runConvergence rejects problems without analytic solutions") {
    RunConfig cfg;
    cfg.mode = RunMode::Convergence;
    cfg.problem = ProblemKind::Heat;
    CHECK(run(cfg) == 2);  // ConfigError
}

TEST_CASE("runScaling reports speedup 1.0 for one worker and bitwise identity") {
    TempFile csv("scale.csv"), summary("scale.json");
    RunConfig cfg = decayConfig();
    cfg.mode = RunMode::Scaling;
    cfg.numSystems = 64;
    cfg.perturbMagnitude = 0.01;
    cfg.workers = 4;
    cfg.outputPath = csv.path;
    cfg.summaryPath = summary.path;
    REQUIRE(run(cfg) == 0);

    const json s = json::parse(slurp(summary.path));
    CHECK(s["bitwiseIdentical"] == true);
    REQUIRE(s["rows"].size() == 3);  // workers 1, 2, 4
    CHECK(s["rows"][0]["workers"] == 1);
    CHECK(s["rows"][0]["speedupVs1"] == 1.0);
    CHECK(s["rows"][2]["workers"] == 4);

    std::istringstream lines(slurp(csv.path));
    std::string header;
    std::getline(lines, header);
    CHECK(header == "workers,wallClockPerOuterStep,speedupVs1");
}

TEST_CASE("runScaling requires numSystems >= workers") {
    RunConfig cfg = decayConfig();
    cfg.mode = RunMode::Scaling;
    cfg.numSystems = 2;
    cfg.workers = 4;
    CHECK(run(cfg) == 2);
}

TEST_CASE("parse helpers reject junk") {
    CHECK(parseProblem("heat") == ProblemKind::Heat);
    CHECK(parseSolver("rkc") == SolverChoice::RKC);
    CHECK(parseMode("scaling") == RunMode::Scaling);
    CHECK_THROWS_AS(parseProblem("brusselator"), ConfigError);
    CHECK_THROWS_AS(parseSolver("bdf"), ConfigError);
    CHECK_THROWS_AS(parseMode("plot"), ConfigError);
    CHECK_THROWS_AS(parseDouble("not-a-number"), ConfigError);
}
