#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "batchode/batch.hpp"
#include "batchode/batch_driver.hpp"
#include "batchode/problems.hpp"
#include "batchode/rkc.hpp"
#include "test_support.hpp"

using namespace batchode;

TEST_CASE("pack interleaves system-major") {
    const BatchStates b = pack({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(b.numSystems == 2);
    CHECK(b.dim == 2);
    CHECK(b.values == std::vector<double>{1.0, 3.0, 2.0, 4.0});
}

TEST_CASE("pack degenerate shapes stay contiguous") {
    CHECK(pack({{5.0, 6.0, 7.0}}).values == std::vector<double>{5.0, 6.0, 7.0});
    CHECK(pack({{1.5}, {2.5}, {3.5}}).values == std::vector<double>{1.5, 2.5, 3.5});
}

TEST_CASE("pack rejects ragged input") {
    CHECK_THROWS_AS(pack({{1.0, 2.0}, {3.0}}), InvalidShape);
    CHECK_THROWS_AS(pack({}), InvalidShape);
    CHECK_THROWS_AS(pack({{1.0}, {2.0}}, {{1.0}}), InvalidShape);
}

TEST_CASE("unpack inverts pack") {
    const std::vector<std::vector<double>> v{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(unpack(pack(v)) == v);

    BatchStates b;
    b.numSystems = 1;
    b.dim = 3;
    b.values = {5.0, 6.0, 7.0};
    CHECK(unpack(b) == std::vector<std::vector<double>>{{5.0, 6.0, 7.0}});
}

TEST_CASE("unpack validates shape") {
    BatchStates b;
    b.numSystems = 2;
    b.dim = 2;
    b.values = {1.0, 2.0, 3.0};  // one short
    CHECK_THROWS_AS(unpack(b), InvalidShape);
}

TEST_CASE("round trip is bitwise on 1024 random systems of dim 28") {
    testsupport::Rng rng(2024);
    std::vector<std::vector<double>> v(1024, std::vector<double>(28));
    for (auto& sys : v)
        for (auto& x : sys) x = rng.uniform(-1e6, 1e6);
    const auto back = unpack(pack(v));
    REQUIRE(back.size() == v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(std::memcmp(back[i].data(), v[i].data(), 28 * sizeof(double)) == 0);
}

TEST_CASE("layout bijection exhaustive up to 8x8") {
    for (int numSystems = 1; numSystems <= 8; ++numSystems) {
        for (int dim = 1; dim <= 8; ++dim) {
            std::vector<std::vector<double>> v(numSystems, std::vector<double>(dim));
            for (int i = 0; i < numSystems; ++i)
                for (int j = 0; j < dim; ++j) v[i][j] = 100.0 * i + j;
            const BatchStates b = pack(v);
            for (int i = 0; i < numSystems; ++i)
                for (int j = 0; j < dim; ++j)
                    CHECK(b.values[i + numSystems * j] == 100.0 * i + j);
            CHECK(unpack(b) == v);
        }
    }
}

namespace {

OdeProblem zeroRhs(int dim) {
    OdeProblem p;
    p.dim = dim;
    p.rhs = [](double, std::span<const double>, std::span<const double>,
               std::span<double> out) {
        for (auto& x : out) x = 0.0;
    };
    return p;
}

BatchStates decayBatch(const std::vector<double>& y0s) {
    std::vector<std::vector<double>> states;
    for (double y0 : y0s) states.push_back({y0});
    BatchStates b = pack(states);
    const double g0 = 1.0;
    fillParams(b, std::span<const double>(&g0, 1));
    return b;
}

}  // namespace

TEST_CASE("integrateBatch on zero rhs is the identity") {
    const BatchStates b = pack({{1.0, -2.5}, {3.25, 4.0}, {0.0, 1e-8}});
    for (SolverChoice solver : {SolverChoice::RKCK, SolverChoice::RKC}) {
        const BatchResult r = integrateBatch(zeroRhs(2), b, 0.0, 1.0, solver,
                                             ToleranceSettings{}, 2);
        CHECK(r.states.values == b.values);
        for (const auto& st : r.stats) {
            CHECK(st.stepsAccepted >= 1);
            CHECK(st.rhsEvals >= st.stepsAccepted);
            CHECK(!st.underflow);
        }
    }
}

TEST_CASE("integrateBatch linear decay hits the analytic solution") {
    const BatchStates b = decayBatch({1.0, 2.0, 3.0, 4.0});
    const BatchResult r = integrateBatch(problems::expDecay(), b, 0.0, 1.0,
                                         SolverChoice::RKCK, ToleranceSettings{}, 1);
    const double decay = std::exp(-1.0);
    for (int i = 0; i < 4; ++i) {
        const double expect = (i + 1) * decay;
        CHECK(testsupport::relDiff(r.states.at(i, 0), expect) < 1e-8);
    }
}

TEST_CASE("integrateBatch is bitwise invariant under worker count") {
    testsupport::Rng rng(7);
    std::vector<double> y0s;
    for (int i = 0; i < 37; ++i) y0s.push_back(rng.uniform(0.5, 4.0));
    const BatchStates b = decayBatch(y0s);
    for (SolverChoice solver : {SolverChoice::RKCK, SolverChoice::RKC}) {
        const BatchResult ref = integrateBatch(problems::expDecay(), b, 0.0, 1.0,
                                               solver, ToleranceSettings{}, 1);
        for (int workers : {2, 4, 8}) {
            const BatchResult r = integrateBatch(problems::expDecay(), b, 0.0, 1.0,
                                                 solver, ToleranceSettings{}, workers);
            CHECK(std::memcmp(r.states.values.data(), ref.states.values.data(),
                              ref.states.values.size() * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("integrateBatch validates interval and shapes") {
    const BatchStates b = pack({{1.0}});
    CHECK_THROWS_AS(integrateBatch(zeroRhs(1), b, 1.0, 1.0, SolverChoice::RKCK,
                                   ToleranceSettings{}, 1),
                    InvalidInterval);
    CHECK_THROWS_AS(integrateBatch(zeroRhs(2), b, 0.0, 1.0, SolverChoice::RKCK,
                                   ToleranceSettings{}, 1),
                    InvalidShape);
}

TEST_CASE("perturbing one system leaves the others untouched") {
    std::vector<double> y0s{1.0, 2.0, 3.0, 4.0, 5.0};
    const BatchResult base = integrateBatch(problems::expDecay(), decayBatch(y0s),
                                            0.0, 1.0, SolverChoice::RKCK,
                                            ToleranceSettings{}, 2);
    y0s[2] += 1e-3;
    const BatchResult bumped = integrateBatch(problems::expDecay(), decayBatch(y0s),
                                              0.0, 1.0, SolverChoice::RKCK,
                                              ToleranceSettings{}, 2);
    for (int i = 0; i < 5; ++i) {
        if (i == 2)
            CHECK(bumped.states.at(i, 0) != base.states.at(i, 0));
        else
            CHECK(bumped.states.at(i, 0) == base.states.at(i, 0));
    }
}

TEST_CASE("outerLoop sink cadence") {
    const BatchStates b = pack({{1.0}});
    std::vector<double> times;
    auto run = [&](double t0, double tEnd, double hOuter) {
        times.clear();
        outerLoop(zeroRhs(1), b, t0, tEnd, hOuter, SolverChoice::RKCK,
                  ToleranceSettings{}, 1,
                  [&](double t, BatchStates) { times.push_back(t); });
    };

    run(0.0, 1.0, 0.1);
    REQUIRE(times.size() == 10);
    for (int k = 0; k < 10; ++k) CHECK(times[k] == doctest::Approx(0.1 * (k + 1)));
    CHECK(times.back() == 1.0);

    run(0.0, 1.0, 1.0);
    CHECK(times == std::vector<double>{1.0});

    run(0.0, 1.05, 0.1);  // non-dividing window
    CHECK(times.size() == 11);
    CHECK(times.back() == 1.05);
}

TEST_CASE("outerLoop restart windows agree with a single window") {
    const BatchStates b = decayBatch({1.0});
    const auto multi = outerLoop(problems::expDecay(), b, 0.0, 1.0, 0.1,
                                 SolverChoice::RKCK, ToleranceSettings{}, 1, {});
    const auto single = outerLoop(problems::expDecay(), b, 0.0, 1.0, 1.0,
                                  SolverChoice::RKCK, ToleranceSettings{}, 1, {});
    const double exact = std::exp(-1.0);
    CHECK(testsupport::relDiff(multi.states.at(0, 0), exact) < 1e-8);
    CHECK(testsupport::relDiff(single.states.at(0, 0), exact) < 1e-8);
    CHECK(multi.outerSteps == 10);
    CHECK(single.outerSteps == 1);
}

TEST_CASE("outerLoop rejects bad windows") {
    const BatchStates b = pack({{1.0}});
    CHECK_THROWS_AS(outerLoop(zeroRhs(1), b, 0.0, 1.0, 0.0, SolverChoice::RKCK,
                              ToleranceSettings{}, 1, {}),
                    InvalidInterval);
    CHECK_THROWS_AS(outerLoop(zeroRhs(1), b, 1.0, 0.5, 0.1, SolverChoice::RKCK,
                              ToleranceSettings{}, 1, {}),
                    InvalidInterval);
}

TEST_CASE("stats track work per system") {
    const BatchStates b = decayBatch({1.0, 5.0});
    const BatchResult r = integrateBatch(problems::expDecay(), b, 0.0, 1.0,
                                         SolverChoice::RKC, ToleranceSettings{}, 1);
    for (const auto& st : r.stats) {
        CHECK(st.stepsAccepted > 0);
        CHECK(st.rhsEvals >= st.stepsAccepted);
        CHECK(st.specRadEvals > 0);
        CHECK(st.hMinSeen > 0.0);
        CHECK(st.hMaxSeen >= st.hMinSeen);
    }
}

TEST_CASE("tolerance settings are validated before integrating") {
    const BatchStates b = pack({{1.0}});
    ToleranceSettings tol;
    tol.eps = 0.0;
    CHECK_THROWS_AS(integrateBatch(zeroRhs(1), b, 0.0, 1.0, SolverChoice::RKCK, tol, 1),
                    InvalidShape);
    tol = ToleranceSettings{};
    tol.safety = 1.5;
    CHECK_THROWS_AS(tol.validate(), InvalidShape);
}

TEST_CASE("a pathological system freezes without stalling the batch") {
    // One system's rhs returns NaN; it must flag underflow while the other
    // system integrates normally.
    OdeProblem p;
    p.dim = 1;
    p.paramDim = 1;
    p.rhs = [](double, std::span<const double> y, std::span<const double> g,
               std::span<double> out) {
        out[0] = g[0] > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -y[0];
    };
    BatchStates b = pack({{1.0}, {1.0}}, {{1.0}, {0.0}});
    const BatchResult r = integrateBatch(p, b, 0.0, 1.0, SolverChoice::RKCK,
                                         ToleranceSettings{}, 2);
    CHECK(r.stats[0].underflow);
    CHECK(r.states.at(0, 0) == 1.0);  // frozen at the initial state
    CHECK(!r.stats[1].underflow);
    CHECK(testsupport::relDiff(r.states.at(1, 0), std::exp(-1.0)) < 1e-8);
}
