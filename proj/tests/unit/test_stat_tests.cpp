#include "qrng/errors.hpp"
#include "qrng/stat_tests.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

using namespace qrng;

namespace {

// Binary expansion of pi, the reference sequence of the standard test suite.
const std::string kPi100 =
    "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000";

BitVector pattern(std::size_t n, bool alternating, bool value) {
    BitVector v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, alternating ? (i % 2 == 1) : value);
    return v;
}

BitVector mt_bits(std::size_t n, std::mt19937_64& rng) {
    BitVector v(n);
    for (auto& w : v.words()) w = rng();
    v.resize(n);
    return v;
}

struct BatteryRun {
    std::vector<std::vector<double>> p = std::vector<std::vector<double>>(4);
    std::vector<int> passes = std::vector<int>(4, 0);
};

const BatteryRun& vetted_run() {
    static const BatteryRun run = [] {
        BatteryRun r;
        std::mt19937_64 rng(20261014);
        for (int s = 0; s < 100; ++s) {
            const auto results = run_battery(mt_bits(1'000'000, rng));
            for (int t = 0; t < 4; ++t) {
                r.p[t].push_back(results[t].p_value);
                r.passes[t] += results[t].pass;
            }
        }
        return r;
    }();
    return run;
}

const char* kNames[] = {"monobit", "block_frequency", "runs", "cumulative_sums"};

}  // namespace

TEST_CASE("known answers on the 100-bit reference sequence") {
    const auto bits = BitVector::from_string(kPi100);
    CHECK(monobit_frequency(bits).p_value == doctest::Approx(0.109599).epsilon(1e-5));
    CHECK(block_frequency(bits, 10).p_value == doctest::Approx(0.706438).epsilon(1e-5));
    CHECK(runs(bits).p_value == doctest::Approx(0.500798).epsilon(1e-5));
    CHECK(cumulative_sums(bits).p_value == doctest::Approx(0.219194).epsilon(1e-5));
}

TEST_CASE("alternating bits") {
    const auto alt = pattern(10000, true, false);
    const auto mono = monobit_frequency(alt);
    CHECK(mono.p_value == 1.0);
    CHECK_FALSE(mono.pass);
    const auto r = runs(alt);
    CHECK(r.p_value < kPassLow);
    CHECK_FALSE(r.pass);
}

TEST_CASE("constant bits fail every test") {
    for (bool value : {false, true}) {
        const auto bits = pattern(10000, false, value);
        for (const auto& r : run_battery(bits)) {
            CHECK_MESSAGE(!r.pass, r.test_name);
            CHECK(r.p_value < 1e-10);
        }
    }
}

TEST_CASE("pass band") {
    CHECK(make_result("x", 0.01).pass);
    CHECK(make_result("x", 0.99).pass);
    CHECK(make_result("x", 0.5).pass);
    CHECK_FALSE(make_result("x", 0.0099).pass);
    CHECK_FALSE(make_result("x", 0.991).pass);
    CHECK(make_result("x", 1.2).p_value == 1.0);
}

TEST_CASE("insufficient data") {
    const BitVector short_bits(99);
    CHECK_THROWS_AS(monobit_frequency(short_bits), InsufficientDataError);
    CHECK_THROWS_AS(block_frequency(short_bits), InsufficientDataError);
    CHECK_THROWS_AS(runs(short_bits), InsufficientDataError);
    CHECK_THROWS_AS(cumulative_sums(short_bits), InsufficientDataError);
    CHECK_THROWS_AS(block_frequency(BitVector(200), 201), InsufficientDataError);
    CHECK_NOTHROW(run_battery(BitVector(100)));
}


TEST_CASE("vetted generator: p-values are uniform") {
    const auto& run = vetted_run();
    for (int t = 0; t < 4; ++t) {
        CHECK_MESSAGE(oracle::ks_uniform(run.p[t]) < oracle::ks_critical_1pct(100),
                      std::string(kNames[t]));
    }
}

TEST_CASE("vetted generator: pass counts consistent with a 2% failure band") {
    // Bin(100, 0.98): P(passes <= 93) < 0.6%.
    const auto& run = vetted_run();
    for (int t = 0; t < 4; ++t) {
        CHECK_MESSAGE(run.passes[t] >= 94, std::string(kNames[t]) << " passed " << run.passes[t]);
    }
}

// An ideal source meets this in roughly 2 of 3 runs per test; the outcome is
// reported but does not fail the suite.
TEST_CASE("vetted generator: at least 98 of 100 pass each test" * doctest::may_fail()) {
    const auto& run = vetted_run();
    for (int t = 0; t < 4; ++t) {
        CHECK_MESSAGE(run.passes[t] >= 98, std::string(kNames[t]) << " passed " << run.passes[t]);
    }
}

TEST_CASE("deterministic and formatted") {
    std::mt19937_64 rng(7);
    const auto bits = mt_bits(5000, rng);
    const auto a = run_battery(bits);
    const auto b = run_battery(bits);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a[i].p_value == b[i].p_value);
    CHECK(a[0].test_name == "monobit");
    CHECK(a[3].test_name == "cumulative_sums");
    const auto text = format_results({make_result("runs", 0.5), make_result("monobit", 0.001)});
    CHECK(text == "runs p=0.500000 PASS\nmonobit p=0.001000 FAIL\n");
}
