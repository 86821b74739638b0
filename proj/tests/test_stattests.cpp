#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "siqrng/errors.hpp"
#include "siqrng/stattests.hpp"

using namespace siqrng;

namespace {

std::vector<std::uint8_t> random_sample(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return bits;
}

BitBuffer random_buffer(std::mt19937_64& rng, std::uint64_t n) {
    BitBuffer b(n);
    for (std::uint64_t i = 0; i < n; ++i) b.set(i, rng() & 1u);
    return b;
}

} // namespace

TEST_CASE("monobit") {
    std::vector<std::uint8_t> balanced(200);
    for (std::size_t i = 0; i < 100; ++i) balanced[i] = 1;
    CHECK(monobit_p_value(balanced) == doctest::Approx(1.0));

    const std::vector<std::uint8_t> ones(100, 1);
    // erfc(10 / sqrt(2)), frozen from direct evaluation.
    CHECK(monobit_p_value(ones) == doctest::Approx(1.5239706048e-23).epsilon(1e-6));

    CHECK_THROWS_AS(monobit_p_value(std::vector<std::uint8_t>(50, 1)), invalid_parameter);
}

TEST_CASE("ks uniformity") {
    // Perfect uniform grid 0.05 .. 0.95: the maximum ECDF gap is 0.05.
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back(0.05 + 0.1 * i);
    CHECK(ks_uniformity(grid) > 0.99);

    // Degenerate distribution: KS statistic 0.5, p ~ 0 for large n.
    CHECK(ks_uniformity(std::vector<double>(1000, 0.5)) < 1e-10);

    CHECK_THROWS_AS(ks_uniformity({0.1, 0.2}), degenerate_input);

    // Uniform pseudo-random p-values are accepted in at least 99% of seeds.
    int rejections = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> ps(1000);
        for (auto& p : ps) p = unit(rng);
        if (ks_uniformity(ps) < 0.01) ++rejections;
    }
    CHECK(rejections <= 1);
}

TEST_CASE("per-test p-values are sane on random input") {
    std::mt19937_64 rng(2718);
    const auto bits = random_sample(rng, 100000);
    const Sample s(bits);
    for (double p : {monobit_p_value(s), block_frequency_p_value(s), runs_p_value(s),
                     longest_run_p_value(s), approximate_entropy_p_value(s, 10),
                     spectral_p_value(s)}) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p > 1e-6); // genuinely random input should not be rejected hard
    }
    for (double p : cumulative_sums_p_values(s)) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    for (double p : serial_p_values(s, 13)) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("structured inputs are rejected") {
    // Alternating pattern: perfect frequency, catastrophic runs/serial.
    std::vector<std::uint8_t> alt(10000);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i & 1;
    CHECK(monobit_p_value(alt) == doctest::Approx(1.0));
    CHECK(runs_p_value(alt) < 1e-10);
    CHECK(serial_p_values(alt, 5)[0] < 1e-10);
    CHECK(approximate_entropy_p_value(alt, 5) < 1e-10);
    CHECK(spectral_p_value(alt) < 1e-3);

    std::vector<std::uint8_t> zeros(10000, 0);
    CHECK(monobit_p_value(zeros) < 1e-20);
    CHECK(cumulative_sums_p_values(zeros)[0] < 1e-10);
    CHECK(longest_run_p_value(zeros) < 1e-10);
}

TEST_CASE("battery interval matches the published confidence bound") {
    // 1500 samples at alpha = 0.01: (1 - a) +- 3 sqrt((1-a) a / n) = 0.99 +- 0.00944.
    std::mt19937_64 rng(31415);
    const BitBuffer bits = random_buffer(rng, 1500 * 1000);
    const auto reports = run_battery(bits, 1000, 0.01);
    REQUIRE(reports.size() == 8);
    for (const auto& r : reports) {
        if (r.name == "frequency") {
            CHECK(r.p_values.size() == 1500);
            CHECK(r.interval_lo == doctest::Approx(0.99 - 0.00944).epsilon(1e-3));
            CHECK(r.interval_hi == doctest::Approx(0.99 + 0.00944).epsilon(1e-3));
        }
        if (r.name == "cumulative-sums") CHECK(r.p_values.size() == 3000);
    }
}

TEST_CASE("battery passes on unbiased pseudo-random input") {
    std::mt19937_64 rng(99991);
    const BitBuffer bits = random_buffer(rng, 500 * 1000);
    const auto reports = run_battery(bits, 1000, 0.01);
    for (const auto& r : reports) {
        INFO(r.name, " proportion=", r.proportion, " ks=", r.ks_p);
        CHECK(r.pass);
        // Rejection rate within 3 sigma of alpha.
        CHECK(r.proportion >= r.interval_lo);
        CHECK(r.proportion <= r.interval_hi);
    }
    CHECK(battery_passed(reports));
}

TEST_CASE("battery fails on an all-zero stream") {
    const BitBuffer zeros(100 * 1000);
    const auto reports = run_battery(zeros, 1000, 0.01);
    for (const auto& r : reports) {
        if (r.name == "frequency") {
            CHECK(r.proportion == 0.0);
            CHECK_FALSE(r.pass);
        }
    }
    CHECK_FALSE(battery_passed(reports));
}

TEST_CASE("battery is deterministic") {
    std::mt19937_64 rng(7);
    const BitBuffer bits = random_buffer(rng, 20 * 1000);
    const auto a = run_battery(bits, 1000, 0.01);
    const auto b = run_battery(bits, 1000, 0.01);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].p_values == b[i].p_values);
    }
}

TEST_CASE("battery input validation") {
    std::mt19937_64 rng(8);
    const BitBuffer bits = random_buffer(rng, 5000);
    CHECK_THROWS_AS(run_battery(bits, 1000, 0.0), invalid_parameter);
    CHECK_THROWS_AS(run_battery(bits, 1000, 0.2), invalid_parameter);
    CHECK_THROWS_AS(run_battery(bits, 10000, 0.01), invalid_parameter);
    CHECK_THROWS_AS(run_battery(bits, 1000, 0.01), degenerate_input); // 5 samples
}
