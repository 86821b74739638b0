#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "siqrng/errors.hpp"
#include "siqrng/montecarlo.hpp"

using namespace siqrng;

namespace {

SystemModel reference_model(double mu = 36.58) {
    SystemModel m;
    m.mu = mu;
    m.f_hz = 50e6;
    m.t_s = 200.0;
    m.p_z = 0.5283;
    m.eta_0 = 0.0176;
    m.eta_1 = 0.0156;
    m.eta_plus = 0.0179;
    m.eta_minus = 0.0179;
    m.y_0 = 0.0;
    m.m0_z = 0.4718;
    m.m_minus_x = 0.0012;
    return m;
}

struct ClassProb {
    const char* name;
    double p;
    std::uint64_t ClickTally::*count;
};

// Analytic per-pulse probabilities of all disjoint event classes.
std::vector<ClassProb> class_probs(const SystemModel& m) {
    const ClickProbabilities p = click_probabilities(m);
    const BasisEventProbabilities q = basis_event_probabilities(p);
    const double z_any = 1.0 - (1.0 - p.p0) * (1.0 - p.p1);
    const double x_any = 1.0 - (1.0 - p.p_plus) * (1.0 - p.p_minus);
    return {
        {"n_h_s", q.q_h, &ClickTally::n_h_s},
        {"n_v_s", q.q_v, &ClickTally::n_v_s},
        {"n_d_s", q.q_d, &ClickTally::n_d_s},
        {"n_a_s", q.q_a, &ClickTally::n_a_s},
        {"n_z_d", q.q_z_double, &ClickTally::n_z_d},
        {"n_x_d", q.q_x_double, &ClickTally::n_x_d},
        {"n_cross", z_any * x_any, &ClickTally::n_cross},
        {"n_vacuum", (1.0 - z_any) * (1.0 - x_any), &ClickTally::n_vacuum},
    };
}

} // namespace

TEST_CASE("vacuum source produces nothing") {
    SystemModel m = reference_model(0.0);
    const auto [tally, raw] = simulate(m, 10000, 42);
    CHECK(tally.n_vacuum == 10000);
    CHECK(tally.n_pulses == 10000);
    CHECK(tally.n_z_single() == 0);
    CHECK(tally.n_cross == 0);
    CHECK(raw.bits.size() == 0);
}

TEST_CASE("same seed, same output") {
    const SystemModel m = reference_model();
    const auto [t1, r1] = simulate(m, 300000, 12345);
    const auto [t2, r2] = simulate(m, 300000, 12345);
    CHECK(t1.n_h_s == t2.n_h_s);
    CHECK(t1.n_cross == t2.n_cross);
    CHECK(r1.bits == r2.bits);

    const auto [t3, r3] = simulate(m, 300000, 54321);
    CHECK(r1.bits.size() > 0);
    CHECK(!(r1.bits == r3.bits));
}

TEST_CASE("tally classes partition the pulses") {
    const auto [t, raw] = simulate(reference_model(), 2500000, 9);
    CHECK(t.n_h_s + t.n_v_s + t.n_d_s + t.n_a_s + t.n_z_d + t.n_x_d + t.n_cross +
              t.n_vacuum ==
          t.n_pulses);
    CHECK(raw.bits.size() == t.n_z_single());
}

TEST_CASE("event frequencies track the analytic probabilities") {
    const SystemModel m = reference_model();
    const std::uint64_t n = 4000000;
    const auto [tally, raw] = simulate(m, n, 2024);
    for (const auto& c : class_probs(m)) {
        const double freq = static_cast<double>(tally.*(c.count)) / static_cast<double>(n);
        const double sigma = std::sqrt(c.p * (1.0 - c.p) / static_cast<double>(n));
        INFO(c.name);
        CHECK(std::abs(freq - c.p) <= 3.0 * sigma);
    }
}

TEST_CASE("frequencies stay within 3 sigma for 99% of seeds" * doctest::skip(false)) {
    const SystemModel m = reference_model();
    const std::uint64_t n = 1000000;
    const auto classes = class_probs(m);
    std::vector<int> failures(classes.size(), 0);
    int ones_failures = 0;
    const BasisEventProbabilities q = basis_event_probabilities(click_probabilities(m));
    const double ones_expected = q.q_v / (q.q_h + q.q_v);

    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto [tally, raw] = simulate(m, n, seed);
        for (std::size_t k = 0; k < classes.size(); ++k) {
            const double p = classes[k].p;
            const double freq =
                static_cast<double>(tally.*(classes[k].count)) / static_cast<double>(n);
            if (std::abs(freq - p) > 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n)))
                ++failures[k];
        }
        const double nb = static_cast<double>(raw.bits.size());
        const double ones = static_cast<double>(raw.bits.count_ones()) / nb;
        if (std::abs(ones - ones_expected) >
            3.0 * std::sqrt(ones_expected * (1.0 - ones_expected) / nb))
            ++ones_failures;
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        INFO(classes[k].name);
        CHECK(failures[k] <= 1);
    }
    CHECK(ones_failures <= 1);
}

TEST_CASE("worker count does not change the output") {
    const SystemModel m = reference_model();
    const std::uint64_t n = 3 * kChunkPulses + 4567; // partial final chunk
    const auto [t1, r1] = simulate(m, n, 77, 1);
    for (int threads : {2, 8}) {
        const auto [tk, rk] = simulate(m, n, 77, threads);
        CHECK(tk.n_h_s == t1.n_h_s);
        CHECK(tk.n_vacuum == t1.n_vacuum);
        CHECK(rk.bits == r1.bits);
    }
}

TEST_CASE("tally to estimation input") {
    const SystemModel m = reference_model();
    ClickTally t;
    t.n_d_s = 1000;
    CHECK(tally_to_estimation_input(t, m).e_bx == 0.0);

    t = ClickTally{};
    t.n_x_d = 50;
    t.n_h_s = 10;
    t.n_v_s = 10;
    CHECK(tally_to_estimation_input(t, m).e_bx == doctest::Approx(0.5));

    // Reference run tallies give the published 0.124% QBER.
    t = ClickTally{};
    t.n_a_s = 2020000;
    t.n_d_s = 1920000000;
    t.n_x_d = 728000;
    t.n_h_s = 929000000;
    t.n_v_s = 923000000;
    t.n_z_d = 161000000;
    const EstimationInput in = tally_to_estimation_input(t, m);
    CHECK(in.e_bx == doctest::Approx(0.00124).epsilon(0.005));
    CHECK(in.n_z_single == doctest::Approx(1.852e9).epsilon(1e-6));
    CHECK(in.n_total ==
          doctest::Approx(1.852e9 + 161000000.0 + 2020000.0 + 1920000000.0 + 728000.0));
    CHECK(in.p_x == doctest::Approx(m.p_x()));

    CHECK_THROWS_AS(tally_to_estimation_input(ClickTally{}, m), degenerate_input);
}

TEST_CASE("double click assignment") {
    RawBits raw;
    raw.bits.push_back(true);
    raw.bits.push_back(false);

    ClickTally t;
    t.n_z_d = 0;
    CHECK(double_click_assignment(raw, t, 5).bits == raw.bits);

    t.n_z_d = 10;
    const RawBits a = double_click_assignment(raw, t, 5);
    const RawBits b = double_click_assignment(raw, t, 5);
    CHECK(a.bits.size() == 12);
    CHECK(a.bits == b.bits);

    // Appended bits are unbiased.
    t.n_z_d = 100000;
    const RawBits big = double_click_assignment(RawBits{}, t, 5);
    const double ones = static_cast<double>(big.bits.count_ones()) / 100000.0;
    CHECK(std::abs(ones - 0.5) <= 3.0 * std::sqrt(0.25 / 100000.0));
}

TEST_CASE("invalid model is rejected before sampling") {
    SystemModel m = reference_model();
    m.p_z = 1.5;
    CHECK_THROWS_AS(simulate(m, 100, 1), invalid_parameter);
    CHECK_THROWS_AS(simulate(reference_model(), 0, 1), invalid_parameter);
}
