#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "siqrng/config.hpp"
#include "siqrng/errors.hpp"

using namespace siqrng;
namespace fs = std::filesystem;

namespace {

struct TempFile {
    fs::path path;
    explicit TempFile(const char* name) : path(fs::temp_directory_path() / name) {}
    ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

} // namespace

TEST_CASE("config round-trip is semantically identical") {
    RunConfig cfg;
    cfg.mu = 12.5;
    cfg.seed = 999;
    cfg.overlap = 0.75;
    cfg.t_e = 64;
    const RunConfig back = parse_config_json(config_to_json(cfg));
    CHECK(back.mu == cfg.mu);
    CHECK(back.f_hz == cfg.f_hz);
    CHECK(back.t_s == cfg.t_s);
    CHECK(back.p_z == cfg.p_z);
    CHECK(back.eta_0 == cfg.eta_0);
    CHECK(back.eta_1 == cfg.eta_1);
    CHECK(back.eta_plus == cfg.eta_plus);
    CHECK(back.eta_minus == cfg.eta_minus);
    CHECK(back.y_0 == cfg.y_0);
    CHECK(back.m0_z == cfg.m0_z);
    CHECK(back.m_minus_x == cfg.m_minus_x);
    CHECK(back.t_e == cfg.t_e);
    CHECK(back.overlap == cfg.overlap);
    CHECK(back.n_pulses == cfg.n_pulses);
    CHECK(back.seed == cfg.seed);
    CHECK(back.block_n == cfg.block_n);
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"muu": 1.0})"),
                         doctest::Contains("muu"), invalid_parameter);
    CHECK_THROWS_WITH_AS(parse_config_json(R"({"eta_0": 1.5})"),
                         doctest::Contains("eta_0"), invalid_parameter);
    CHECK_THROWS_AS(parse_config_json("{nonsense"), io_error);
    CHECK_THROWS_AS(parse_config_json("[1,2]"), io_error);
    // Partial configs fall back to defaults for missing keys.
    CHECK(parse_config_json(R"({"mu": 2.0})").mu == 2.0);
    CHECK(parse_config_json(R"({"mu": 2.0})").t_e == 100);
}

TEST_CASE("bitstream file format is bit-exact") {
    TempFile f("siqrng_test_bits.bits");
    BitBuffer bits;
    for (int i = 0; i < 13; ++i) bits.push_back(i % 3 == 0);
    write_bitstream(f.path, bits);

    // 16-byte header: "SIQB", version 1, reserved 0, length 13, little-endian.
    std::ifstream is(f.path, std::ios::binary);
    unsigned char header[16];
    is.read(reinterpret_cast<char*>(header), 16);
    CHECK(header[0] == 'S');
    CHECK(header[1] == 'I');
    CHECK(header[2] == 'Q');
    CHECK(header[3] == 'B');
    CHECK(header[4] == 1);
    CHECK(header[5] == 0);
    CHECK(header[6] == 0);
    CHECK(header[7] == 0);
    CHECK(header[8] == 13);
    for (int i = 9; i < 16; ++i) CHECK(header[i] == 0);
    // Payload: bits 0,3,6,9,12 set -> bytes 0b01001001, 0b00010010.
    unsigned char payload[2];
    is.read(reinterpret_cast<char*>(payload), 2);
    CHECK(payload[0] == 0x49);
    CHECK(payload[1] == 0x12);

    CHECK(read_bitstream(f.path) == bits);
}

TEST_CASE("bitstream errors") {
    CHECK_THROWS_AS(read_bitstream("/nonexistent/siqrng.bits"), io_error);
    TempFile f("siqrng_bad_magic.bits");
    std::ofstream(f.path, std::ios::binary) << "NOPE          garbage";
    CHECK_THROWS_AS(read_bitstream(f.path), io_error);
}

TEST_CASE("tally file round trip keeps exact integer counts") {
    TempFile f("siqrng_tally.json");
    ClickTally t;
    t.n_h_s = (1ull << 53) + 7; // beyond double-exact range
    t.n_v_s = 2;
    t.n_d_s = 3;
    t.n_a_s = 4;
    t.n_z_d = 5;
    t.n_x_d = 6;
    t.n_cross = 7;
    t.n_pulses = (1ull << 53) + 34;
    t.n_vacuum = 0;
    write_tally(f.path, t);
    const ClickTally back = read_tally(f.path);
    CHECK(back.n_h_s == t.n_h_s);
    CHECK(back.n_pulses == t.n_pulses);
    CHECK(back.n_x_d == t.n_x_d);
}

TEST_CASE("reports embed the resolved config for provenance") {
    RunConfig cfg;
    cfg.mu = 3.25;
    const auto j = nlohmann::json::parse(model_eval_report_json(cfg));
    CHECK(j.at("config").at("mu").get<double>() == 3.25);
    CHECK(j.at("config").at("t_e").get<int>() == 100);
    CHECK(j.contains("expected_tally"));
    CHECK(j.contains("rate"));
}

TEST_CASE("sweep emits the requested grid") {
    RunConfig cfg;
    const auto rows = sweep_rates(cfg, 1.0, 200.0, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows.front().first == 1.0);
    CHECK(rows.back().first == 200.0);
    CHECK_THROWS_AS(sweep_rates(cfg, 5.0, 5.0, 10), invalid_parameter);
    CHECK_THROWS_AS(sweep_rates(cfg, 1.0, 2.0, 1), invalid_parameter);
}

TEST_CASE("analytic rate matches the reference decade") {
    RunConfig cfg;
    const RateReport r = analytic_rate(cfg);
    CHECK(r.rate_bps == doctest::Approx(8.57e6).epsilon(0.01));

    RunConfig zero = cfg;
    zero.mu = 0.0;
    CHECK_THROWS_AS(analytic_rate(zero), degenerate_input); // no clicks at all
}

TEST_CASE("pipeline is deterministic and consistent at small scale") {
    RunConfig cfg;
    cfg.n_pulses = 3000000;
    cfg.seed = 4242;
    const PipelineResult a = run_pipeline(cfg, 1);
    const PipelineResult b = run_pipeline(cfg, 2);
    CHECK(a.final_bits == b.final_bits);
    CHECK(a.raw_bits == b.raw_bits);
    CHECK(a.tally.n_h_s == b.tally.n_h_s);

    // Extraction kept the planned ratio.
    const double ratio = a.rate.extractable_bits / a.rate.n_z_single;
    const double got = static_cast<double>(a.final_bits.size()) /
                       static_cast<double>(a.raw_bits.size());
    CHECK(std::abs(got - ratio) < 1e-3);
}

TEST_CASE("pipeline fails cleanly on a dead detector setup") {
    RunConfig cfg;
    cfg.n_pulses = 100000;
    cfg.eta_plus = 0.0;
    cfg.eta_minus = 0.0;
    cfg.y_0 = 0.0;
    CHECK_THROWS_AS(run_pipeline(cfg, 1), degenerate_input);
}
