#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "siqrng/model.hpp"
#include "siqrng/montecarlo.hpp"
#include "siqrng/security.hpp"
#include "siqrng/stattests.hpp"

namespace siqrng {

// Full run configuration. The JSON config file uses exactly these key
// names; unknown keys are rejected so typos cannot silently fall back to
// defaults. Defaults reproduce the reference experiment.
struct RunConfig {
    double mu = 36.58;
    double f_hz = 50e6;
    double t_s = 200.0;
    double p_z = 0.5283;
    double eta_0 = 0.0176;
    double eta_1 = 0.0156;
    double eta_plus = 0.0179;
    double eta_minus = 0.0179;
    double y_0 = 0.0;
    double m0_z = 0.4718;
    double m_minus_x = 0.0012;
    int t_e = 100;
    double overlap = kComplementaryOverlap;
    std::uint64_t n_pulses = 100000000;
    std::uint64_t seed = 1;
    std::uint64_t block_n = 1u << 20;

    SystemModel system_model() const;
    SecurityParams security_params() const;
    void validate() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);

// Tally file: JSON object with the event-class counts as exact integers.
void write_tally(const std::filesystem::path& path, const ClickTally& tally);
ClickTally read_tally(const std::filesystem::path& path);

// Report files carry the resolved config alongside the results.
std::string model_eval_report_json(const RunConfig& cfg);
std::string rate_report_json(const RunConfig& cfg, const EstimationInput& input,
                             const RateReport& report);
std::string battery_report_json(const RunConfig& cfg,
                                const std::vector<TestReport>& reports);

struct PipelineResult {
    ClickTally tally;
    EstimationInput estimation;
    RateReport rate;
    BitBuffer raw_bits;
    BitBuffer final_bits;
    std::vector<TestReport> battery;
    bool battery_pass = false;
};

// simulate -> estimate -> solve theta -> final rate -> extract -> battery.
// Deterministic for a given (config, seed) regardless of thread count.
PipelineResult run_pipeline(const RunConfig& cfg, int threads = 1,
                            bool fresh_seed_per_block = false,
                            std::uint64_t battery_sample_bits = 100000,
                            double battery_alpha = 0.01);

// Expands block_n + m - 1 Toeplitz seed bits from the run seed on a
// dedicated substream. Not a cryptographic seed source.
BitBuffer derive_toeplitz_seed_bits(std::uint64_t seed, std::uint64_t nbits);

// (mu, rate_bps) rows of the analytic model across a photon-number grid.
std::vector<std::pair<double, double>> sweep_rates(const RunConfig& cfg, double mu_min,
                                                   double mu_max, int points);

// Analytic pipeline at one operating point: expected tally -> estimation
// input -> theta -> rate.
RateReport analytic_rate(const RunConfig& cfg);
EstimationInput analytic_estimation_input(const RunConfig& cfg);

} // namespace siqrng
