#include <utility>

#include "siqrng/config.hpp"
#include "siqrng/errors.hpp"
#include "siqrng/extractor.hpp"

namespace siqrng {

EstimationInput analytic_estimation_input(const RunConfig& cfg) {
    const SystemModel model = cfg.system_model();
    const ClickProbabilities p = click_probabilities(model);
    const ExpectedTally tally = expected_tally(model);

    EstimationInput input;
    input.n_total = tally.n_z_tol() + tally.n_x_tol();
    input.p_x = model.p_x();
    input.e_bx = x_basis_qber(p);
    input.n_z_single = tally.n_z_single();
    input.eta_0 = model.eta_0;
    input.eta_1 = model.eta_1;
    input.t_s = model.t_s;
    return input;
}

RateReport analytic_rate(const RunConfig& cfg) {
    const EstimationInput input = analytic_estimation_input(cfg);
    const SecurityParams sec = cfg.security_params();
    const double theta = solve_theta(input, sec.theta_target());
    return final_rate(input, sec, theta);
}

std::vector<std::pair<double, double>> sweep_rates(const RunConfig& cfg, double mu_min,
                                                   double mu_max, int points) {
    if (!(mu_min >= 0.0 && mu_min < mu_max))
        throw invalid_parameter("need 0 <= mu_min < mu_max");
    if (points < 2) throw invalid_parameter("points must be >= 2");

    std::vector<std::pair<double, double>> rows;
    rows.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        RunConfig point = cfg;
        point.mu = mu_min + (mu_max - mu_min) * i / (points - 1);
        double rate = 0.0;
        if (point.mu > 0.0) {
            try {
                rate = analytic_rate(point).rate_bps;
            } catch (const no_solution&) {
                rate = 0.0; // QBER too high for the bound at this mu
            }
        }
        rows.emplace_back(point.mu, rate);
    }
    return rows;
}

BitBuffer derive_toeplitz_seed_bits(std::uint64_t seed, std::uint64_t nbits) {
    SubstreamRng rng(seed, 0x746f65706cull); // "toepl" stream, disjoint from pulse chunks
    std::vector<std::uint64_t> words((nbits + 63) / 64);
    for (auto& w : words) w = rng.next_u64();
    if (nbits % 64) words.back() &= (~0ull) >> (64 - nbits % 64);
    return BitBuffer::from_words(words, nbits);
}

PipelineResult run_pipeline(const RunConfig& cfg, int threads, bool fresh_seed_per_block,
                            std::uint64_t battery_sample_bits, double battery_alpha) {
    cfg.validate();
    PipelineResult result;

    auto [tally, raw] = simulate(cfg.system_model(), cfg.n_pulses, cfg.seed, threads);
    result.tally = tally;
    result.raw_bits = std::move(raw.bits);

    result.estimation = tally_to_estimation_input(result.tally, cfg.system_model());
    const SecurityParams sec = cfg.security_params();
    const double theta = solve_theta(result.estimation, sec.theta_target());
    result.rate = final_rate(result.estimation, sec, theta);

    const ExtractionPlan plan = plan_extraction(result.rate, cfg.block_n);
    const std::uint64_t seed_bits = seed_bits_for_stream(
        result.raw_bits.size(), cfg.block_n, plan.m_per_block, fresh_seed_per_block);
    const BitBuffer toeplitz = derive_toeplitz_seed_bits(cfg.seed, seed_bits);
    result.final_bits = extract_stream(result.raw_bits, toeplitz, cfg.block_n,
                                       plan.m_per_block, fresh_seed_per_block);

    if (result.final_bits.size() >= 10 * battery_sample_bits) {
        result.battery = run_battery(result.final_bits, battery_sample_bits, battery_alpha);
        result.battery_pass = battery_passed(result.battery);
    }
    return result;
}

} // namespace siqrng
