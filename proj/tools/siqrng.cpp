#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "siqrng/config.hpp"
#include "siqrng/errors.hpp"
#include "siqrng/extractor.hpp"

namespace {

using namespace siqrng;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CommonOpts {
    std::string config_path;
    int threads = 0; // 0: SIQRNG_THREADS or 1
};

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("SIQRNG_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

// Per-field overrides: every config key is also a flag.
void add_config_overrides(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--mu", cfg.mu);
    cmd->add_option("--f_hz", cfg.f_hz);
    cmd->add_option("--t_s", cfg.t_s);
    cmd->add_option("--p_z", cfg.p_z);
    cmd->add_option("--eta_0", cfg.eta_0);
    cmd->add_option("--eta_1", cfg.eta_1);
    cmd->add_option("--eta_plus", cfg.eta_plus);
    cmd->add_option("--eta_minus", cfg.eta_minus);
    cmd->add_option("--y_0", cfg.y_0);
    cmd->add_option("--m0_z", cfg.m0_z);
    cmd->add_option("--m_minus_x", cfg.m_minus_x);
    cmd->add_option("--t_e", cfg.t_e);
    cmd->add_option("--overlap", cfg.overlap);
    cmd->add_option("--n_pulses", cfg.n_pulses);
    cmd->add_option("--seed", cfg.seed);
    cmd->add_option("--block_n", cfg.block_n);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << text << '\n';
    if (!os) throw io_error("write failed: " + path);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Source-independent QRNG modeling, simulation and post-processing toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    int threads_flag = 0;
    app.add_option("--config", config_path, "JSON config file")->capture_default_str();
    app.add_option("--threads", threads_flag, "worker thread cap (env SIQRNG_THREADS)");

    // Load the config file first so per-field flags override its values.
    RunConfig cfg;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = load_config(argv[i + 1]);
            } catch (const io_error& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitIo;
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitValidation;
            }
            break;
        }
    }

    // model-eval
    std::string eval_out;
    auto* eval = app.add_subcommand("model-eval", "analytic click model and rate report");
    eval->add_option("--out", eval_out, "report file (default stdout)");
    add_config_overrides(eval, cfg);

    // sweep
    double mu_min = 1.0, mu_max = 200.0;
    int sweep_points = 100;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "rate versus mean photon number");
    sweep->add_option("--mu-min", mu_min)->capture_default_str();
    sweep->add_option("--mu-max", mu_max)->capture_default_str();
    sweep->add_option("--points", sweep_points)->capture_default_str();
    sweep->add_option("--out", sweep_out, "table file (default stdout)");
    add_config_overrides(sweep, cfg);

    // simulate
    std::string sim_tally_out = "tally.json", sim_bits_out = "raw.bits";
    auto* sim = app.add_subcommand("simulate", "Monte Carlo pulse simulation");
    sim->add_option("--out-tally", sim_tally_out)->capture_default_str();
    sim->add_option("--out-bits", sim_bits_out)->capture_default_str();
    add_config_overrides(sim, cfg);

    // estimate
    std::string est_tally_in, est_out;
    auto* est = app.add_subcommand("estimate", "finite-key rate from a tally file");
    est->add_option("--tally", est_tally_in, "tally JSON file")->required();
    est->add_option("--out", est_out, "report file (default stdout)");
    add_config_overrides(est, cfg);

    // extract
    std::string ext_in, ext_seed_file, ext_out = "final.bits";
    double ext_ratio = -1.0;
    bool fresh_seed = false;
    auto* ext = app.add_subcommand("extract", "Toeplitz extraction of a bitstream");
    ext->add_option("--in", ext_in, "raw bitstream file")->required();
    ext->add_option("--seed-file", ext_seed_file,
                    "Toeplitz seed bitstream (default: derived from config seed)");
    ext->add_option("--ratio", ext_ratio,
                    "output/input ratio (default: analytic model rate)");
    ext->add_option("--out", ext_out)->capture_default_str();
    ext->add_flag("--fresh-seed", fresh_seed, "fresh Toeplitz seed per block");
    add_config_overrides(ext, cfg);

    // test
    std::string test_in, test_out;
    std::uint64_t sample_bits = 100000;
    double alpha = 0.01;
    auto* test = app.add_subcommand("test", "statistical randomness battery");
    test->add_option("--in", test_in, "bitstream file")->required();
    test->add_option("--sample-bits", sample_bits)->capture_default_str();
    test->add_option("--alpha", alpha)->capture_default_str();
    test->add_option("--out", test_out, "report file (default stdout)");
    add_config_overrides(test, cfg);

    // pipeline
    std::string pipe_bits_out = "final.bits", pipe_report_out, pipe_tally_out, pipe_raw_out;
    std::uint64_t pipe_sample_bits = 100000;
    double pipe_alpha = 0.01;
    bool pipe_fresh_seed = false;
    auto* pipe = app.add_subcommand("pipeline", "simulate, estimate, extract and test");
    pipe->add_option("--out-bits", pipe_bits_out)->capture_default_str();
    pipe->add_option("--out-report", pipe_report_out, "battery report (default stdout)");
    pipe->add_option("--out-tally", pipe_tally_out);
    pipe->add_option("--out-raw", pipe_raw_out);
    pipe->add_option("--sample-bits", pipe_sample_bits)->capture_default_str();
    pipe->add_option("--alpha", pipe_alpha)->capture_default_str();
    pipe->add_flag("--fresh-seed", pipe_fresh_seed);
    add_config_overrides(pipe, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.validate();
        const int threads = resolve_threads(threads_flag);

        if (*eval) {
            write_text(eval_out, model_eval_report_json(cfg));
            return kExitOk;
        }

        if (*sweep) {
            std::string table = "# mu\trate_bps\n";
            for (const auto& [mu, rate] : sweep_rates(cfg, mu_min, mu_max, sweep_points))
                table += std::to_string(mu) + "\t" + std::to_string(rate) + "\n";
            write_text(sweep_out, table);
            return kExitOk;
        }

        if (*sim) {
            auto [tally, raw] = simulate(cfg.system_model(), cfg.n_pulses, cfg.seed, threads);
            write_tally(sim_tally_out, tally);
            write_bitstream(sim_bits_out, raw.bits);
            std::cerr << "simulated " << tally.n_pulses << " pulses, "
                      << raw.bits.size() << " raw bits\n";
            return kExitOk;
        }

        if (*est) {
            const ClickTally tally = read_tally(est_tally_in);
            const EstimationInput input = tally_to_estimation_input(tally, cfg.system_model());
            const SecurityParams sec = cfg.security_params();
            const double theta = solve_theta(input, sec.theta_target());
            write_text(est_out, rate_report_json(cfg, input, final_rate(input, sec, theta)));
            return kExitOk;
        }

        if (*ext) {
            const BitBuffer input = read_bitstream(ext_in);
            std::uint64_t m_per_block;
            if (ext_ratio >= 0.0) {
                if (ext_ratio > 1.0) throw invalid_parameter("--ratio must be <= 1");
                m_per_block = static_cast<std::uint64_t>(
                    static_cast<double>(cfg.block_n) * ext_ratio);
            } else {
                m_per_block = plan_extraction(analytic_rate(cfg), cfg.block_n).m_per_block;
            }
            const std::uint64_t need =
                seed_bits_for_stream(input.size(), cfg.block_n, m_per_block, fresh_seed);
            const BitBuffer seed_bits = ext_seed_file.empty()
                                            ? derive_toeplitz_seed_bits(cfg.seed, need)
                                            : read_bitstream(ext_seed_file);
            const BitBuffer out =
                extract_stream(input, seed_bits, cfg.block_n, m_per_block, fresh_seed);
            write_bitstream(ext_out, out);
            std::cerr << "extracted " << out.size() << " bits from " << input.size() << "\n";
            return kExitOk;
        }

        if (*test) {
            const BitBuffer bits = read_bitstream(test_in);
            const auto reports = run_battery(bits, sample_bits, alpha);
            write_text(test_out, battery_report_json(cfg, reports));
            return battery_passed(reports) ? kExitOk : kExitValidation;
        }

        if (*pipe) {
            const PipelineResult r =
                run_pipeline(cfg, threads, pipe_fresh_seed, pipe_sample_bits, pipe_alpha);
            write_bitstream(pipe_bits_out, r.final_bits);
            if (!pipe_tally_out.empty()) write_tally(pipe_tally_out, r.tally);
            if (!pipe_raw_out.empty()) write_bitstream(pipe_raw_out, r.raw_bits);
            if (r.battery.empty()) {
                std::cerr << "battery skipped: fewer than 10 samples of "
                          << pipe_sample_bits << " bits\n";
                write_text(pipe_report_out, rate_report_json(cfg, r.estimation, r.rate));
                return kExitOk;
            }
            write_text(pipe_report_out, battery_report_json(cfg, r.battery));
            std::cerr << "final bits: " << r.final_bits.size()
                      << ", rate_bps: " << r.rate.rate_bps
                      << ", battery: " << (r.battery_pass ? "pass" : "FAIL") << "\n";
            return r.battery_pass ? kExitOk : kExitValidation;
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
