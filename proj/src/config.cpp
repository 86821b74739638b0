#include "siqrng/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "siqrng/errors.hpp"

namespace siqrng {

using nlohmann::json;

SystemModel RunConfig::system_model() const {
    return SystemModel{mu, f_hz, t_s, p_z, eta_0, eta_1, eta_plus, eta_minus,
                       y_0, m0_z, m_minus_x};
}

SecurityParams RunConfig::security_params() const {
    SecurityParams sec;
    sec.t_e = t_e;
    sec.overlap = overlap;
    return sec;
}

void RunConfig::validate() const {
    system_model().validate();
    security_params().validate();
    if (block_n < 1) throw invalid_parameter("block_n must be >= 1");
}

namespace {

const std::set<std::string> kKnownKeys = {
    "mu",  "f_hz",  "t_s",       "p_z",       "eta_0",    "eta_1",
    "eta_plus", "eta_minus", "y_0", "m0_z", "m_minus_x", "t_e",
    "overlap",  "n_pulses",  "seed", "block_n"};

} // namespace

RunConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw io_error(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw io_error("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!kKnownKeys.count(key))
            throw invalid_parameter("unknown config key: " + key);
    }

    RunConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("mu", cfg.mu);
    get("f_hz", cfg.f_hz);
    get("t_s", cfg.t_s);
    get("p_z", cfg.p_z);
    get("eta_0", cfg.eta_0);
    get("eta_1", cfg.eta_1);
    get("eta_plus", cfg.eta_plus);
    get("eta_minus", cfg.eta_minus);
    get("y_0", cfg.y_0);
    get("m0_z", cfg.m0_z);
    get("m_minus_x", cfg.m_minus_x);
    get("t_e", cfg.t_e);
    get("overlap", cfg.overlap);
    get("n_pulses", cfg.n_pulses);
    get("seed", cfg.seed);
    get("block_n", cfg.block_n);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open config: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_json(ss.str());
}

namespace {

json config_json(const RunConfig& cfg) {
    return json{{"mu", cfg.mu},
                {"f_hz", cfg.f_hz},
                {"t_s", cfg.t_s},
                {"p_z", cfg.p_z},
                {"eta_0", cfg.eta_0},
                {"eta_1", cfg.eta_1},
                {"eta_plus", cfg.eta_plus},
                {"eta_minus", cfg.eta_minus},
                {"y_0", cfg.y_0},
                {"m0_z", cfg.m0_z},
                {"m_minus_x", cfg.m_minus_x},
                {"t_e", cfg.t_e},
                {"overlap", cfg.overlap},
                {"n_pulses", cfg.n_pulses},
                {"seed", cfg.seed},
                {"block_n", cfg.block_n}};
}

} // namespace

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2); }

void write_tally(const std::filesystem::path& path, const ClickTally& tally) {
    const json j{{"n_h_s", tally.n_h_s},     {"n_v_s", tally.n_v_s},
                 {"n_d_s", tally.n_d_s},     {"n_a_s", tally.n_a_s},
                 {"n_z_d", tally.n_z_d},     {"n_x_d", tally.n_x_d},
                 {"n_cross", tally.n_cross}, {"n_pulses", tally.n_pulses},
                 {"n_vacuum", tally.n_vacuum}};
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os << j.dump(2) << '\n';
    if (!os) throw io_error("write failed: " + path.string());
}

ClickTally read_tally(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open tally: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw io_error(std::string("tally parse error: ") + e.what());
    }
    ClickTally t;
    try {
        t.n_h_s = j.at("n_h_s").get<std::uint64_t>();
        t.n_v_s = j.at("n_v_s").get<std::uint64_t>();
        t.n_d_s = j.at("n_d_s").get<std::uint64_t>();
        t.n_a_s = j.at("n_a_s").get<std::uint64_t>();
        t.n_z_d = j.at("n_z_d").get<std::uint64_t>();
        t.n_x_d = j.at("n_x_d").get<std::uint64_t>();
        t.n_cross = j.value("n_cross", std::uint64_t{0});
        t.n_pulses = j.value("n_pulses", std::uint64_t{0});
        t.n_vacuum = j.value("n_vacuum", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw io_error(std::string("tally field error: ") + e.what());
    }
    return t;
}

namespace {

json rate_json(const RateReport& r) {
    return json{{"theta", r.theta},
                {"epsilon_theta", r.epsilon_theta},
                {"extractable_bits", r.extractable_bits},
                {"rate_bps", r.rate_bps},
                {"epsilon_total", r.epsilon_total},
                {"n_z_single", r.n_z_single},
                {"t_s", r.t_s}};
}

json estimation_json(const EstimationInput& e) {
    return json{{"n_total", e.n_total}, {"p_x", e.p_x},
                {"e_bx", e.e_bx},       {"n_z_single", e.n_z_single},
                {"eta_0", e.eta_0},     {"eta_1", e.eta_1},
                {"t_s", e.t_s}};
}

} // namespace

std::string model_eval_report_json(const RunConfig& cfg) {
    const SystemModel model = cfg.system_model();
    const ClickProbabilities p = click_probabilities(model);
    const BasisEventProbabilities q = basis_event_probabilities(p);
    const ExpectedTally tally = expected_tally(model);
    const EstimationInput input = analytic_estimation_input(cfg);
    const double theta = solve_theta(input, cfg.security_params().theta_target());
    const RateReport rate = final_rate(input, cfg.security_params(), theta);

    json j;
    j["config"] = config_json(cfg);
    j["click_probabilities"] = {
        {"p0", p.p0}, {"p1", p.p1}, {"p_plus", p.p_plus}, {"p_minus", p.p_minus}};
    j["event_probabilities"] = {{"q_z_single", q.q_z_single},
                                {"q_z_double", q.q_z_double},
                                {"q_x_single", q.q_x_single},
                                {"q_x_double", q.q_x_double},
                                {"q_h", q.q_h},
                                {"q_v", q.q_v},
                                {"q_d", q.q_d},
                                {"q_a", q.q_a}};
    j["x_basis_qber"] = x_basis_qber(p);
    j["expected_tally"] = {{"n_h_s", tally.n_h_s},   {"n_v_s", tally.n_v_s},
                           {"n_d_s", tally.n_d_s},   {"n_a_s", tally.n_a_s},
                           {"n_z_d", tally.n_z_d},   {"n_x_d", tally.n_x_d},
                           {"n_z_tol", tally.n_z_tol()}, {"n_x_tol", tally.n_x_tol()}};
    j["estimation_input"] = estimation_json(input);
    j["rate"] = rate_json(rate);
    return j.dump(2);
}

std::string rate_report_json(const RunConfig& cfg, const EstimationInput& input,
                             const RateReport& report) {
    json j;
    j["config"] = config_json(cfg);
    j["estimation_input"] = estimation_json(input);
    j["rate"] = rate_json(report);
    return j.dump(2);
}

std::string battery_report_json(const RunConfig& cfg,
                                const std::vector<TestReport>& reports) {
    json tests = json::array();
    for (const auto& r : reports) {
        json t{{"name", r.name},
               {"proportion", r.proportion},
               {"alpha", r.alpha},
               {"interval_lo", r.interval_lo},
               {"interval_hi", r.interval_hi},
               {"n_p_values", r.p_values.size()},
               {"pass", r.pass}};
        if (r.ks_p >= 0.0) t["ks_uniformity_p"] = r.ks_p;
        tests.push_back(std::move(t));
    }
    json j;
    j["config"] = config_json(cfg);
    j["tests"] = std::move(tests);
    j["pass"] = battery_passed(reports);
    return j.dump(2);
}

} // namespace siqrng
