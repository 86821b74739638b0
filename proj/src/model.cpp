#include "siqrng/model.hpp"

#include <cmath>
#include <string>

#include "siqrng/errors.hpp"

namespace siqrng {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw invalid_parameter(std::string(name) + " must be in [0,1], got " +
                                std::to_string(v));
}

void check_positive(double v, const char* name) {
    if (!(v > 0.0))
        throw invalid_parameter(std::string(name) + " must be > 0, got " +
                                std::to_string(v));
}

// 1 - (1 - y0) e^{-a}, evaluated without cancellation for small a.
double click_prob(double a, double y0) {
    return -std::expm1(-a) + y0 * std::exp(-a);
}

} // namespace

void SystemModel::validate() const {
    if (!(mu >= 0.0)) throw invalid_parameter("mu must be >= 0, got " + std::to_string(mu));
    check_positive(f_hz, "f_hz");
    check_positive(t_s, "t_s");
    check_unit(p_z, "p_z");
    check_unit(eta_0, "eta_0");
    check_unit(eta_1, "eta_1");
    check_unit(eta_plus, "eta_plus");
    check_unit(eta_minus, "eta_minus");
    check_unit(y_0, "y_0");
    check_unit(m0_z, "m0_z");
    check_unit(m_minus_x, "m_minus_x");
}

void ClickProbabilities::validate() const {
    check_unit(p0, "p0");
    check_unit(p1, "p1");
    check_unit(p_plus, "p_plus");
    check_unit(p_minus, "p_minus");
}

ClickProbabilities click_probabilities(const SystemModel& model) {
    model.validate();
    ClickProbabilities p;
    p.p0 = click_prob(model.mu * model.p_z * model.eta_0 * model.m0_z, model.y_0);
    p.p1 = click_prob(model.mu * model.p_z * model.eta_1 * model.m1_z(), model.y_0);
    p.p_plus = click_prob(model.mu * model.p_x() * model.eta_plus * model.m_plus_x(),
                          model.y_0);
    p.p_minus = click_prob(model.mu * model.p_x() * model.eta_minus * model.m_minus_x,
                           model.y_0);
    return p;
}

BasisEventProbabilities basis_event_probabilities(const ClickProbabilities& p) {
    p.validate();
    const double no_x = (1.0 - p.p_plus) * (1.0 - p.p_minus);
    const double no_z = (1.0 - p.p0) * (1.0 - p.p1);

    BasisEventProbabilities q;
    q.q_h = p.p0 * (1.0 - p.p1) * no_x;
    q.q_v = p.p1 * (1.0 - p.p0) * no_x;
    q.q_z_single = q.q_h + q.q_v;
    q.q_z_double = p.p0 * p.p1 * no_x;
    q.q_d = p.p_plus * (1.0 - p.p_minus) * no_z;
    q.q_a = p.p_minus * (1.0 - p.p_plus) * no_z;
    q.q_x_single = q.q_d + q.q_a;
    q.q_x_double = p.p_plus * p.p_minus * no_z;
    return q;
}

double x_basis_qber(const ClickProbabilities& p) {
    p.validate();
    const double err = p.p_minus * (1.0 - p.p_plus);
    const double den = err + p.p_plus * (1.0 - p.p_minus) + p.p_plus * p.p_minus;
    if (den <= 0.0)
        throw degenerate_input("no X-basis click is possible (p_plus = p_minus = 0)");
    return (err + 0.5 * p.p_plus * p.p_minus) / den;
}

ExpectedTally expected_tally(const SystemModel& model) {
    const BasisEventProbabilities q = basis_event_probabilities(click_probabilities(model));
    const double ft = model.f_hz * model.t_s;
    ExpectedTally t;
    t.n_h_s = ft * q.q_h;
    t.n_v_s = ft * q.q_v;
    t.n_d_s = ft * q.q_d;
    t.n_a_s = ft * q.q_a;
    t.n_z_d = ft * q.q_z_double;
    t.n_x_d = ft * q.q_x_double;
    return t;
}

} // namespace siqrng
