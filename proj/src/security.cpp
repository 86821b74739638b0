#include "siqrng/security.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "siqrng/errors.hpp"

namespace siqrng {

void SecurityParams::validate() const {
    if (t_e < 1)
        throw invalid_parameter("t_e must be >= 1, got " + std::to_string(t_e));
    if (epsilon_theta_target != 0.0 &&
        !(epsilon_theta_target > 0.0 && epsilon_theta_target < 1.0))
        throw invalid_parameter("epsilon_theta_target must be in (0,1)");
    // Complementary bases give the minimum possible overlap 1/sqrt(2).
    if (!(overlap >= kComplementaryOverlap - 1e-15 && overlap <= 1.0))
        throw invalid_parameter("overlap must be in [1/sqrt(2), 1], got " +
                                std::to_string(overlap));
}

void EstimationInput::validate() const {
    if (!(n_total >= n_z_single && n_z_single >= 0.0))
        throw invalid_parameter("need n_total >= n_z_single >= 0");
    if (!(p_x > 0.0 && p_x < 1.0))
        throw invalid_parameter("p_x must be in (0,1), got " + std::to_string(p_x));
    if (!(e_bx >= 0.0 && e_bx < 0.5))
        throw invalid_parameter("e_bx must be in [0, 0.5), got " + std::to_string(e_bx));
    if (!(t_s > 0.0)) throw invalid_parameter("t_s must be > 0");
    if (!(eta_0 >= 0.0 && eta_0 <= 1.0 && eta_1 >= 0.0 && eta_1 <= 1.0))
        throw invalid_parameter("eta_0 and eta_1 must be in [0,1]");
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw invalid_parameter("binary_entropy argument must be in [0,1], got " +
                                std::to_string(x));
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

// Clamped error rate: one-error rule of thumb when nothing was observed.
double effective_ebx(const EstimationInput& input) {
    const double n_x = input.p_x * input.n_total;
    if (input.e_bx > 0.0) return input.e_bx;
    if (n_x <= 0.0)
        throw degenerate_input("cannot clamp e_bx = 0 with no X-basis sample");
    return std::min(0.5 - 1e-12, 1.0 / (2.0 * n_x));
}

double xi(double theta, double e, double p_x) {
    return binary_entropy(e + theta - p_x * theta) - p_x * binary_entropy(e) -
           (1.0 - p_x) * binary_entropy(e + theta);
}

} // namespace

double epsilon_theta(double theta, const EstimationInput& input) {
    input.validate();
    const double e = effective_ebx(input);
    if (!(theta >= 0.0 && e + theta < 1.0))
        throw invalid_parameter("need theta >= 0 and e_bx + theta < 1");
    const double prefactor =
        1.0 / std::sqrt(input.p_x * (1.0 - input.p_x) * e * (1.0 - e) * input.n_total);
    const double log2_eps = std::log2(prefactor) - input.n_total * xi(theta, e, input.p_x);
    if (log2_eps >= 0.0) return 1.0;
    return std::exp2(log2_eps);
}

double solve_theta(const EstimationInput& input, double target) {
    input.validate();
    if (!(target > 0.0 && target <= 1.0))
        throw invalid_parameter("target must be in (0,1], got " + std::to_string(target));
    const double e = effective_ebx(input);
    const double theta_max = (1.0 - e) * (1.0 - 1e-12);
    if (epsilon_theta(theta_max, input) > target)
        throw no_solution("epsilon_theta target unreachable for this input");
    // xi is strictly increasing in theta, so epsilon_theta is decreasing
    // and bisection brackets the smallest admissible theta.
    double lo = 0.0;
    double hi = theta_max;
    for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (epsilon_theta(mid, input) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double extraction_length(const EstimationInput& input, const SecurityParams& sec,
                         double theta) {
    input.validate();
    sec.validate();
    if (!(input.e_bx + theta < 0.5))
        throw invalid_parameter("need e_bx + theta < 1/2");
    const double n_z = input.n_z_single;
    const double r = n_z - n_z * binary_entropy(input.e_bx + theta) - sec.t_e;
    return std::max(r, 0.0);
}

double epsilon_total(double eps_theta, int t_e) {
    const double s = eps_theta + std::exp2(-t_e);
    return std::sqrt(s * (2.0 - s));
}

RateReport final_rate(const EstimationInput& input, const SecurityParams& sec,
                      double theta) {
    input.validate();
    sec.validate();
    if (!(input.eta_0 > 0.0 && input.eta_1 > 0.0))
        throw invalid_parameter("eta_0 and eta_1 must be > 0");

    const double mismatch =
        2.0 * std::min(input.eta_0, input.eta_1) / (input.eta_0 + input.eta_1);
    const double n_zs = input.n_z_single;
    const double bracket = -2.0 * n_zs * std::log2(sec.overlap) -
                           n_zs * binary_entropy(input.e_bx + theta) - sec.t_e;

    RateReport r;
    r.theta = theta;
    r.epsilon_theta = epsilon_theta(theta, input);
    r.extractable_bits = std::max(mismatch * bracket, 0.0);
    r.rate_bps = r.extractable_bits / input.t_s;
    r.epsilon_total = epsilon_total(r.epsilon_theta, sec.t_e);
    r.n_z_single = n_zs;
    r.t_s = input.t_s;
    return r;
}

} // namespace siqrng
