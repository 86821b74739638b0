#pragma once

#include <cmath>

namespace siqrng {

inline constexpr double kComplementaryOverlap = 0.70710678118654752440; // 1/sqrt(2)

// Finite-key security knobs. The default failure target pairs the
// parameter-estimation term with the extraction term 2^-t_e.
struct SecurityParams {
    int t_e = 100;                      // extraction security exponent, bits
    double epsilon_theta_target = 0.0;  // 0 means "use 2^-t_e"
    double overlap = kComplementaryOverlap; // max_{X,Z} |<X|Z>|

    double theta_target() const {
        return epsilon_theta_target > 0.0 ? epsilon_theta_target : std::exp2(-t_e);
    }
    void validate() const;
};

// Observed (or expected) quantities entering the finite-key bound.
struct EstimationInput {
    double n_total;     // total recorded detection events N
    double p_x;         // X-basis selection probability
    double e_bx;        // X-basis QBER
    double n_z_single;  // Z-basis single-click count
    double eta_0;       // Z-port efficiencies
    double eta_1;
    double t_s;         // accumulation time

    void validate() const;
};

struct RateReport {
    double theta;             // statistical deviation
    double epsilon_theta;     // achieved estimation failure probability
    double extractable_bits;
    double rate_bps;
    double epsilon_total;     // trace-distance failure probability
    double n_z_single;        // carried through for extraction planning
    double t_s;
};

// H(x) = -x log2 x - (1-x) log2 (1-x), continuous at 0 and 1.
double binary_entropy(double x);

// Tail bound on Prob(e_pZ > e_bX + theta), capped at 1. Inputs with
// e_bx = 0 are clamped to 1/(2 N_X) with N_X = p_x * n_total.
double epsilon_theta(double theta, const EstimationInput& input);

// Smallest theta with epsilon_theta(theta) <= target, by bisection to
// relative tolerance 1e-6. Throws no_solution if the target is
// unreachable on (0, 1 - e_bx).
double solve_theta(const EstimationInput& input, double target);

// Extracted-bit count N_z - N_z H(e_bx + theta) - t_e, clamped at 0.
double extraction_length(const EstimationInput& input, const SecurityParams& sec,
                         double theta);

// Mismatch-corrected final length and rate:
//   (2 min(eta0,eta1)/(eta0+eta1)) [-2 N_Z^s log2(overlap) - N_Z^s H(e_bx+theta) - t_e]
double epsilon_total(double eps_theta, int t_e);
RateReport final_rate(const EstimationInput& input, const SecurityParams& sec,
                      double theta);

} // namespace siqrng
