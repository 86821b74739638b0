#pragma once

namespace siqrng {

// Physical and protocol parameters of the four-detector passive-basis
// measurement. Derived quantities (p_x, m1_z, m_plus_x) are never stored.
struct SystemModel {
    double mu;          // mean photon number per pulse
    double f_hz;        // pulse repetition rate
    double t_s;         // accumulation time
    double p_z;         // probability of choosing the Z basis
    double eta_0;       // detector efficiency, H port
    double eta_1;       // detector efficiency, V port
    double eta_plus;    // detector efficiency, D port
    double eta_minus;   // detector efficiency, A port
    double y_0;         // dark count probability per gate
    double m0_z;        // collapse probability to H under a Z measurement
    double m_minus_x;   // error-outcome probability under an X measurement

    double p_x() const { return 1.0 - p_z; }
    double m1_z() const { return 1.0 - m0_z; }
    double m_plus_x() const { return 1.0 - m_minus_x; }

    // Throws invalid_parameter naming the offending field.
    void validate() const;
};

// Per-pulse click probability of each detector.
struct ClickProbabilities {
    double p0;
    double p1;
    double p_plus;
    double p_minus;

    void validate() const;
};

// Per-pulse probabilities of the disjoint click-event classes.
struct BasisEventProbabilities {
    double q_z_single;  // exactly one of {H,V}, neither of {D,A}
    double q_z_double;  // both of {H,V}, neither of {D,A}
    double q_x_single;
    double q_x_double;
    double q_h;         // H only
    double q_v;
    double q_d;
    double q_a;
};

// Expected event counts over the full accumulation, count = f * t * q.
struct ExpectedTally {
    double n_h_s;
    double n_v_s;
    double n_d_s;
    double n_a_s;
    double n_z_d;
    double n_x_d;

    double n_z_single() const { return n_h_s + n_v_s; }
    double n_x_single() const { return n_d_s + n_a_s; }
    double n_z_tol() const { return n_h_s + n_v_s + n_z_d; }
    double n_x_tol() const { return n_d_s + n_a_s + n_x_d; }
};

ClickProbabilities click_probabilities(const SystemModel& model);

BasisEventProbabilities basis_event_probabilities(const ClickProbabilities& p);

// X-basis QBER; double clicks contribute half an error each.
// Throws degenerate_input when no X-basis click is possible.
double x_basis_qber(const ClickProbabilities& p);

ExpectedTally expected_tally(const SystemModel& model);

} // namespace siqrng
