#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "siqrng/bitbuffer.hpp"

namespace siqrng {

// Outcome of one battery test aggregated over all samples. Multi-outcome
// tests (cumulative sums, serial) pool their per-outcome p-values; the
// pass proportion is then the fraction over the pooled list, which equals
// the average of the per-outcome proportions.
struct TestReport {
    std::string name;
    std::vector<double> p_values;
    double proportion = 0.0;
    double alpha = 0.0;
    double interval_lo = 0.0;
    double interval_hi = 1.0;
    double ks_p = -1.0; // uniformity of the pooled p-values; < 0 when not applied
    bool pass = false;
};

// One unpacked sample, one byte per bit (0 or 1).
using Sample = std::span<const std::uint8_t>;

// Per-sample statistics. Each returns one or more p-values in [0,1].
double monobit_p_value(Sample bits);                  // n >= 100
double block_frequency_p_value(Sample bits, std::uint64_t block_len = 128);
double runs_p_value(Sample bits);
double longest_run_p_value(Sample bits);              // n >= 128
std::vector<double> cumulative_sums_p_values(Sample bits); // forward, backward
std::vector<double> serial_p_values(Sample bits, int m);   // grad psi^2, grad^2 psi^2
double approximate_entropy_p_value(Sample bits, int m);
double spectral_p_value(Sample bits);

// One-sample Kolmogorov-Smirnov test of the p-values against uniform(0,1);
// returns the asymptotic p-value. Requires >= 10 values.
double ks_uniformity(std::vector<double> p_values);

// Splits `bits` into floor(size/sample_bits) samples and runs the
// 8-test battery. Throws degenerate_input with fewer than 10 samples.
std::vector<TestReport> run_battery(const BitBuffer& bits, std::uint64_t sample_bits,
                                    double alpha = 0.01);

bool battery_passed(const std::vector<TestReport>& reports);

} // namespace siqrng
