#include "siqrng/stattests.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <fftw3.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include "siqrng/errors.hpp"

namespace siqrng {

namespace {

double igamc(double a, double x) {
    [[maybe_unused]] static const bool handler_off = (gsl_set_error_handler_off(), true);
    // Chi-square statistics can land an ulp below zero.
    if (x < 0.0) x = 0.0;
    return gsl_sf_gamma_inc_Q(a, x);
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace

double monobit_p_value(Sample bits) {
    const std::size_t n = bits.size();
    if (n < 100) throw invalid_parameter("monobit test needs at least 100 bits");
    std::int64_t sum = 0;
    for (std::uint8_t b : bits) sum += 2 * static_cast<int>(b) - 1;
    const double s_obs = std::abs(static_cast<double>(sum)) / std::sqrt(static_cast<double>(n));
    return std::erfc(s_obs / std::sqrt(2.0));
}

double block_frequency_p_value(Sample bits, std::uint64_t block_len) {
    const std::size_t n = bits.size();
    const std::size_t num_blocks = n / block_len;
    if (num_blocks == 0) throw invalid_parameter("sample shorter than one block");
    double chi2 = 0.0;
    for (std::size_t b = 0; b < num_blocks; ++b) {
        std::uint64_t ones = 0;
        for (std::size_t i = 0; i < block_len; ++i) ones += bits[b * block_len + i];
        const double pi = static_cast<double>(ones) / static_cast<double>(block_len);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(block_len);
    return igamc(static_cast<double>(num_blocks) / 2.0, chi2 / 2.0);
}

double runs_p_value(Sample bits) {
    const std::size_t n = bits.size();
    if (n < 100) throw invalid_parameter("runs test needs at least 100 bits");
    const double pi =
        static_cast<double>(std::accumulate(bits.begin(), bits.end(), std::uint64_t{0})) /
        static_cast<double>(n);
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) return 0.0;
    std::uint64_t v = 1;
    for (std::size_t i = 1; i < n; ++i) v += (bits[i] != bits[i - 1]);
    const double num = std::abs(static_cast<double>(v) -
                                2.0 * static_cast<double>(n) * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * static_cast<double>(n)) * pi * (1.0 - pi);
    return std::erfc(num / den);
}

double longest_run_p_value(Sample bits) {
    const std::size_t n = bits.size();
    std::size_t block_len;
    std::vector<std::uint64_t> classes; // longest-run values mapped to class index
    std::vector<double> pi;
    std::size_t v_min, v_max;
    if (n >= 750000) {
        block_len = 10000;
        v_min = 10;
        v_max = 16;
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    } else if (n >= 6272) {
        block_len = 128;
        v_min = 4;
        v_max = 9;
        pi = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
    } else if (n >= 128) {
        block_len = 8;
        v_min = 1;
        v_max = 4;
        pi = {0.2148, 0.3672, 0.2305, 0.1875};
    } else {
        throw invalid_parameter("longest-run test needs at least 128 bits");
    }
    const std::size_t num_blocks = n / block_len;
    std::vector<std::uint64_t> counts(pi.size(), 0);
    for (std::size_t b = 0; b < num_blocks; ++b) {
        std::size_t longest = 0, run = 0;
        for (std::size_t i = 0; i < block_len; ++i) {
            run = bits[b * block_len + i] ? run + 1 : 0;
            longest = std::max(longest, run);
        }
        const std::size_t cls = std::min(std::max(longest, v_min), v_max) - v_min;
        ++counts[cls];
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) {
        const double expected = static_cast<double>(num_blocks) * pi[k];
        const double d = static_cast<double>(counts[k]) - expected;
        chi2 += d * d / expected;
    }
    return igamc(static_cast<double>(pi.size() - 1) / 2.0, chi2 / 2.0);
}

std::vector<double> cumulative_sums_p_values(Sample bits) {
    const std::size_t n = bits.size();
    if (n < 100) throw invalid_parameter("cusum test needs at least 100 bits");
    auto one_direction = [n](auto next) {
        std::int64_t s = 0, z = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s += next(i);
            z = std::max(z, std::abs(s));
        }
        const double sqn = std::sqrt(static_cast<double>(n));
        const double zd = static_cast<double>(z);
        double sum1 = 0.0;
        const std::int64_t nn = static_cast<std::int64_t>(n);
        for (std::int64_t k = (-nn / z + 1) / 4; k <= (nn / z - 1) / 4; ++k)
            sum1 += std_normal_cdf((4.0 * k + 1.0) * zd / sqn) -
                    std_normal_cdf((4.0 * k - 1.0) * zd / sqn);
        double sum2 = 0.0;
        for (std::int64_t k = (-nn / z - 3) / 4; k <= (nn / z - 1) / 4; ++k)
            sum2 += std_normal_cdf((4.0 * k + 3.0) * zd / sqn) -
                    std_normal_cdf((4.0 * k + 1.0) * zd / sqn);
        return clamp01(1.0 - sum1 + sum2);
    };
    const double fwd =
        one_direction([&](std::size_t i) { return 2 * static_cast<int>(bits[i]) - 1; });
    const double bwd = one_direction(
        [&](std::size_t i) { return 2 * static_cast<int>(bits[bits.size() - 1 - i]) - 1; });
    return {fwd, bwd};
}

namespace {

// psi^2_m of the overlapping m-bit pattern counts (with wraparound).
double psi_sq(Sample bits, int m) {
    if (m <= 0) return 0.0;
    const std::size_t n = bits.size();
    std::vector<std::uint32_t> counts(std::size_t{1} << m, 0);
    std::uint32_t pattern = 0;
    const std::uint32_t mask = (1u << m) - 1;
    for (std::size_t i = 0; i < n + static_cast<std::size_t>(m) - 1; ++i) {
        pattern = ((pattern << 1) | bits[i % n]) & mask;
        if (i + 1 >= static_cast<std::size_t>(m)) ++counts[pattern];
    }
    double sum = 0.0;
    for (std::uint32_t c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
    return sum * static_cast<double>(std::size_t{1} << m) / static_cast<double>(n) -
           static_cast<double>(n);
}

} // namespace

std::vector<double> serial_p_values(Sample bits, int m) {
    if (m < 2) throw invalid_parameter("serial test needs m >= 2");
    const double p2 = psi_sq(bits, m);
    const double p1 = psi_sq(bits, m - 1);
    const double p0 = psi_sq(bits, m - 2);
    const double d1 = p2 - p1;
    const double d2 = p2 - 2.0 * p1 + p0;
    return {igamc(std::pow(2.0, m - 2), d1 / 2.0), igamc(std::pow(2.0, m - 3), d2 / 2.0)};
}

double approximate_entropy_p_value(Sample bits, int m) {
    const std::size_t n = bits.size();
    auto phi = [&](int mm) {
        if (mm == 0) return 0.0;
        std::vector<std::uint32_t> counts(std::size_t{1} << mm, 0);
        std::uint32_t pattern = 0;
        const std::uint32_t mask = (1u << mm) - 1;
        for (std::size_t i = 0; i < n + static_cast<std::size_t>(mm) - 1; ++i) {
            pattern = ((pattern << 1) | bits[i % n]) & mask;
            if (i + 1 >= static_cast<std::size_t>(mm)) ++counts[pattern];
        }
        double sum = 0.0;
        for (std::uint32_t c : counts)
            if (c) {
                const double p = static_cast<double>(c) / static_cast<double>(n);
                sum += p * std::log(p);
            }
        return sum;
    };
    const double apen = phi(m) - phi(m + 1);
    const double chi2 = 2.0 * static_cast<double>(n) * (std::log(2.0) - apen);
    return igamc(std::pow(2.0, m - 1), chi2 / 2.0);
}

double spectral_p_value(Sample bits) {
    const std::size_t n = bits.size();
    if (n < 1000) throw invalid_parameter("spectral test needs at least 1000 bits");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 2.0 * bits[i] - 1.0;
    std::vector<double> out(2 * (n / 2 + 1));
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    const double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
    const std::size_t half = n / 2;
    std::size_t below = 0;
    for (std::size_t k = 0; k < half; ++k) {
        const double re = out[2 * k];
        const double im = out[2 * k + 1];
        if (std::sqrt(re * re + im * im) < threshold) ++below;
    }
    const double expected = 0.95 * static_cast<double>(half);
    const double d = (static_cast<double>(below) - expected) /
                     std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
    return std::erfc(std::abs(d) / std::sqrt(2.0));
}

double ks_uniformity(std::vector<double> p_values) {
    if (p_values.size() < 10)
        throw degenerate_input("KS uniformity needs at least 10 p-values");
    std::sort(p_values.begin(), p_values.end());
    const std::size_t n = p_values.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = p_values[i];
        d = std::max(d, static_cast<double>(i + 1) / n - cdf);
        d = std::max(d, cdf - static_cast<double>(i) / n);
    }
    // Asymptotic Kolmogorov distribution with the small-sample correction.
    const double sqn = std::sqrt(static_cast<double>(n));
    const double lambda = d * (sqn + 0.12 + 0.11 / sqn);
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return clamp01(p);
}

namespace {

int serial_block_len(std::size_t n) {
    const int log2n = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
    return std::clamp(log2n - 3, 2, 16);
}

int apen_block_len(std::size_t n) {
    const int log2n = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
    return std::clamp(log2n - 6, 1, 10);
}

constexpr double kUniformityAlpha = 1e-4;

} // namespace

std::vector<TestReport> run_battery(const BitBuffer& bits, std::uint64_t sample_bits,
                                    double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.1))
        throw invalid_parameter("alpha must be in (0, 0.1]");
    if (bits.size() < sample_bits) throw invalid_parameter("fewer bits than one sample");
    const std::uint64_t n_samples = bits.size() / sample_bits;
    if (n_samples < 10)
        throw degenerate_input("battery needs at least 10 samples, got " +
                               std::to_string(n_samples));

    struct Collector {
        std::string name;
        bool multi_outcome;
        std::vector<double> p_values;
    };
    std::vector<Collector> collectors = {
        {"frequency", false, {}},          {"block-frequency", false, {}},
        {"runs", false, {}},               {"longest-run", false, {}},
        {"cumulative-sums", true, {}},     {"serial", true, {}},
        {"approximate-entropy", false, {}}, {"spectral", false, {}},
    };

    std::vector<std::uint8_t> sample(sample_bits);
    const int serial_m = serial_block_len(sample_bits);
    const int apen_m = apen_block_len(sample_bits);
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        const std::uint64_t base = s * sample_bits;
        for (std::uint64_t i = 0; i < sample_bits; ++i) sample[i] = bits.get(base + i);
        const Sample view(sample);
        collectors[0].p_values.push_back(monobit_p_value(view));
        collectors[1].p_values.push_back(block_frequency_p_value(view));
        collectors[2].p_values.push_back(runs_p_value(view));
        collectors[3].p_values.push_back(longest_run_p_value(view));
        for (double p : cumulative_sums_p_values(view)) collectors[4].p_values.push_back(p);
        for (double p : serial_p_values(view, serial_m)) collectors[5].p_values.push_back(p);
        collectors[6].p_values.push_back(approximate_entropy_p_value(view, apen_m));
        collectors[7].p_values.push_back(spectral_p_value(view));
    }

    std::vector<TestReport> reports;
    reports.reserve(collectors.size());
    for (auto& c : collectors) {
        TestReport r;
        r.name = c.name;
        r.alpha = alpha;
        const double n = static_cast<double>(c.p_values.size());
        std::uint64_t passed = 0;
        for (double p : c.p_values) passed += (p >= alpha);
        r.proportion = static_cast<double>(passed) / n;
        const double hw = 3.0 * std::sqrt((1.0 - alpha) * alpha / n);
        r.interval_lo = (1.0 - alpha) - hw;
        r.interval_hi = (1.0 - alpha) + hw;
        r.pass = r.proportion >= r.interval_lo && r.proportion <= r.interval_hi;
        if (c.multi_outcome) {
            r.ks_p = ks_uniformity(c.p_values);
            r.pass = r.pass && r.ks_p >= kUniformityAlpha;
        }
        r.p_values = std::move(c.p_values);
        reports.push_back(std::move(r));
    }
    return reports;
}

bool battery_passed(const std::vector<TestReport>& reports) {
    return std::all_of(reports.begin(), reports.end(),
                       [](const TestReport& r) { return r.pass; });
}

} // namespace siqrng
