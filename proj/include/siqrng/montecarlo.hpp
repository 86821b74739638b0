#pragma once

#include <cstdint>
#include <utility>

#include "siqrng/bitbuffer.hpp"
#include "siqrng/model.hpp"
#include "siqrng/security.hpp"

namespace siqrng {

// Event-class counts of one simulation run (or of externally recorded
// data). The classes are disjoint and together with n_vacuum partition
// all pulses.
struct ClickTally {
    std::uint64_t n_h_s = 0;
    std::uint64_t n_v_s = 0;
    std::uint64_t n_d_s = 0;
    std::uint64_t n_a_s = 0;
    std::uint64_t n_z_d = 0;   // both Z detectors, no X detector
    std::uint64_t n_x_d = 0;   // both X detectors, no Z detector
    std::uint64_t n_cross = 0; // at least one click in each basis; discarded
    std::uint64_t n_pulses = 0;
    std::uint64_t n_vacuum = 0;

    std::uint64_t n_z_single() const { return n_h_s + n_v_s; }
    std::uint64_t n_x_single() const { return n_d_s + n_a_s; }

    ClickTally& operator+=(const ClickTally& o);
};

// Z-basis single-click outcomes, H -> 0, V -> 1, in pulse order.
struct RawBits {
    BitBuffer bits;
};

// Pulses are processed in fixed chunks; chunk i draws from a generator
// keyed by (seed, i), so the result does not depend on the worker count.
inline constexpr std::uint64_t kChunkPulses = 1u << 20;

std::pair<ClickTally, RawBits> simulate(const SystemModel& model, std::uint64_t n_pulses,
                                        std::uint64_t seed, int threads = 1);

// Throws degenerate_input when the tally holds no X-basis events.
EstimationInput tally_to_estimation_input(const ClickTally& tally, const SystemModel& model);

// Optional mode: appends one uniformly random bit per Z-basis double
// click to the raw sequence. The baseline protocol keeps single clicks
// only and never calls this.
RawBits double_click_assignment(const RawBits& raw, const ClickTally& tally,
                                std::uint64_t seed);

// Counter-based substream used by the simulator and by seed expansion in
// the CLI: output k of stream (key, stream_id) is a fixed mixing function
// of (key, stream_id, k) alone.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t key, std::uint64_t stream_id);

    std::uint64_t next_u64();
    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

} // namespace siqrng
