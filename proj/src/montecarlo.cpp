#include "siqrng/montecarlo.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "siqrng/errors.hpp"

namespace siqrng {

namespace {

// stafford mix 13 variant of the splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ull;

} // namespace

SubstreamRng::SubstreamRng(std::uint64_t key, std::uint64_t stream_id)
    : state_(mix64(key + kGoldenGamma * (stream_id + 1)) ^ stream_id) {}

std::uint64_t SubstreamRng::next_u64() {
    state_ += kGoldenGamma;
    return mix64(state_);
}

ClickTally& ClickTally::operator+=(const ClickTally& o) {
    n_h_s += o.n_h_s;
    n_v_s += o.n_v_s;
    n_d_s += o.n_d_s;
    n_a_s += o.n_a_s;
    n_z_d += o.n_z_d;
    n_x_d += o.n_x_d;
    n_cross += o.n_cross;
    n_pulses += o.n_pulses;
    n_vacuum += o.n_vacuum;
    return *this;
}

namespace {

struct ChunkResult {
    ClickTally tally;
    BitBuffer bits;
};

ChunkResult simulate_chunk(const ClickProbabilities& p, std::uint64_t n_pulses,
                           std::uint64_t seed, std::uint64_t chunk_index) {
    SubstreamRng rng(seed, chunk_index);
    ChunkResult r;
    r.tally.n_pulses = n_pulses;
    for (std::uint64_t i = 0; i < n_pulses; ++i) {
        const bool c0 = rng.next_double() < p.p0;
        const bool c1 = rng.next_double() < p.p1;
        const bool cp = rng.next_double() < p.p_plus;
        const bool cm = rng.next_double() < p.p_minus;
        const int z = int(c0) + int(c1);
        const int x = int(cp) + int(cm);
        if (z > 0 && x > 0) {
            ++r.tally.n_cross;
        } else if (z == 2) {
            ++r.tally.n_z_d;
        } else if (z == 1) {
            if (c0)
                ++r.tally.n_h_s;
            else
                ++r.tally.n_v_s;
            r.bits.push_back(c1); // H -> 0, V -> 1
        } else if (x == 2) {
            ++r.tally.n_x_d;
        } else if (x == 1) {
            if (cp)
                ++r.tally.n_d_s;
            else
                ++r.tally.n_a_s;
        } else {
            ++r.tally.n_vacuum;
        }
    }
    return r;
}

} // namespace

std::pair<ClickTally, RawBits> simulate(const SystemModel& model, std::uint64_t n_pulses,
                                        std::uint64_t seed, int threads) {
    if (n_pulses < 1) throw invalid_parameter("n_pulses must be >= 1");
    const ClickProbabilities p = click_probabilities(model);
    if (threads < 1) threads = 1;

    const std::uint64_t n_chunks = (n_pulses + kChunkPulses - 1) / kChunkPulses;
    std::vector<ChunkResult> results(n_chunks);

    auto worker = [&](std::uint64_t first) {
        for (std::uint64_t c = first; c < n_chunks; c += static_cast<std::uint64_t>(threads)) {
            const std::uint64_t count =
                std::min<std::uint64_t>(kChunkPulses, n_pulses - c * kChunkPulses);
            results[c] = simulate_chunk(p, count, seed, c);
        }
    };

    if (threads == 1 || n_chunks == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, static_cast<std::uint64_t>(t));
        for (auto& th : pool) th.join();
    }

    // Merge in chunk order so the raw bit sequence follows pulse order.
    ClickTally tally;
    RawBits raw;
    for (const auto& r : results) {
        tally += r.tally;
        raw.bits.append(r.bits);
    }
    return {tally, std::move(raw)};
}

EstimationInput tally_to_estimation_input(const ClickTally& tally, const SystemModel& model) {
    model.validate();
    const std::uint64_t n_x = tally.n_a_s + tally.n_d_s + tally.n_x_d;
    if (n_x == 0) throw degenerate_input("tally holds no X-basis events");

    EstimationInput input;
    input.e_bx = (static_cast<double>(tally.n_a_s) + 0.5 * static_cast<double>(tally.n_x_d)) /
                 static_cast<double>(n_x);
    input.n_z_single = static_cast<double>(tally.n_z_single());
    input.n_total = input.n_z_single + static_cast<double>(tally.n_z_d) +
                    static_cast<double>(n_x);
    input.p_x = model.p_x();
    input.eta_0 = model.eta_0;
    input.eta_1 = model.eta_1;
    input.t_s = model.t_s;
    return input;
}

RawBits double_click_assignment(const RawBits& raw, const ClickTally& tally,
                                std::uint64_t seed) {
    RawBits out;
    out.bits = raw.bits;
    SubstreamRng rng(seed, 0x64636c6bull); // "dclk" stream
    for (std::uint64_t i = 0; i < tally.n_z_d; ++i)
        out.bits.push_back(rng.next_u64() & 1u);
    return out;
}

} // namespace siqrng
