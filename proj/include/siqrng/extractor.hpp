#pragma once

#include <cstdint>
#include <vector>

#include "siqrng/bitbuffer.hpp"
#include "siqrng/security.hpp"

namespace siqrng {

// Seed of an m x n Toeplitz matrix: n + m - 1 bits, with
// T[i][j] = seed bit (m - 1 + j - i), so every diagonal is constant.
struct ToeplitzSeed {
    BitBuffer bits;
    std::uint64_t m = 0; // output bits
    std::uint64_t n = 0; // input bits

    void validate() const; // throws invalid_parameter on length mismatch
};

// Reference GF(2) matrix-vector product: output bit i is the parity of
// T[i][.] AND input. Row-at-a-time; the oracle for extract_fast.
BitBuffer extract_naive(const BitBuffer& input, const ToeplitzSeed& seed);

// Same map via carryless polynomial multiplication: the output equals
// bits [n-1, n+m-2] of input(x) * reverse(seed)(x) over GF(2).
// Bit-identical to extract_naive for all inputs.
BitBuffer extract_fast(const BitBuffer& input, const ToeplitzSeed& seed);

struct ExtractionPlan {
    std::uint64_t m_per_block = 0;
    std::uint64_t seed_bits_needed = 0;
};

// Per-block output length from the session's extractable ratio:
// m = floor(block_n * extractable_bits / n_z_single), clamped at 0.
ExtractionPlan plan_extraction(const RateReport& report, std::uint64_t block_n);

// Blocked session extraction. The seed buffer must hold at least
// block_n + m_per_block - 1 bits (one reused seed) or one such span per
// block when fresh_seed_per_block is set. A final partial block of
// n' < block_n input bits gets floor(n' * m_per_block / block_n) output
// bits from a prefix of its seed span.
BitBuffer extract_stream(const BitBuffer& input, const BitBuffer& seed_bits,
                         std::uint64_t block_n, std::uint64_t m_per_block,
                         bool fresh_seed_per_block = false);

std::uint64_t seed_bits_for_stream(std::uint64_t input_bits, std::uint64_t block_n,
                                   std::uint64_t m_per_block, bool fresh_seed_per_block);

// GF(2) carryless product of two bit-packed polynomials (Karatsuba over
// 64x64 base multiplies). Exposed for tests.
std::vector<std::uint64_t> clmul_poly(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b);

} // namespace siqrng
