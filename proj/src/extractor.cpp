#include "siqrng/extractor.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#if defined(__PCLMUL__)
#include <emmintrin.h>
#include <wmmintrin.h>
#endif

#include "siqrng/errors.hpp"

namespace siqrng {

void ToeplitzSeed::validate() const {
    if (n == 0) throw invalid_parameter("Toeplitz input length n must be >= 1");
    const std::uint64_t want = (m == 0) ? 0 : n + m - 1;
    if (m > 0 && bits.size() != want)
        throw invalid_parameter("Toeplitz seed must hold n + m - 1 bits");
}

namespace {

void check_dims(const BitBuffer& input, const ToeplitzSeed& seed) {
    seed.validate();
    if (input.size() != seed.n)
        throw invalid_parameter("input length does not match Toeplitz n");
    if (seed.m > seed.n)
        throw invalid_parameter("Toeplitz m must not exceed n");
}

// Bits [offset, offset + count) of `words` as freshly packed words.
std::vector<std::uint64_t> shift_window(const std::vector<std::uint64_t>& words,
                                        std::uint64_t offset, std::uint64_t count) {
    std::vector<std::uint64_t> out((count + 63) / 64, 0);
    const std::uint64_t w0 = offset / 64;
    const unsigned sh = static_cast<unsigned>(offset % 64);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t v = (w0 + i < words.size()) ? words[w0 + i] >> sh : 0;
        if (sh && w0 + i + 1 < words.size()) v |= words[w0 + i + 1] << (64 - sh);
        out[i] = v;
    }
    if (count % 64) out.back() &= (~0ull) >> (64 - count % 64);
    return out;
}

} // namespace

BitBuffer extract_naive(const BitBuffer& input, const ToeplitzSeed& seed) {
    check_dims(input, seed);
    const std::uint64_t m = seed.m;
    const std::uint64_t n = seed.n;
    BitBuffer out(m);
    if (m == 0) return out;

    const std::vector<std::uint64_t> in_words = input.to_words();
    const std::vector<std::uint64_t> seed_words = seed.bits.to_words();
    // Row i of T is seed bits [m-1-i, m-1-i+n); materialize it, AND with
    // the input, and take the parity.
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::vector<std::uint64_t> row = shift_window(seed_words, m - 1 - i, n);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < in_words.size(); ++w)
            acc ^= static_cast<std::uint64_t>(std::popcount(row[w] & in_words[w]));
        out.set(i, acc & 1u);
    }
    return out;
}

namespace {

#if defined(__PCLMUL__)
inline void clmul64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const __m128i r = _mm_clmulepi64_si128(_mm_set_epi64x(0, static_cast<long long>(a)),
                                           _mm_set_epi64x(0, static_cast<long long>(b)), 0);
    lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(r));
    hi = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(r, 8)));
}
#else
inline void clmul64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    std::uint64_t h = 0, l = 0;
    while (b) {
        const unsigned s = static_cast<unsigned>(std::countr_zero(b));
        l ^= a << s;
        h ^= s ? a >> (64 - s) : 0;
        b &= b - 1;
    }
    hi = h;
    lo = l;
}
#endif

using Words = std::vector<std::uint64_t>;

void schoolbook(const std::uint64_t* a, std::size_t la, const std::uint64_t* b,
                std::size_t lb, std::uint64_t* out) {
    for (std::size_t i = 0; i < la; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < lb; ++j) {
            std::uint64_t hi, lo;
            clmul64(a[i], b[j], hi, lo);
            out[i + j] ^= lo;
            out[i + j + 1] ^= hi;
        }
    }
}

void xor_into(std::uint64_t* dst, const std::uint64_t* src, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) dst[i] ^= src[i];
}

constexpr std::size_t kKaratsubaThreshold = 24;

// out must hold la + lb words and be zeroed by the caller.
void karatsuba(const std::uint64_t* a, std::size_t la, const std::uint64_t* b,
               std::size_t lb, std::uint64_t* out) {
    if (la == 0 || lb == 0) return;
    if (std::min(la, lb) <= kKaratsubaThreshold) {
        schoolbook(a, la, b, lb, out);
        return;
    }
    const std::size_t h = (std::max(la, lb) + 1) / 2;
    if (la <= h) {
        // b splits, a does not: a*b = a*b0 + (a*b1 << 64h)
        karatsuba(a, la, b, h, out);
        Words tmp(la + lb - h, 0);
        karatsuba(a, la, b + h, lb - h, tmp.data());
        xor_into(out + h, tmp.data(), tmp.size());
        return;
    }
    if (lb <= h) {
        karatsuba(a, h, b, lb, out);
        Words tmp(la - h + lb, 0);
        karatsuba(a + h, la - h, b, lb, tmp.data());
        xor_into(out + h, tmp.data(), tmp.size());
        return;
    }
    // Both split at h: (a0 + a1 x)(b0 + b1 x) with x = 2^(64h); the middle
    // term is (a0+a1)(b0+b1) - z0 - z2 (XOR over GF(2)).
    const std::size_t la1 = la - h, lb1 = lb - h;
    Words z0(2 * h, 0);
    karatsuba(a, h, b, h, z0.data());
    Words z2(la1 + lb1, 0);
    karatsuba(a + h, la1, b + h, lb1, z2.data());

    Words as(std::max<std::size_t>(h, la1), 0);
    std::memcpy(as.data(), a, h * sizeof(std::uint64_t));
    xor_into(as.data(), a + h, la1);
    Words bs(std::max<std::size_t>(h, lb1), 0);
    std::memcpy(bs.data(), b, h * sizeof(std::uint64_t));
    xor_into(bs.data(), b + h, lb1);

    Words z1(as.size() + bs.size(), 0);
    karatsuba(as.data(), as.size(), bs.data(), bs.size(), z1.data());
    xor_into(z1.data(), z0.data(), z0.size());
    xor_into(z1.data(), z2.data(), z2.size());

    xor_into(out, z0.data(), z0.size());
    xor_into(out + h, z1.data(), std::min(z1.size(), la + lb - h));
    xor_into(out + 2 * h, z2.data(), z2.size());
}

} // namespace

std::vector<std::uint64_t> clmul_poly(const std::vector<std::uint64_t>& a,
                                      const std::vector<std::uint64_t>& b) {
    Words out(a.size() + b.size(), 0);
    karatsuba(a.data(), a.size(), b.data(), b.size(), out.data());
    return out;
}

BitBuffer extract_fast(const BitBuffer& input, const ToeplitzSeed& seed) {
    check_dims(input, seed);
    if (seed.m == 0) return BitBuffer(0);

    // Reverse the seed: with R[t] = seed[L-1-t] the Toeplitz product is the
    // window [n-1, n+m-2] of the carryless product input(x) * R(x).
    const std::uint64_t len = seed.bits.size();
    BitBuffer reversed(len);
    for (std::uint64_t i = 0; i < len; ++i)
        if (seed.bits.get(len - 1 - i)) reversed.set(i, true);

    const Words product = clmul_poly(input.to_words(), reversed.to_words());
    const Words window = shift_window(product, seed.n - 1, seed.m);
    return BitBuffer::from_words(window, seed.m);
}

ExtractionPlan plan_extraction(const RateReport& report, std::uint64_t block_n) {
    if (block_n < 1) throw invalid_parameter("block_n must be >= 1");
    ExtractionPlan plan;
    if (!(report.n_z_single > 0.0) || !(report.extractable_bits > 0.0)) return plan;
    const double ratio = std::min(report.extractable_bits / report.n_z_single, 1.0);
    plan.m_per_block = static_cast<std::uint64_t>(static_cast<double>(block_n) * ratio);
    plan.seed_bits_needed = block_n + plan.m_per_block - 1;
    return plan;
}

std::uint64_t seed_bits_for_stream(std::uint64_t input_bits, std::uint64_t block_n,
                                   std::uint64_t m_per_block, bool fresh_seed_per_block) {
    if (m_per_block == 0) return 0;
    const std::uint64_t span = block_n + m_per_block - 1;
    if (!fresh_seed_per_block) return span;
    const std::uint64_t blocks = (input_bits + block_n - 1) / block_n;
    return span * std::max<std::uint64_t>(blocks, 1);
}

BitBuffer extract_stream(const BitBuffer& input, const BitBuffer& seed_bits,
                         std::uint64_t block_n, std::uint64_t m_per_block,
                         bool fresh_seed_per_block) {
    if (block_n < 1) throw invalid_parameter("block_n must be >= 1");
    if (m_per_block > block_n)
        throw invalid_parameter("m_per_block must not exceed block_n");
    BitBuffer out;
    if (m_per_block == 0 || input.size() == 0) return out;
    const std::uint64_t span = block_n + m_per_block - 1;

    std::uint64_t pos = 0;
    std::uint64_t seed_pos = 0;
    while (pos < input.size()) {
        const std::uint64_t n = std::min<std::uint64_t>(block_n, input.size() - pos);
        // Partial last block keeps the session's extraction ratio.
        const std::uint64_t m =
            (n == block_n) ? m_per_block
                           : static_cast<std::uint64_t>(static_cast<double>(n) *
                                                        static_cast<double>(m_per_block) /
                                                        static_cast<double>(block_n));
        if (m > 0) {
            if (seed_pos + n + m - 1 > seed_bits.size())
                throw invalid_parameter("seed buffer too short for extraction stream");
            ToeplitzSeed seed;
            seed.n = n;
            seed.m = m;
            seed.bits = seed_bits.slice(seed_pos, n + m - 1);
            out.append(extract_fast(input.slice(pos, n), seed));
        }
        pos += n;
        if (fresh_seed_per_block) seed_pos += span;
    }
    return out;
}

} // namespace siqrng
