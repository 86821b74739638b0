#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace siqrng {

// Packed bit sequence. Bit j of the stream is bit (j mod 8), least
// significant first, of byte floor(j/8). Pad bits of the last byte are
// kept at zero; the length field is authoritative.
class BitBuffer {
public:
    BitBuffer() = default;
    explicit BitBuffer(std::uint64_t nbits) : bytes_((nbits + 7) / 8, 0), nbits_(nbits) {}
    BitBuffer(std::vector<std::uint8_t> bytes, std::uint64_t nbits);

    std::uint64_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }
    std::uint64_t byte_size() const { return bytes_.size(); }
    const std::uint8_t* data() const { return bytes_.data(); }

    bool get(std::uint64_t i) const { return (bytes_[i >> 3] >> (i & 7)) & 1u; }

    void set(std::uint64_t i, bool v) {
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (i & 7));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    void push_back(bool v) {
        if ((nbits_ & 7) == 0) bytes_.push_back(0);
        if (v) bytes_.back() |= static_cast<std::uint8_t>(1u << (nbits_ & 7));
        ++nbits_;
    }

    void append(const BitBuffer& other);

    // Bits [start, start+len) as a new buffer.
    BitBuffer slice(std::uint64_t start, std::uint64_t len) const;

    std::uint64_t count_ones() const;

    // Little-endian 64-bit words; bit j of the stream is bit (j mod 64) of
    // word floor(j/64). Trailing bits of the last word are zero.
    std::vector<std::uint64_t> to_words() const;
    static BitBuffer from_words(const std::vector<std::uint64_t>& words, std::uint64_t nbits);

    bool operator==(const BitBuffer& other) const {
        return nbits_ == other.nbits_ && bytes_ == other.bytes_;
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t nbits_ = 0;
};

// Bitstream file: 16-byte header (magic "SIQB", version u16, reserved u16,
// bit length u64, all little-endian) followed by the packed bytes.
void write_bitstream(const std::filesystem::path& path, const BitBuffer& bits);
BitBuffer read_bitstream(const std::filesystem::path& path);

inline constexpr std::uint16_t kBitstreamVersion = 1;

} // namespace siqrng
