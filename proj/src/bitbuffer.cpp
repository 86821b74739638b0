#include "siqrng/bitbuffer.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "siqrng/errors.hpp"

namespace siqrng {

BitBuffer::BitBuffer(std::vector<std::uint8_t> bytes, std::uint64_t nbits)
    : bytes_(std::move(bytes)), nbits_(nbits) {
    if (bytes_.size() != (nbits_ + 7) / 8)
        throw invalid_parameter("byte count does not match bit length");
    if (nbits_ & 7) bytes_.back() &= static_cast<std::uint8_t>((1u << (nbits_ & 7)) - 1);
}

void BitBuffer::append(const BitBuffer& other) {
    if ((nbits_ & 7) == 0) {
        // Byte aligned, bulk copy.
        bytes_.insert(bytes_.end(), other.bytes_.begin(), other.bytes_.end());
        nbits_ += other.nbits_;
        return;
    }
    for (std::uint64_t i = 0; i < other.nbits_; ++i) push_back(other.get(i));
}

BitBuffer BitBuffer::slice(std::uint64_t start, std::uint64_t len) const {
    if (start + len > nbits_) throw invalid_parameter("slice out of range");
    BitBuffer out(len);
    if ((start & 7) == 0) {
        std::memcpy(const_cast<std::uint8_t*>(out.data()), bytes_.data() + (start >> 3),
                    (len + 7) / 8);
        if (len & 7)
            out.bytes_.back() &= static_cast<std::uint8_t>((1u << (len & 7)) - 1);
    } else {
        for (std::uint64_t i = 0; i < len; ++i) out.set(i, get(start + i));
    }
    return out;
}

std::uint64_t BitBuffer::count_ones() const {
    std::uint64_t n = 0;
    for (std::uint8_t b : bytes_) n += std::popcount(b);
    return n;
}

std::vector<std::uint64_t> BitBuffer::to_words() const {
    std::vector<std::uint64_t> words((nbits_ + 63) / 64, 0);
    std::memcpy(words.data(), bytes_.data(), bytes_.size());
    return words;
}

BitBuffer BitBuffer::from_words(const std::vector<std::uint64_t>& words,
                                std::uint64_t nbits) {
    if (words.size() < (nbits + 63) / 64)
        throw invalid_parameter("word count does not match bit length");
    BitBuffer out(nbits);
    std::memcpy(const_cast<std::uint8_t*>(out.data()), words.data(), (nbits + 7) / 8);
    if (nbits & 7)
        out.bytes_.back() &= static_cast<std::uint8_t>((1u << (nbits & 7)) - 1);
    return out;
}

namespace {

constexpr char kMagic[4] = {'S', 'I', 'Q', 'B'};

void put_u16(std::ostream& os, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    os.write(b, 2);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}

std::uint16_t get_u16(std::istream& is) {
    unsigned char b[2];
    is.read(reinterpret_cast<char*>(b), 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

} // namespace

void write_bitstream(const std::filesystem::path& path, const BitBuffer& bits) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    put_u16(os, kBitstreamVersion);
    put_u16(os, 0); // reserved
    put_u64(os, bits.size());
    os.write(reinterpret_cast<const char*>(bits.data()),
             static_cast<std::streamsize>(bits.byte_size()));
    if (!os) throw io_error("write failed: " + path.string());
}

BitBuffer read_bitstream(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw io_error("bad bitstream magic: " + path.string());
    const std::uint16_t version = get_u16(is);
    if (version != kBitstreamVersion)
        throw io_error("unsupported bitstream version " + std::to_string(version));
    get_u16(is); // reserved
    const std::uint64_t nbits = get_u64(is);
    std::vector<std::uint8_t> bytes((nbits + 7) / 8);
    is.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!is) throw io_error("truncated bitstream: " + path.string());
    return BitBuffer(std::move(bytes), nbits);
}

} // namespace siqrng
