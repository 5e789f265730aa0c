#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chirpcs {

/// Binary m-tuple packed little-endian into a 64-bit word (bit i = coordinate i).
class BitVec {
public:
    BitVec() = default;

    BitVec(std::uint64_t bits, int len) : bits_(bits), len_(len) {
        if (len < 0 || len > 63)
            throw std::invalid_argument("BitVec: length must be in [0, 63]");
        if (len < 64 && (bits >> len) != 0)
            throw std::invalid_argument("BitVec: bits set beyond position " + std::to_string(len));
    }

    static BitVec zero(int len) { return BitVec(0, len); }

    static BitVec unit(int len, int i) {
        if (i < 0 || i >= len)
            throw std::invalid_argument("BitVec::unit: index out of range");
        return BitVec(std::uint64_t(1) << i, len);
    }

    int length() const { return len_; }
    std::uint64_t word() const { return bits_; }
    bool bit(int i) const { return (bits_ >> i) & 1u; }
    bool is_zero() const { return bits_ == 0; }

    int weight() const { return std::popcount(bits_); }

    // GF(2) inner product: parity of the AND.
    bool dot(const BitVec& o) const { return std::popcount(bits_ & o.bits_) & 1; }

    BitVec operator^(const BitVec& o) const { return BitVec(bits_ ^ o.bits_, len_); }
    BitVec operator&(const BitVec& o) const { return BitVec(bits_ & o.bits_, len_); }
    BitVec& operator^=(const BitVec& o) {
        bits_ ^= o.bits_;
        return *this;
    }

    bool operator==(const BitVec&) const = default;

    std::string to_string() const {
        std::string s(static_cast<std::size_t>(len_), '0');
        for (int i = 0; i < len_; ++i)
            if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
        return s;
    }

private:
    std::uint64_t bits_ = 0;
    int len_ = 0;
};

inline int weight(const BitVec& v) { return v.weight(); }

// Parity of x & y on raw words; hot loops use this instead of BitVec.
inline int parity64(std::uint64_t w) { return std::popcount(w) & 1; }

}  // namespace chirpcs
