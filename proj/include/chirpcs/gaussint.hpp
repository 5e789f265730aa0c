#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace chirpcs {

/// Gaussian integer a + b*i with 64-bit components; exact arithmetic for
/// character sums (all sums handled here stay far below 2^62).
struct GaussInt {
    std::int64_t re = 0;
    std::int64_t im = 0;

    constexpr GaussInt() = default;
    constexpr GaussInt(std::int64_t r, std::int64_t i) : re(r), im(i) {}

    /// i^k for k mod 4.
    static constexpr GaussInt unit_power(int k) {
        switch (k & 3) {
            case 0: return {1, 0};
            case 1: return {0, 1};
            case 2: return {-1, 0};
            default: return {0, -1};
        }
    }

    constexpr GaussInt operator+(const GaussInt& o) const { return {re + o.re, im + o.im}; }
    constexpr GaussInt operator-(const GaussInt& o) const { return {re - o.re, im - o.im}; }
    constexpr GaussInt operator-() const { return {-re, -im}; }
    constexpr GaussInt operator*(const GaussInt& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    constexpr GaussInt conj() const { return {re, -im}; }

    GaussInt& operator+=(const GaussInt& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussInt& operator-=(const GaussInt& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }

    constexpr bool operator==(const GaussInt&) const = default;

    constexpr bool is_zero() const { return re == 0 && im == 0; }

    /// |z|^2, exact.
    constexpr std::uint64_t norm2() const {
        return static_cast<std::uint64_t>(re * re + im * im);
    }

    std::complex<double> to_complex() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }

    std::string to_string() const {
        return std::to_string(re) + (im < 0 ? "" : "+") + std::to_string(im) + "i";
    }
};

}  // namespace chirpcs
