#include "chirpcs/gf2m.hpp"

#include <stdexcept>

namespace chirpcs {

namespace {

int poly_degree(std::uint64_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t b) {
    const int db = poly_degree(b);
    int da = poly_degree(a);
    while (da >= db) {
        a ^= b << (da - db);
        da = poly_degree(a);
    }
    return a;
}

// Lexicographically smallest irreducible polynomial of degree m over GF(2),
// odd m in [3, 25]. Generated by exhaustive search with trial division and
// re-validated at runtime by GF2m's constructor.
constexpr std::uint64_t kModulusTable[] = {
    0xB,        //  m = 3:  x^3 + x + 1
    0x25,       //  m = 5:  x^5 + x^2 + 1
    0x83,       //  m = 7:  x^7 + x + 1
    0x203,      //  m = 9:  x^9 + x + 1
    0x805,      //  m = 11: x^11 + x^2 + 1
    0x201B,     //  m = 13: x^13 + x^4 + x^3 + x + 1
    0x8003,     //  m = 15: x^15 + x + 1
    0x20009,    //  m = 17: x^17 + x^3 + 1
    0x80027,    //  m = 19: x^19 + x^5 + x^2 + x + 1
    0x200005,   //  m = 21: x^21 + x^2 + 1
    0x800021,   //  m = 23: x^23 + x^5 + 1
    0x2000009,  //  m = 25: x^25 + x^3 + 1
};

}  // namespace

std::uint64_t GF2m::modulus_for(int m) {
    if (m < 3 || m > 25 || m % 2 == 0)
        throw std::invalid_argument("GF2m: m must be odd and in [3, 25]");
    return kModulusTable[(m - 3) / 2];
}

bool GF2m::is_irreducible(std::uint64_t poly) {
    const int d = poly_degree(poly);
    if (d <= 0) return false;
    for (std::uint64_t g = 2; poly_degree(g) <= d / 2; ++g)
        if (poly_mod(poly, g) == 0) return false;
    return true;
}

GF2m::GF2m(int m) : m_(m), modulus_(modulus_for(m)) {
    if (!is_irreducible(modulus_))
        throw std::logic_error("GF2m: modulus table entry is not irreducible");
}

std::uint64_t GF2m::mul(std::uint64_t a, std::uint64_t b) const {
    // Carry-less multiply (m <= 25 keeps the product under 2^50) then reduce.
    std::uint64_t prod = 0;
    while (b) {
        if (b & 1) prod ^= a;
        a <<= 1;
        b >>= 1;
    }
    return poly_mod(prod, modulus_);
}

std::uint64_t GF2m::frob(std::uint64_t a, int k) const {
    for (int i = 0; i < k; ++i) a = sqr(a);
    return a;
}

int GF2m::trace(std::uint64_t a) const {
    std::uint64_t acc = 0;
    std::uint64_t pw = a;
    for (int j = 0; j < m_; ++j) {
        acc ^= pw;
        pw = sqr(pw);
    }
    if (acc != 0 && acc != 1) throw std::logic_error("GF2m: trace escaped the prime field");
    return static_cast<int>(acc);
}

}  // namespace chirpcs
