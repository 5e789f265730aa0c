#pragma once

#include <cstdint>

#include "chirpcs/bitvec.hpp"

namespace chirpcs {

/// Arithmetic in GF(2^m) for odd m in [3, 25]. Elements are polynomial
/// residues packed into 64-bit words (bit i = coefficient of x^i), reduced
/// modulo a fixed irreducible polynomial: the lexicographically smallest
/// irreducible of degree m. The modulus is re-validated (trial division)
/// once at construction, so a corrupted table cannot go unnoticed.
class GF2m {
public:
    explicit GF2m(int m);

    int degree() const { return m_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t order() const { return std::uint64_t(1) << m_; }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return a ^ b; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sqr(std::uint64_t a) const { return mul(a, a); }

    /// a^(2^k), the k-fold Frobenius.
    std::uint64_t frob(std::uint64_t a, int k) const;

    /// tr(a) = a + a^2 + a^4 + ... + a^(2^(m-1)), always 0 or 1.
    int trace(std::uint64_t a) const;

    static std::uint64_t modulus_for(int m);
    static bool is_irreducible(std::uint64_t poly);

private:
    int m_ = 0;
    std::uint64_t modulus_ = 0;
};

}  // namespace chirpcs
