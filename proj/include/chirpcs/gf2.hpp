#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chirpcs/bitvec.hpp"

namespace chirpcs {

/// m x m binary symmetric matrix, rows packed as 64-bit words.
/// Symmetry is checked at construction; asymmetric input is rejected.
class BinSymMatrix {
public:
    BinSymMatrix() = default;
    explicit BinSymMatrix(std::vector<BitVec> rows);
    BinSymMatrix(std::span<const std::uint64_t> row_words, int m);

    static BinSymMatrix zero(int m);
    static BinSymMatrix identity(int m);

    int dim() const { return m_; }
    bool bit(int i, int j) const { return (rows_[static_cast<std::size_t>(i)] >> j) & 1u; }
    std::uint64_t row_word(int i) const { return rows_[static_cast<std::size_t>(i)]; }
    BitVec row(int i) const { return BitVec(rows_[static_cast<std::size_t>(i)], m_); }

    /// (P[0][0], ..., P[m-1][m-1])
    BitVec diagonal() const;

    bool is_zero() const;

    BinSymMatrix operator^(const BinSymMatrix& o) const;

    bool operator==(const BinSymMatrix&) const = default;

    std::string to_string() const;

private:
    std::vector<std::uint64_t> rows_;
    int m_ = 0;
};

// GF(2) rank of an arbitrary set of packed row vectors (destroys its copy).
int gf2_rank(std::vector<std::uint64_t> rows);

// Rank of a binary symmetric matrix (Gaussian elimination, pivot = lowest set bit).
int gf2_rank(const BinSymMatrix& p);

// Solve the linear system given by `rows` (equation i: rows[i] . u = rhs[i]) for
// u over GF(2) with `unknowns` variables. Deterministic: pivots by lowest set
// bit, free variables forced to zero. Returns nullopt when inconsistent.
std::optional<std::uint64_t> gf2_solve(std::vector<std::uint64_t> rows, std::vector<int> rhs,
                                       int unknowns);

// Some z with z P = d over GF(2), or nullopt when d is outside the row space.
std::optional<BitVec> solve_in_rowspace(const BinSymMatrix& p, const BitVec& d);

// Basis of the null space E = { z : z P = 0 }.
std::vector<BitVec> nullspace_basis(const BinSymMatrix& p);

}  // namespace chirpcs
