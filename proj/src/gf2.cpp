#include "chirpcs/gf2.hpp"

#include <bit>
#include <stdexcept>

namespace chirpcs {

BinSymMatrix::BinSymMatrix(std::vector<BitVec> rows) {
    m_ = static_cast<int>(rows.size());
    if (m_ < 1 || m_ > 63) throw std::invalid_argument("BinSymMatrix: dimension must be in [1, 63]");
    rows_.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.length() != m_) throw std::invalid_argument("BinSymMatrix: rows must have length m");
        rows_.push_back(r.word());
    }
    for (int i = 0; i < m_; ++i)
        for (int j = i + 1; j < m_; ++j)
            if (bit(i, j) != bit(j, i))
                throw std::invalid_argument("BinSymMatrix: matrix is not symmetric");
}

BinSymMatrix::BinSymMatrix(std::span<const std::uint64_t> row_words, int m) {
    std::vector<BitVec> rows;
    rows.reserve(row_words.size());
    for (auto w : row_words) rows.emplace_back(w, m);
    *this = BinSymMatrix(std::move(rows));
}

BinSymMatrix BinSymMatrix::zero(int m) {
    return BinSymMatrix(std::vector<BitVec>(static_cast<std::size_t>(m), BitVec::zero(m)));
}

BinSymMatrix BinSymMatrix::identity(int m) {
    std::vector<BitVec> rows;
    rows.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) rows.push_back(BitVec::unit(m, i));
    return BinSymMatrix(std::move(rows));
}

BitVec BinSymMatrix::diagonal() const {
    std::uint64_t d = 0;
    for (int i = 0; i < m_; ++i) d |= std::uint64_t(bit(i, i)) << i;
    return BitVec(d, m_);
}

bool BinSymMatrix::is_zero() const {
    for (auto w : rows_)
        if (w) return false;
    return true;
}

BinSymMatrix BinSymMatrix::operator^(const BinSymMatrix& o) const {
    if (m_ != o.m_) throw std::invalid_argument("BinSymMatrix: dimension mismatch");
    BinSymMatrix out;
    out.m_ = m_;
    out.rows_.resize(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) out.rows_[i] = rows_[i] ^ o.rows_[i];
    return out;
}

std::string BinSymMatrix::to_string() const {
    std::string s;
    for (int i = 0; i < m_; ++i) {
        for (int j = 0; j < m_; ++j) s += bit(i, j) ? '1' : '0';
        if (i + 1 < m_) s += '\n';
    }
    return s;
}

int gf2_rank(std::vector<std::uint64_t> rows) {
    int rank = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] == 0) continue;
        const std::uint64_t pivot = rows[i] & (~rows[i] + 1);  // lowest set bit
        ++rank;
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (rows[j] & pivot) rows[j] ^= rows[i];
    }
    return rank;
}

int gf2_rank(const BinSymMatrix& p) {
    std::vector<std::uint64_t> rows;
    rows.reserve(static_cast<std::size_t>(p.dim()));
    for (int i = 0; i < p.dim(); ++i) rows.push_back(p.row_word(i));
    return gf2_rank(std::move(rows));
}

std::optional<std::uint64_t> gf2_solve(std::vector<std::uint64_t> rows, std::vector<int> rhs,
                                       int unknowns) {
    if (rows.size() != rhs.size()) throw std::invalid_argument("gf2_solve: size mismatch");
    if (unknowns < 0 || unknowns > 63) throw std::invalid_argument("gf2_solve: unknowns out of range");

    // Forward elimination; pivot column of each used row is its lowest set bit.
    std::vector<std::uint64_t> pivot_rows;
    std::vector<int> pivot_rhs, pivot_cols;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::uint64_t r = rows[i];
        int b = rhs[i] & 1;
        for (std::size_t q = 0; q < pivot_rows.size(); ++q)
            if (r & (std::uint64_t(1) << pivot_cols[q])) {
                r ^= pivot_rows[q];
                b ^= pivot_rhs[q];
            }
        if (r == 0) {
            if (b) return std::nullopt;  // 0 = 1, inconsistent
            continue;
        }
        pivot_rows.push_back(r);
        pivot_rhs.push_back(b);
        pivot_cols.push_back(std::countr_zero(r));
    }

    // Back substitution with free variables at zero.
    std::uint64_t u = 0;
    for (std::size_t q = pivot_rows.size(); q-- > 0;) {
        const std::uint64_t rest = pivot_rows[q] & ~(std::uint64_t(1) << pivot_cols[q]);
        const int v = pivot_rhs[q] ^ parity64(rest & u);
        u |= std::uint64_t(v) << pivot_cols[q];
    }
    return u;
}

std::optional<BitVec> solve_in_rowspace(const BinSymMatrix& p, const BitVec& d) {
    if (d.length() != p.dim()) throw std::invalid_argument("solve_in_rowspace: length mismatch");
    // z P = d componentwise: for each column j, P.col(j) . z = d_j; P symmetric
    // so columns are rows.
    std::vector<std::uint64_t> rows;
    std::vector<int> rhs;
    for (int j = 0; j < p.dim(); ++j) {
        rows.push_back(p.row_word(j));
        rhs.push_back(d.bit(j) ? 1 : 0);
    }
    auto u = gf2_solve(std::move(rows), std::move(rhs), p.dim());
    if (!u) return std::nullopt;
    return BitVec(*u, p.dim());
}

std::vector<BitVec> nullspace_basis(const BinSymMatrix& p) {
    const int m = p.dim();
    // Eliminate the rows of P (z P = 0 <=> P z^T = 0 by symmetry), tracking
    // pivot columns; free columns generate the kernel.
    std::vector<std::uint64_t> rows;
    for (int i = 0; i < m; ++i) rows.push_back(p.row_word(i));

    std::vector<std::uint64_t> pivot_rows;
    std::vector<int> pivot_cols;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::uint64_t r = rows[i];
        for (std::size_t q = 0; q < pivot_rows.size(); ++q)
            if (r & (std::uint64_t(1) << pivot_cols[q])) r ^= pivot_rows[q];
        if (r == 0) continue;
        pivot_rows.push_back(r);
        pivot_cols.push_back(std::countr_zero(r));
    }

    std::uint64_t pivot_mask = 0;
    for (int c : pivot_cols) pivot_mask |= std::uint64_t(1) << c;

    std::vector<BitVec> basis;
    for (int c = 0; c < m; ++c) {
        if (pivot_mask & (std::uint64_t(1) << c)) continue;
        // Kernel vector with free coordinate c = 1: back-substitute pivots.
        std::uint64_t z = std::uint64_t(1) << c;
        for (std::size_t q = pivot_rows.size(); q-- > 0;) {
            const std::uint64_t rest = pivot_rows[q] & ~(std::uint64_t(1) << pivot_cols[q]);
            if (parity64(rest & z)) z |= std::uint64_t(1) << pivot_cols[q];
        }
        basis.emplace_back(z, m);
    }
    return basis;
}

}  // namespace chirpcs
