#include <doctest.h>

#include "chirpcs/frame.hpp"
#include "chirpcs/gf2.hpp"
#include "chirpcs/rng.hpp"

using namespace chirpcs;

namespace {

BinSymMatrix from_triangle(std::uint64_t bits, int m) {
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
    int cell = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j, ++cell)
            if ((bits >> cell) & 1u) {
                rows[static_cast<std::size_t>(i)] |= std::uint64_t(1) << j;
                rows[static_cast<std::size_t>(j)] |= std::uint64_t(1) << i;
            }
    return BinSymMatrix(rows, m);
}

}  // namespace

TEST_CASE("BitVec basics") {
    BitVec v(0b10110, 5);
    CHECK(v.length() == 5);
    CHECK(v.weight() == 3);
    CHECK(v.bit(1));
    CHECK_FALSE(v.bit(0));
    CHECK(BitVec::unit(5, 2).word() == 4);
    CHECK((v ^ v).is_zero());
    CHECK(v.dot(BitVec(0b00110, 5)) == false);  // overlap weight 2
    CHECK(v.dot(BitVec(0b00010, 5)) == true);
    CHECK_THROWS_AS(BitVec(0b100, 2), std::invalid_argument);
    CHECK_THROWS_AS(BitVec::unit(3, 3), std::invalid_argument);
}

TEST_CASE("BinSymMatrix construction enforces symmetry") {
    CHECK_NOTHROW(BinSymMatrix::identity(4));
    std::vector<std::uint64_t> bad = {0b10, 0b00};  // P[0][1] = 1, P[1][0] = 0
    CHECK_THROWS_AS(BinSymMatrix(bad, 2), std::invalid_argument);
}

TEST_CASE("diagonal") {
    const int m = 4;
    CHECK(BinSymMatrix::zero(m).diagonal().is_zero());
    CHECK(BinSymMatrix::identity(m).diagonal().weight() == m);
    // symmetric with zero diagonal: the pairs (0,1) and (2,3)
    std::vector<std::uint64_t> rows = {0b0010, 0b0001, 0b1000, 0b0100};
    CHECK(BinSymMatrix(rows, m).diagonal().is_zero());
}

TEST_CASE("rank: zero and identity") {
    CHECK(gf2_rank(BinSymMatrix::zero(3)) == 0);
    CHECK(gf2_rank(BinSymMatrix::identity(3)) == 3);
}

TEST_CASE("rank equals rank of transpose and survives permutation") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + static_cast<int>(rng.next_below(7));
        std::vector<std::uint64_t> rows(static_cast<std::size_t>(m));
        const std::uint64_t mask = (std::uint64_t(1) << m) - 1;
        for (auto& r : rows) r = rng.next_u64() & mask;
        // transpose
        std::vector<std::uint64_t> cols(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if ((rows[static_cast<std::size_t>(i)] >> j) & 1u)
                    cols[static_cast<std::size_t>(j)] |= std::uint64_t(1) << i;
        CHECK(gf2_rank(rows) == gf2_rank(cols));
    }
    // symmetric P under matched row+column permutation keeps its rank
    Rng rng2(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 5;
        const BinSymMatrix p = from_triangle(rng2.next_u64() & 0x7FFF, m);
        std::vector<int> perm = {0, 1, 2, 3, 4};
        for (int i = m - 1; i > 0; --i)
            std::swap(perm[static_cast<std::size_t>(i)],
                      perm[static_cast<std::size_t>(rng2.next_below(static_cast<std::uint64_t>(i + 1)))]);
        std::vector<std::uint64_t> permuted(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (p.bit(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]))
                    permuted[static_cast<std::size_t>(i)] |= std::uint64_t(1) << j;
        CHECK(gf2_rank(permuted) == gf2_rank(p));
    }
}

TEST_CASE("solve_in_rowspace: zero and identity cases") {
    const BinSymMatrix z3 = BinSymMatrix::zero(3);
    const auto s0 = solve_in_rowspace(z3, BitVec::zero(3));
    REQUIRE(s0.has_value());

    const BinSymMatrix i3 = BinSymMatrix::identity(3);
    const auto s1 = solve_in_rowspace(i3, BitVec(0b111, 3));
    REQUIRE(s1.has_value());
    CHECK(s1->word() == 0b111);

    // unsolvable: zero matrix, nonzero rhs
    CHECK_FALSE(solve_in_rowspace(z3, BitVec(0b1, 3)).has_value());
}

TEST_CASE("diagonal lies in the row space, exhaustively for m=3") {
    const int m = 3;
    for (std::uint64_t tri = 0; tri < (1u << 6); ++tri) {
        const BinSymMatrix p = from_triangle(tri, m);
        const BitVec d = p.diagonal();
        const auto z = solve_in_rowspace(p, d);
        REQUIRE(z.has_value());
        for (int j = 0; j < m; ++j)
            CHECK(parity64(z->word() & p.row_word(j)) == static_cast<int>(d.bit(j)));
    }
}

TEST_CASE("diag_rowspace certificate: m=3 exhaustive") {
    const auto cert = verify_diag_rowspace(3);
    CHECK(cert.pass);
    CHECK(cert.pairs_checked == 64);
    CHECK(cert.exhaustive);
}

TEST_CASE("nullspace basis spans the kernel") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 5;
        const BinSymMatrix p = from_triangle(rng.next_u64() & 0x7FFF, m);
        const auto basis = nullspace_basis(p);
        CHECK(static_cast<int>(basis.size()) == m - gf2_rank(p));
        for (const auto& e : basis)
            for (int j = 0; j < m; ++j) CHECK(parity64(e.word() & p.row_word(j)) == 0);
    }
}

TEST_CASE("gf2_solve rejects inconsistent systems") {
    // x0 = 0 and x0 = 1
    CHECK_FALSE(gf2_solve({1, 1}, {0, 1}, 1).has_value());
    const auto sol = gf2_solve({0b11, 0b01}, {0, 1}, 2);
    REQUIRE(sol.has_value());
    CHECK((*sol & 1) == 1);
    CHECK(parity64(*sol & 0b11) == 0);
}
