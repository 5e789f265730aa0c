#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chirpcs/bitvec.hpp"
#include "chirpcs/gaussint.hpp"
#include "chirpcs/gf2.hpp"
#include "chirpcs/gf2m.hpp"
#include "chirpcs/rng.hpp"
#include "chirpcs/wht.hpp"

namespace chirpcs {

/// Ambient dimensions of the Delsarte-Goethals frame DG(m, r):
/// N = 2^m rows, C = 2^((r+2)m) columns, eta = 1 - 2r/m.
/// (r+2)m is capped at 62 so that flat column indices and C fit in a word.
struct FrameParams {
    int m = 0;
    int r = 0;
    std::size_t n = 0;
    std::uint64_t columns = 0;
    double eta = 0.0;

    FrameParams(int m_, int r_);

    int coeff_bits() const { return (r + 1) * m; }
    int index_bits() const { return (r + 2) * m; }
};

/// Column label: coordinates of P in the DG basis plus the Walsh shift b.
/// Flat encoding: high (r+1)m bits = dg_coeffs, low m bits = b.
struct ColumnIndex {
    std::uint64_t dg_coeffs = 0;
    BitVec b;

    std::uint64_t flat(const FrameParams& p) const {
        return (dg_coeffs << p.m) | b.word();
    }
    static ColumnIndex from_flat(const FrameParams& p, std::uint64_t flat);

    bool operator==(const ColumnIndex&) const = default;
};

/// Exact Z4-exponent representation of a chirp column
/// phi(x) = i^global_phase * i^exponents[x]. Materialization to complex
/// doubles is lossless (entries are exactly +-1, +-i).
struct ChirpColumn {
    int global_phase = 0;
    std::vector<std::uint8_t> exponents;

    cplx entry(std::size_t x) const {
        return GaussInt::unit_power(global_phase + exponents[x]).to_complex();
    }
    GaussInt exact_entry(std::size_t x) const {
        return GaussInt::unit_power(global_phase + exponents[x]);
    }
    std::vector<cplx> materialize() const;
};

/// Z4 lift of the binary quadratic form:
/// (sum_i P[i][i] x_i + 2 sum_{i<j} P[i][j] x_i x_j) mod 4.
int quad_form_z4(const BinSymMatrix& p, std::uint64_t x);
int quad_form_z4(const BinSymMatrix& p, const BitVec& x);

/// exponents[x] = (x P x^T + 2 b.x) mod 4 for all x in [0, n); O(n m).
std::vector<std::uint8_t> chirp_exponents(const BinSymMatrix& p, std::uint64_t b_word,
                                          std::size_t n);

/// Kerdock matrix M_t[i][j] = tr(t x^i x^j); t -> M_t is linear and injective,
/// and every nonzero M_t is nonsingular (certified by tests, not assumed).
BinSymMatrix kerdock_matrix(const GF2m& field, std::uint64_t t);

/// Layer-j basis form (j >= 1): B[i][j] = tr(t (x^a (x^b)^(2^j) + (x^a)^(2^j) x^b)).
/// Symmetric with zero diagonal.
BinSymMatrix dg_layer_matrix(const GF2m& field, std::uint64_t t, int layer);

struct GaussSumResult {
    GaussInt value;             // brute-force sum_x i^(x P x^T + 2 b.x)
    int rank_r = 0;             // GF(2) rank of P
    GaussInt square_predicted;  // structural value of S^2

    /// value^2 == square_predicted and |value|^2 in {0, 2^(2m - rank)}.
    bool law_holds(int m) const;
};

/// Exact Gauss sum plus its structurally predicted square; certificates
/// compare the two via law_holds().
GaussSumResult gauss_sum(const BinSymMatrix& p, const BitVec& b);

/// One machine-checked certificate over a frame property.
struct CertificateRecord {
    std::string check_name;
    int m = 0;
    int r = 0;
    std::uint64_t pairs_checked = 0;
    std::uint64_t violations = 0;
    double elapsed_ms = 0.0;
    bool pass = true;
    bool exhaustive = true;
    std::string witness;  // first failing case, empty when pass
};

class DGFrame {
public:
    /// Builds the DG(m, r) basis and certifies the rank-distance property
    /// before the frame becomes usable (throws on certificate failure).
    explicit DGFrame(FrameParams params);

    const FrameParams& params() const { return params_; }
    const GF2m& field() const { return field_; }

    /// (r+1)m basis matrices; layer 0 first (Kerdock), then layers 1..r.
    /// DG(m, r)'s basis is a prefix of DG(m, r+1)'s.
    const std::vector<BinSymMatrix>& basis() const { return basis_; }

    BinSymMatrix matrix_for(std::uint64_t dg_coeffs) const;

    /// DG coordinates of p, or nullopt when p is outside the span.
    std::optional<std::uint64_t> coeffs_for(const BinSymMatrix& p) const;

    ColumnIndex index_for(const BinSymMatrix& p, const BitVec& b) const;

    ChirpColumn column(const ColumnIndex& idx) const;
    BinSymMatrix matrix_of(const ColumnIndex& idx) const { return matrix_for(idx.dg_coeffs); }

    /// Index whose column is the pointwise product of the two given columns,
    /// verified entrywise in exact Z4 arithmetic (throws on closure violation).
    ColumnIndex group_product(const ColumnIndex& a, const ColumnIndex& b) const;

    ColumnIndex sample_index(Rng& rng) const;

    const CertificateRecord& construction_certificate() const { return construction_cert_; }

private:
    FrameParams params_;
    GF2m field_;
    std::vector<BinSymMatrix> basis_;
    std::vector<std::pair<int, int>> pivot_cells_;  // triangle cells of the membership solve
    std::vector<std::uint64_t> inv_rows_;           // inverse of the pivot submatrix
    CertificateRecord construction_cert_;

    void build_basis();
    void build_membership_solver();
};

/// Rank-distance certificate: every difference of two distinct DG members has
/// rank >= m - 2r. The member set is linear, so the differences of distinct
/// members are exactly the nonzero members; those are what get enumerated.
/// Exhaustive when (r+1)m <= exhaustive_bit_limit, sampled otherwise.
CertificateRecord verify_rank_distance(const FrameParams& params,
                                       const std::vector<BinSymMatrix>& basis,
                                       int exhaustive_bit_limit = 20,
                                       std::uint64_t samples = 4096);
CertificateRecord verify_rank_distance(const DGFrame& frame);

/// Group-closure certificate: ordered column pairs multiply pointwise to
/// another column, checked in exact Z4 arithmetic.
CertificateRecord verify_group_closure(const DGFrame& frame,
                                       std::uint64_t max_exhaustive_pairs = std::uint64_t(1) << 21,
                                       std::uint64_t samples = std::uint64_t(1) << 18,
                                       std::uint64_t seed = 1);

/// Gauss-sum law certificate: brute-force S^2 equals the structural
/// prediction and |S|^2 is 0 or 2^(2m - rank P), over all (P, b) with P
/// symmetric (not just DG members) when m <= 5, sampled otherwise.
CertificateRecord verify_gauss_sum_law(int m, int max_exhaustive_m = 5,
                                       std::uint64_t samples = 2048, std::uint64_t seed = 1);

/// Row-space certificate: diagonal(P) lies in the row space of P for
/// every binary symmetric P (exhaustive for m <= 5, sampled otherwise).
CertificateRecord verify_diag_rowspace(int m, int max_exhaustive_m = 5,
                                       std::uint64_t samples = 4096, std::uint64_t seed = 1);

struct SpectrumReport {
    CertificateRecord cert;
    std::set<std::uint64_t> observed;        // |sum phi|^2 over columns with P != 0
    std::set<std::uint64_t> observed_walsh;  // P = 0 columns, reported separately
};

/// Column-sum spectrum certificate: for P != 0, |sum_x phi(x)|^2 is 0 or
/// 2^(2m-t) with t in [m-2r, m]. Pure Walsh columns (P = 0) bypass the bound
/// and land in their own bucket.
SpectrumReport column_sum_spectrum(const DGFrame& frame,
                                   std::uint64_t max_exhaustive_columns = std::uint64_t(1) << 22,
                                   std::uint64_t samples = std::uint64_t(1) << 16,
                                   std::uint64_t seed = 1);

/// Tight-frame certificate: sum over all C columns of phi(x) conj(phi(x'))
/// equals C delta_{x,x'} in exact Gaussian-integer arithmetic. All C columns
/// enter every checked (x, x') pair; the pair set itself is subsampled when
/// C N^2 is too large to enumerate fully.
CertificateRecord verify_tight_frame(const DGFrame& frame,
                                     std::uint64_t max_exhaustive_work = std::uint64_t(1) << 26,
                                     std::uint64_t seed = 1);

}  // namespace chirpcs
