#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chirpcs/frame.hpp"
#include "chirpcs/rng.hpp"
#include "chirpcs/wht.hpp"

namespace chirpcs {

struct RecoveryOptions {
    int k = 1;
    double stop_epsilon = -1.0;  // < 0 selects the default 1e-9 * ||f||_2
    int max_retries = 24;        // random-offset re-decode batches per iteration
    bool kerdock_projection = true;  // rank-distance snap onto DG(m,0); r = 0, m <= 15
    std::uint64_t seed = 0;
};

struct RecoveredTerm {
    ColumnIndex index;
    cplx coefficient;
};

struct RecoveryReport {
    std::vector<RecoveredTerm> terms;
    std::vector<double> residual_norms;  // ||f^1||, then after every peel
    double refit_residual = 0.0;         // ||f - (1/sqrt N) Phi_S alpha*||
    int iterations = 0;
    int row_decode_failures = 0;  // non-symmetric / out-of-span row decodes
    bool decode_failed = false;   // an iteration exhausted its retries
    bool refit_failed = false;    // singular Gram in the final refit
    bool degenerate = false;      // zero measurement
    std::size_t columns_evaluated = 0;
    double decode_ms = 0.0;
    double refit_ms = 0.0;

    bool clean() const { return !decode_failed && !refit_failed; }
};

/// Iterative chirp reconstruction over a DG(m, r) frame: per iteration the
/// residual is autocorrelated at m offsets, the Walsh-Hadamard power spectrum
/// peaks decode the rows of P, a dechirp decodes b, and the scalar
/// least-squares coefficient is peeled. A final joint least-squares refit
/// over the recovered support produces the output coefficients.
///
/// Work per iteration is O(N log^2 N) and never touches more than a handful
/// of columns, independent of the column count C.
class ChirpDecoder {
public:
    explicit ChirpDecoder(const DGFrame& frame) : frame_(&frame) {}

    /// out[x] = f[x ^ a] * conj(f[x]); a must be nonzero.
    std::vector<cplx> shift_autocorrelate(std::span<const cplx> f, const BitVec& a) const;

    /// Rows of P from power-spectrum peaks at the m standard offsets. When
    /// the raw rows are inconsistent (not symmetric, or outside the DG span)
    /// the decode re-solves from batches of random linearly independent
    /// offsets; if no batch comes out clean, the best rank-distance snap onto
    /// the Kerdock set seen across all batches (within the unique-decoding
    /// radius) is used. Returns nullopt when everything fails; `failures`
    /// counts the inconsistent decodes seen.
    std::optional<BinSymMatrix> decode_matrix(std::span<const cplx> f, const RecoveryOptions& opts,
                                              Rng& rng, int& failures,
                                              bool skip_standard_offsets = false) const;

    /// Dechirp by conj(i^(x P x^T)) and return the Walsh peak index.
    BitVec decode_b(std::span<const cplx> f, const BinSymMatrix& p_hat,
                    std::size_t* column_counter = nullptr) const;

    /// Closed-form scalar least squares: <sqrt(N) f, phi> / N.
    cplx estimate_coefficient(std::span<const cplx> f, const BinSymMatrix& p, const BitVec& b,
                              std::size_t* column_counter = nullptr) const;

    /// f[x] -= (alpha / sqrt(N)) phi(x); orthogonalizes f against phi.
    void peel(std::vector<cplx>& f, cplx alpha, const BinSymMatrix& p, const BitVec& b,
              std::size_t* column_counter = nullptr) const;

    /// Solve the k x k Hermitian normal equations over the support columns
    /// and return sqrt(N) * (Phi^H Phi)^-1 Phi^H f. Throws runtime_error when
    /// a Cholesky pivot falls below 1e-12 * N (duplicate or near-parallel
    /// columns). residual_out, when given, receives ||f - (1/sqrt N) Phi c||.
    std::vector<cplx> least_squares_refit(std::span<const cplx> f,
                                          std::span<const ColumnIndex> support,
                                          std::size_t* column_counter = nullptr,
                                          double* residual_out = nullptr) const;

    RecoveryReport recover(std::span<const cplx> f, const RecoveryOptions& opts) const;

    /// Rank-metric projection onto the Kerdock set: the member minimizing
    /// rank(rows ^ M), accepted only inside the unique-decoding radius
    /// (m - 2r - 1)/2. Exposed for tests.
    std::optional<BinSymMatrix> kerdock_rank_snap(const std::vector<std::uint64_t>& rows,
                                                  int* snap_rank = nullptr) const;

private:
    const DGFrame* frame_;

    BitVec peak_offset_row(std::span<const cplx> f, const BitVec& a) const;
    // Clean decode of one offset batch: peaks -> P, requiring symmetry and
    // DG membership. On failure records a rank-snap candidate into
    // best_snap/best_rank instead.
    std::optional<BinSymMatrix> assemble_candidate(const std::vector<std::uint64_t>& offset_rows,
                                                   const std::vector<std::uint64_t>& peak_rows,
                                                   bool offsets_are_identity,
                                                   const RecoveryOptions& opts, int& failures,
                                                   std::optional<BinSymMatrix>& best_snap,
                                                   int& best_rank) const;
};

}  // namespace chirpcs
