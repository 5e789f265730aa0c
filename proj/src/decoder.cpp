#include "chirpcs/decoder.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace chirpcs {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

double l2_norm(std::span<const cplx> v) {
    double acc = 0.0;
    for (const auto& z : v) acc += std::norm(z);
    return std::sqrt(acc);
}

std::optional<BinSymMatrix> make_symmetric(const std::vector<std::uint64_t>& rows, int m) {
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const bool a = (rows[static_cast<std::size_t>(i)] >> j) & 1u;
            const bool b = (rows[static_cast<std::size_t>(j)] >> i) & 1u;
            if (a != b) return std::nullopt;
        }
    return BinSymMatrix(rows, m);
}

// Inverse of an m x m GF(2) matrix given as packed rows; nullopt if singular.
std::optional<std::vector<std::uint64_t>> gf2_invert(std::vector<std::uint64_t> a, int m) {
    std::vector<std::uint64_t> inv(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i)] = std::uint64_t(1) << i;
    for (int col = 0; col < m; ++col) {
        int piv = -1;
        for (int row = col; row < m; ++row)
            if (a[static_cast<std::size_t>(row)] & (std::uint64_t(1) << col)) {
                piv = row;
                break;
            }
        if (piv < 0) return std::nullopt;
        std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(col)]);
        std::swap(inv[static_cast<std::size_t>(piv)], inv[static_cast<std::size_t>(col)]);
        for (int row = 0; row < m; ++row)
            if (row != col && (a[static_cast<std::size_t>(row)] & (std::uint64_t(1) << col))) {
                a[static_cast<std::size_t>(row)] ^= a[static_cast<std::size_t>(col)];
                inv[static_cast<std::size_t>(row)] ^= inv[static_cast<std::size_t>(col)];
            }
    }
    return inv;
}

}  // namespace

std::vector<cplx> ChirpDecoder::shift_autocorrelate(std::span<const cplx> f,
                                                    const BitVec& a) const {
    if (a.is_zero())
        throw std::invalid_argument("shift_autocorrelate: offset a must be nonzero");
    const std::size_t n = f.size();
    std::vector<cplx> out(n);
    const std::uint64_t aw = a.word();
    for (std::size_t x = 0; x < n; ++x) out[x] = f[x ^ aw] * std::conj(f[x]);
    return out;
}

BitVec ChirpDecoder::peak_offset_row(std::span<const cplx> f, const BitVec& a) const {
    std::vector<cplx> g = shift_autocorrelate(f, a);
    fwht(g);
    const Peak peak = power_spectrum_peak(g);
    return BitVec(static_cast<std::uint64_t>(peak.index), frame_->params().m);
}

std::optional<BinSymMatrix> ChirpDecoder::kerdock_rank_snap(
    const std::vector<std::uint64_t>& rows, int* snap_rank) const {
    const FrameParams& p = frame_->params();
    const int m = p.m;
    if (p.r != 0 || m > 15) return std::nullopt;

    // Gray-code walk over all 2^m Kerdock members; one basis XOR per step.
    std::vector<std::uint64_t> cur = rows;
    int best_rank = gf2_rank(cur);
    std::uint64_t best_t = 0;
    const std::uint64_t total = std::uint64_t(1) << m;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int q = std::countr_zero(i);
        for (int row = 0; row < m; ++row)
            cur[static_cast<std::size_t>(row)] ^=
                frame_->basis()[static_cast<std::size_t>(q)].row_word(row);
        const int rank = gf2_rank(cur);
        const std::uint64_t t = i ^ (i >> 1);
        if (rank < best_rank || (rank == best_rank && t < best_t)) {
            best_rank = rank;
            best_t = t;
        }
    }
    // Unique decoding radius for minimum rank distance m - 2r.
    if (best_rank > (m - 2 * p.r - 1) / 2) return std::nullopt;
    if (snap_rank) *snap_rank = best_rank;
    return frame_->matrix_for(best_t);
}

std::optional<BinSymMatrix> ChirpDecoder::assemble_candidate(
    const std::vector<std::uint64_t>& offset_rows, const std::vector<std::uint64_t>& peak_rows,
    bool offsets_are_identity, const RecoveryOptions& opts, int& failures,
    std::optional<BinSymMatrix>& best_snap, int& best_rank) const {
    const int m = frame_->params().m;

    std::vector<std::uint64_t> p_rows;
    if (offsets_are_identity) {
        p_rows = peak_rows;
    } else {
        const auto inv = gf2_invert(offset_rows, m);
        if (!inv) return std::nullopt;  // offsets are drawn independent, not expected
        p_rows.assign(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i) {
            std::uint64_t rest = (*inv)[static_cast<std::size_t>(i)];
            while (rest) {
                const int j = std::countr_zero(rest);
                rest &= rest - 1;
                p_rows[static_cast<std::size_t>(i)] ^= peak_rows[static_cast<std::size_t>(j)];
            }
        }
    }

    if (auto sym = make_symmetric(p_rows, m)) {
        if (frame_->coeffs_for(*sym)) return sym;
    }
    ++failures;
    if (opts.kerdock_projection) {
        int rank = 0;
        if (auto snapped = kerdock_rank_snap(p_rows, &rank))
            if (rank < best_rank) {
                best_rank = rank;
                best_snap = snapped;
            }
    }
    return std::nullopt;
}

std::optional<BinSymMatrix> ChirpDecoder::decode_matrix(std::span<const cplx> f,
                                                        const RecoveryOptions& opts, Rng& rng,
                                                        int& failures,
                                                        bool skip_standard_offsets) const {
    const int m = frame_->params().m;
    const std::uint64_t mask = (std::uint64_t(1) << m) - 1;

    std::optional<BinSymMatrix> best_snap;
    int best_rank = m + 1;

    if (!skip_standard_offsets) {
        std::vector<std::uint64_t> peaks(static_cast<std::size_t>(m));
        std::vector<std::uint64_t> offsets(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            const BitVec a = BitVec::unit(m, j);
            offsets[static_cast<std::size_t>(j)] = a.word();
            peaks[static_cast<std::size_t>(j)] = peak_offset_row(f, a).word();
        }
        if (auto p = assemble_candidate(offsets, peaks, true, opts, failures, best_snap, best_rank))
            return p;
    }

    for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
        // m random offsets forming an invertible matrix.
        std::vector<std::uint64_t> offsets;
        std::vector<std::uint64_t> echelon;
        while (static_cast<int>(offsets.size()) < m) {
            std::uint64_t a = rng.next_u64() & mask;
            std::uint64_t red = a;
            for (const auto& e : echelon) {
                const std::uint64_t low = e & (~e + 1);
                if (red & low) red ^= e;
            }
            if (red == 0) continue;
            offsets.push_back(a);
            echelon.push_back(red);
        }
        std::vector<std::uint64_t> peaks(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j)
            peaks[static_cast<std::size_t>(j)] =
                peak_offset_row(f, BitVec(offsets[static_cast<std::size_t>(j)], m)).word();
        if (auto p = assemble_candidate(offsets, peaks, false, opts, failures, best_snap, best_rank))
            return p;
    }
    // No batch came out clean; fall back to the closest Kerdock member seen.
    return best_snap;
}

BitVec ChirpDecoder::decode_b(std::span<const cplx> f, const BinSymMatrix& p_hat,
                              std::size_t* column_counter) const {
    const std::size_t n = frame_->params().n;
    if (column_counter) ++*column_counter;
    const auto qf = chirp_exponents(p_hat, 0, n);
    std::vector<cplx> g(n);
    for (std::size_t x = 0; x < n; ++x)
        g[x] = f[x] * GaussInt::unit_power(4 - qf[x]).to_complex();
    fwht(g);
    const Peak peak = power_spectrum_peak(g);
    return BitVec(static_cast<std::uint64_t>(peak.index), frame_->params().m);
}

cplx ChirpDecoder::estimate_coefficient(std::span<const cplx> f, const BinSymMatrix& p,
                                        const BitVec& b, std::size_t* column_counter) const {
    const std::size_t n = frame_->params().n;
    if (column_counter) ++*column_counter;
    const auto expo = chirp_exponents(p, b.word(), n);
    const int global = (p.diagonal().weight() + 2 * b.weight()) & 3;
    cplx acc = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        acc += f[x] * GaussInt::unit_power(8 - global - expo[x]).to_complex();
    // <sqrt(N) f, phi> / N
    return acc / std::sqrt(static_cast<double>(n));
}

void ChirpDecoder::peel(std::vector<cplx>& f, cplx alpha, const BinSymMatrix& p, const BitVec& b,
                        std::size_t* column_counter) const {
    const std::size_t n = frame_->params().n;
    if (column_counter) ++*column_counter;
    const auto expo = chirp_exponents(p, b.word(), n);
    const int global = (p.diagonal().weight() + 2 * b.weight()) & 3;
    const cplx scale = alpha / std::sqrt(static_cast<double>(n));
    for (std::size_t x = 0; x < n; ++x)
        f[x] -= scale * GaussInt::unit_power(global + expo[x]).to_complex();
}

std::vector<cplx> ChirpDecoder::least_squares_refit(std::span<const cplx> f,
                                                    std::span<const ColumnIndex> support,
                                                    std::size_t* column_counter,
                                                    double* residual_out) const {
    const std::size_t k = support.size();
    const std::size_t n = frame_->params().n;
    if (k == 0) return {};

    std::vector<std::vector<cplx>> cols(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (column_counter) ++*column_counter;
        cols[i] = frame_->column(support[i]).materialize();
    }

    // Normal equations A c = y with A = Phi^H Phi (Hermitian PSD), y = Phi^H f.
    std::vector<std::vector<cplx>> a(k, std::vector<cplx>(k));
    std::vector<cplx> y(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            cplx acc = 0.0;
            for (std::size_t x = 0; x < n; ++x) acc += std::conj(cols[i][x]) * cols[j][x];
            a[i][j] = acc;
            a[j][i] = std::conj(acc);
        }
        cplx acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) acc += std::conj(cols[i][x]) * f[x];
        y[i] = acc;
    }

    // Cholesky A = L L^H with pivot guard.
    const double pivot_floor = 1e-12 * static_cast<double>(n);
    std::vector<std::vector<cplx>> l(k, std::vector<cplx>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        double d = a[i][i].real();
        for (std::size_t q = 0; q < i; ++q) d -= std::norm(l[i][q]);
        if (d < pivot_floor)
            throw std::runtime_error("least_squares_refit: Gram matrix is singular or near-singular");
        l[i][i] = std::sqrt(d);
        for (std::size_t j = i + 1; j < k; ++j) {
            cplx s = a[j][i];
            for (std::size_t q = 0; q < i; ++q) s -= l[j][q] * std::conj(l[i][q]);
            l[j][i] = s / l[i][i];
        }
    }
    // Forward then backward substitution.
    std::vector<cplx> z(k);
    for (std::size_t i = 0; i < k; ++i) {
        cplx s = y[i];
        for (std::size_t q = 0; q < i; ++q) s -= l[i][q] * z[q];
        z[i] = s / l[i][i];
    }
    std::vector<cplx> c(k);
    for (std::size_t i = k; i-- > 0;) {
        cplx s = z[i];
        for (std::size_t q = i + 1; q < k; ++q) s -= std::conj(l[q][i]) * c[q];
        c[i] = s / l[i][i];
    }

    const double root_n = std::sqrt(static_cast<double>(n));
    for (auto& v : c) v *= root_n;

    if (residual_out) {
        double acc = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            cplx approx = 0.0;
            for (std::size_t j = 0; j < k; ++j) approx += (c[j] / root_n) * cols[j][x];
            acc += std::norm(f[x] - approx);
        }
        *residual_out = std::sqrt(acc);
    }
    return c;
}

RecoveryReport ChirpDecoder::recover(std::span<const cplx> f, const RecoveryOptions& opts) const {
    const FrameParams& params = frame_->params();
    if (opts.k < 1) throw std::invalid_argument("recover: k must be >= 1");
    if (f.size() != params.n) throw std::invalid_argument("recover: measurement length != N");

    const auto t0 = clock_type::now();
    RecoveryReport report;
    Rng rng(opts.seed);

    std::vector<cplx> f_t(f.begin(), f.end());
    const double f0_norm = l2_norm(f_t);
    const double eps = opts.stop_epsilon < 0 ? 1e-9 * f0_norm : opts.stop_epsilon;
    report.degenerate = f0_norm == 0.0;
    report.residual_norms.push_back(f0_norm);

    for (int t = 0; t < opts.k; ++t) {
        if (l2_norm(f_t) < eps) break;

        auto p_hat = decode_matrix(f_t, opts, rng, report.row_decode_failures);
        if (!p_hat) {
            report.decode_failed = true;
            break;
        }
        BitVec b_hat = decode_b(f_t, *p_hat, &report.columns_evaluated);
        ColumnIndex idx = frame_->index_for(*p_hat, b_hat);

        // A repeated index means the peak came from an already-peeled column;
        // re-decode with fresh random offsets (bounded so the column budget
        // k(m+2) + k^2 holds).
        auto is_dup = [&](const ColumnIndex& candidate) {
            return std::any_of(report.terms.begin(), report.terms.end(),
                               [&](const RecoveredTerm& term) { return term.index == candidate; });
        };
        int dup_tries = 0;
        while (is_dup(idx) && dup_tries < 2) {
            ++dup_tries;
            ++report.row_decode_failures;
            p_hat = decode_matrix(f_t, opts, rng, report.row_decode_failures, true);
            if (!p_hat) break;
            b_hat = decode_b(f_t, *p_hat, &report.columns_evaluated);
            idx = frame_->index_for(*p_hat, b_hat);
        }
        if (!p_hat || is_dup(idx)) {
            report.decode_failed = true;
            break;
        }

        const cplx alpha = estimate_coefficient(f_t, *p_hat, b_hat, &report.columns_evaluated);
        peel(f_t, alpha, *p_hat, b_hat, &report.columns_evaluated);
        report.terms.push_back({idx, alpha});
        report.residual_norms.push_back(l2_norm(f_t));
    }
    report.iterations = static_cast<int>(report.terms.size());
    report.decode_ms = ms_since(t0);

    const auto t1 = clock_type::now();
    if (!report.terms.empty()) {
        std::vector<ColumnIndex> support;
        support.reserve(report.terms.size());
        for (const auto& term : report.terms) support.push_back(term.index);
        try {
            const auto refit = least_squares_refit(f, support, &report.columns_evaluated,
                                                   &report.refit_residual);
            for (std::size_t i = 0; i < refit.size(); ++i) report.terms[i].coefficient = refit[i];
        } catch (const std::runtime_error&) {
            report.refit_failed = true;  // keep the greedy per-iteration estimates
            report.refit_residual = report.residual_norms.back();
        }
    }
    report.refit_ms = ms_since(t1);
    return report;
}

}  // namespace chirpcs
