#include "chirpcs/frame.hpp"

#include <bit>
#include <chrono>
#include <stdexcept>

namespace chirpcs {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

// Symmetric matrix from packed upper-triangle bits, cell order (0,0), (0,1),
// ..., (0,m-1), (1,1), ...
BinSymMatrix symmetric_from_triangle(std::uint64_t bits, int m) {
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

int triangle_cells(int m) { return m * (m + 1) / 2; }

}  // namespace

FrameParams::FrameParams(int m_, int r_) : m(m_), r(r_) {
    if (m < 3 || m > 25 || m % 2 == 0)
        throw std::invalid_argument("FrameParams: m must be odd and in [3, 25]");
    if (r < 0 || r > (m - 1) / 2)
        throw std::invalid_argument("FrameParams: r must be in [0, (m-1)/2]");
    if ((r + 2) * m > 62)
        throw std::invalid_argument(
            "FrameParams: (r+2)*m must be at most 62 so flat column indices fit in a word");
    n = std::size_t(1) << m;
    columns = std::uint64_t(1) << ((r + 2) * m);
    eta = 1.0 - 2.0 * static_cast<double>(r) / static_cast<double>(m);
}

ColumnIndex ColumnIndex::from_flat(const FrameParams& p, std::uint64_t flat) {
    if (flat >= p.columns) throw std::invalid_argument("ColumnIndex: flat index out of range");
    ColumnIndex idx;
    idx.b = BitVec(flat & ((std::uint64_t(1) << p.m) - 1), p.m);
    idx.dg_coeffs = flat >> p.m;
    return idx;
}

std::vector<cplx> ChirpColumn::materialize() const {
    std::vector<cplx> out(exponents.size());
    for (std::size_t x = 0; x < exponents.size(); ++x) out[x] = entry(x);
    return out;
}

int quad_form_z4(const BinSymMatrix& p, std::uint64_t x) {
    const int diag = std::popcount(p.diagonal().word() & x);
    int off = 0;
    std::uint64_t rest = x;
    while (rest) {
        const int i = std::countr_zero(rest);
        rest &= rest - 1;
        // pairs (i, j) with j > i only; each unordered pair counted once
        off ^= parity64(p.row_word(i) & x & ~((std::uint64_t(2) << i) - 1));
    }
    return (diag + 2 * off) & 3;
}

int quad_form_z4(const BinSymMatrix& p, const BitVec& x) { return quad_form_z4(p, x.word()); }

std::vector<std::uint8_t> chirp_exponents(const BinSymMatrix& p, std::uint64_t b_word,
                                          std::size_t n) {
    const int m = p.dim();
    const std::uint64_t diag = p.diagonal().word();
    std::vector<std::uint64_t> rows_above(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        rows_above[static_cast<std::size_t>(i)] = p.row_word(i) & ~((std::uint64_t(2) << i) - 1);

    std::vector<std::uint8_t> expo(n);
    for (std::size_t x = 0; x < n; ++x) {
        const int d = std::popcount(diag & x);
        int off = parity64(b_word & x);
        std::uint64_t rest = x;
        while (rest) {
            const int i = std::countr_zero(rest);
            rest &= rest - 1;
            off ^= parity64(rows_above[static_cast<std::size_t>(i)] & x);
        }
        expo[x] = static_cast<std::uint8_t>((d + 2 * off) & 3);
    }
    return expo;
}

BinSymMatrix kerdock_matrix(const GF2m& field, std::uint64_t t) {
    const int m = field.degree();
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
    for (int a = 0; a < m; ++a) {
        const std::uint64_t xa = std::uint64_t(1) << a;
        for (int b = a; b < m; ++b) {
            const std::uint64_t xb = std::uint64_t(1) << b;
            if (field.trace(field.mul(t, field.mul(xa, xb)))) {
                rows[static_cast<std::size_t>(a)] |= std::uint64_t(1) << b;
                rows[static_cast<std::size_t>(b)] |= std::uint64_t(1) << a;
            }
        }
    }
    return BinSymMatrix(rows, m);
}

BinSymMatrix dg_layer_matrix(const GF2m& field, std::uint64_t t, int layer) {
    if (layer < 1) throw std::invalid_argument("dg_layer_matrix: layer must be >= 1");
    const int m = field.degree();
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
    for (int a = 0; a < m; ++a) {
        const std::uint64_t xa = std::uint64_t(1) << a;
        const std::uint64_t xaf = field.frob(xa, layer);
        for (int b = a + 1; b < m; ++b) {  // zero diagonal: x^a (x^a)^(2^j) pairs cancel
            const std::uint64_t xb = std::uint64_t(1) << b;
            const std::uint64_t xbf = field.frob(xb, layer);
            const std::uint64_t form = field.add(field.mul(xa, xbf), field.mul(xaf, xb));
            if (field.trace(field.mul(t, form))) {
                rows[static_cast<std::size_t>(a)] |= std::uint64_t(1) << b;
                rows[static_cast<std::size_t>(b)] |= std::uint64_t(1) << a;
            }
        }
    }
    return BinSymMatrix(rows, m);
}

GaussSumResult gauss_sum(const BinSymMatrix& p, const BitVec& b) {
    const int m = p.dim();
    const std::size_t n = std::size_t(1) << m;

    GaussSumResult res;
    const auto expo = chirp_exponents(p, b.word(), n);
    std::int64_t counts[4] = {0, 0, 0, 0};
    for (std::size_t x = 0; x < n; ++x) ++counts[expo[x]];
    res.value = GaussInt(counts[0] - counts[2], counts[1] - counts[3]);

    res.rank_r = gf2_rank(p);

    // S^2 vanishes unless e -> e P e^T + 2 b.e is the zero map on the null
    // space E; otherwise S^2 = i^(z1 P z1^T + 2 b.z1) 2^(2m - R), z1 P = d_P.
    bool vanishes = false;
    for (const auto& e : nullspace_basis(p)) {
        const int nu = (quad_form_z4(p, e) + 2 * static_cast<int>(b.dot(e))) & 3;
        if (nu != 0) {
            vanishes = true;
            break;
        }
    }
    if (!vanishes) {
        const auto z1 = solve_in_rowspace(p, p.diagonal());
        if (!z1) throw std::logic_error("gauss_sum: diagonal not in row space");
        const int c = (quad_form_z4(p, *z1) + 2 * static_cast<int>(b.dot(*z1))) & 3;
        const std::int64_t mag = std::int64_t(1) << (2 * m - res.rank_r);
        res.square_predicted = GaussInt::unit_power(c) * GaussInt(mag, 0);
    }
    return res;
}

bool GaussSumResult::law_holds(int m) const {
    if (value * value != square_predicted) return false;
    if (value.is_zero()) return true;
    return value.norm2() == (std::uint64_t(1) << (2 * m - rank_r));
}

DGFrame::DGFrame(FrameParams params) : params_(params), field_(params.m) {
    build_basis();
    build_membership_solver();
    construction_cert_ = verify_rank_distance(params_, basis_);
    if (!construction_cert_.pass)
        throw std::runtime_error("DGFrame: rank-distance certificate failed for (m=" +
                                 std::to_string(params_.m) + ", r=" + std::to_string(params_.r) +
                                 "): " + construction_cert_.witness);
}

void DGFrame::build_basis() {
    basis_.reserve(static_cast<std::size_t>(params_.coeff_bits()));
    for (int i = 0; i < params_.m; ++i)
        basis_.push_back(kerdock_matrix(field_, std::uint64_t(1) << i));
    for (int j = 1; j <= params_.r; ++j)
        for (int i = 0; i < params_.m; ++i)
            basis_.push_back(dg_layer_matrix(field_, std::uint64_t(1) << i, j));
}

void DGFrame::build_membership_solver() {
    const int m = params_.m;
    const int u = params_.coeff_bits();

    // Pick u triangle cells whose equations are independent; this doubles as
    // the GF(2)-independence certificate for the basis.
    std::vector<std::uint64_t> echelon;
    std::vector<int> echelon_piv;
    std::vector<std::uint64_t> square_rows;
    for (int i = 0; i < m && static_cast<int>(pivot_cells_.size()) < u; ++i) {
        for (int j = i; j < m && static_cast<int>(pivot_cells_.size()) < u; ++j) {
            std::uint64_t row = 0;
            for (int q = 0; q < u; ++q)
                row |= std::uint64_t(basis_[static_cast<std::size_t>(q)].bit(i, j)) << q;
            std::uint64_t red = row;
            for (std::size_t e = 0; e < echelon.size(); ++e)
                if (red & (std::uint64_t(1) << echelon_piv[e])) red ^= echelon[e];
            if (red == 0) continue;
            pivot_cells_.emplace_back(i, j);
            square_rows.push_back(row);
            echelon_piv.push_back(std::countr_zero(red));
            echelon.push_back(red);
        }
    }
    if (static_cast<int>(pivot_cells_.size()) < u)
        throw std::runtime_error("DGFrame: basis matrices are linearly dependent");

    // Invert the u x u pivot submatrix (Gauss-Jordan over GF(2)).
    std::vector<std::uint64_t> a = square_rows;
    inv_rows_.assign(static_cast<std::size_t>(u), 0);
    for (int i = 0; i < u; ++i) inv_rows_[static_cast<std::size_t>(i)] = std::uint64_t(1) << i;
    for (int col = 0; col < u; ++col) {
        int piv = -1;
        for (int row = col; row < u; ++row)
            if (a[static_cast<std::size_t>(row)] & (std::uint64_t(1) << col)) {
                piv = row;
                break;
            }
        if (piv < 0) throw std::logic_error("DGFrame: pivot submatrix is singular");
        std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(col)]);
        std::swap(inv_rows_[static_cast<std::size_t>(piv)], inv_rows_[static_cast<std::size_t>(col)]);
        for (int row = 0; row < u; ++row)
            if (row != col && (a[static_cast<std::size_t>(row)] & (std::uint64_t(1) << col))) {
                a[static_cast<std::size_t>(row)] ^= a[static_cast<std::size_t>(col)];
                inv_rows_[static_cast<std::size_t>(row)] ^= inv_rows_[static_cast<std::size_t>(col)];
            }
    }
}

BinSymMatrix DGFrame::matrix_for(std::uint64_t dg_coeffs) const {
    const int m = params_.m;
    if (params_.coeff_bits() < 64 && (dg_coeffs >> params_.coeff_bits()) != 0)
        throw std::invalid_argument("DGFrame: dg_coeffs out of range");
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
    std::uint64_t rest = dg_coeffs;
    while (rest) {
        const int q = std::countr_zero(rest);
        rest &= rest - 1;
        for (int i = 0; i < m; ++i)
            rows[static_cast<std::size_t>(i)] ^= basis_[static_cast<std::size_t>(q)].row_word(i);
    }
    return BinSymMatrix(rows, m);
}

std::optional<std::uint64_t> DGFrame::coeffs_for(const BinSymMatrix& p) const {
    if (p.dim() != params_.m) throw std::invalid_argument("DGFrame: dimension mismatch");
    const int u = params_.coeff_bits();
    std::uint64_t rhs = 0;
    for (int idx = 0; idx < u; ++idx) {
        const auto [i, j] = pivot_cells_[static_cast<std::size_t>(idx)];
        rhs |= std::uint64_t(p.bit(i, j)) << idx;
    }
    std::uint64_t coeffs = 0;
    for (int q = 0; q < u; ++q)
        coeffs |= std::uint64_t(parity64(inv_rows_[static_cast<std::size_t>(q)] & rhs)) << q;
    if (!(matrix_for(coeffs) == p)) return std::nullopt;
    return coeffs;
}

ColumnIndex DGFrame::index_for(const BinSymMatrix& p, const BitVec& b) const {
    const auto coeffs = coeffs_for(p);
    if (!coeffs) throw std::invalid_argument("DGFrame: matrix is not a DG(m,r) member");
    return ColumnIndex{*coeffs, b};
}

ChirpColumn DGFrame::column(const ColumnIndex& idx) const {
    const BinSymMatrix p = matrix_for(idx.dg_coeffs);
    ChirpColumn col;
    col.global_phase = (p.diagonal().weight() + 2 * idx.b.weight()) & 3;
    col.exponents = chirp_exponents(p, idx.b.word(), params_.n);
    return col;
}

ColumnIndex DGFrame::group_product(const ColumnIndex& a, const ColumnIndex& b) const {
    const BinSymMatrix pa = matrix_for(a.dg_coeffs);
    const BinSymMatrix pb = matrix_for(b.dg_coeffs);
    ColumnIndex prod;
    prod.dg_coeffs = a.dg_coeffs ^ b.dg_coeffs;
    prod.b = a.b ^ b.b ^ (pa.diagonal() & pb.diagonal());

    const ChirpColumn ca = column(a);
    const ChirpColumn cb = column(b);
    const ChirpColumn cp = column(prod);
    for (std::size_t x = 0; x < params_.n; ++x) {
        const int lhs = (ca.global_phase + ca.exponents[x] + cb.global_phase + cb.exponents[x]) & 3;
        const int rhs = (cp.global_phase + cp.exponents[x]) & 3;
        if (lhs != rhs)
            throw std::logic_error("DGFrame: group closure violated at x=" + std::to_string(x));
    }
    return prod;
}

ColumnIndex DGFrame::sample_index(Rng& rng) const {
    ColumnIndex idx;
    idx.dg_coeffs = rng.next_u64() & ((std::uint64_t(1) << params_.coeff_bits()) - 1);
    idx.b = BitVec(rng.next_u64() & ((std::uint64_t(1) << params_.m) - 1), params_.m);
    return idx;
}

CertificateRecord verify_rank_distance(const FrameParams& params,
                                       const std::vector<BinSymMatrix>& basis,
                                       int exhaustive_bit_limit, std::uint64_t samples) {
    const auto t0 = clock_type::now();
    CertificateRecord cert;
    cert.check_name = "rank_distance";
    cert.m = params.m;
    cert.r = params.r;

    const int m = params.m;
    const int u = params.coeff_bits();
    const int min_rank = m - 2 * params.r;

    auto check = [&](const BinSymMatrix& p, std::uint64_t coeffs) {
        ++cert.pairs_checked;
        const int rank = gf2_rank(p);
        if (rank < min_rank) {
            ++cert.violations;
            if (cert.witness.empty())
                cert.witness = "coeffs=" + std::to_string(coeffs) + " rank=" + std::to_string(rank);
        }
    };

    if (u <= exhaustive_bit_limit) {
        // Gray-code walk over all nonzero members: one basis XOR per step.
        std::vector<std::uint64_t> cur(static_cast<std::size_t>(m), 0);
        const std::uint64_t total = std::uint64_t(1) << u;
        for (std::uint64_t i = 1; i < total; ++i) {
            const int q = std::countr_zero(i);
            for (int row = 0; row < m; ++row)
                cur[static_cast<std::size_t>(row)] ^=
                    basis[static_cast<std::size_t>(q)].row_word(row);
            check(BinSymMatrix(cur, m), i ^ (i >> 1));
        }
    } else {
        cert.exhaustive = false;
        auto matrix_for = [&](std::uint64_t coeffs) {
            std::vector<std::uint64_t> rows(static_cast<std::size_t>(m), 0);
            std::uint64_t rest = coeffs;
            while (rest) {
                const int q = std::countr_zero(rest);
                rest &= rest - 1;
                for (int i = 0; i < m; ++i)
                    rows[static_cast<std::size_t>(i)] ^= basis[static_cast<std::size_t>(q)].row_word(i);
            }
            return BinSymMatrix(rows, m);
        };
        for (int q = 0; q < u; ++q) check(basis[static_cast<std::size_t>(q)], std::uint64_t(1) << q);
        for (int q1 = 0; q1 < u; ++q1)
            for (int q2 = q1 + 1; q2 < u; ++q2)
                check(basis[static_cast<std::size_t>(q1)] ^ basis[static_cast<std::size_t>(q2)],
                      (std::uint64_t(1) << q1) | (std::uint64_t(1) << q2));
        Rng rng(0x6B8B4567u);
        const std::uint64_t mask = (std::uint64_t(1) << u) - 1;
        for (std::uint64_t s = 0; s < samples; ++s) {
            std::uint64_t coeffs = 0;
            while (coeffs == 0) coeffs = rng.next_u64() & mask;
            check(matrix_for(coeffs), coeffs);
        }
    }

    cert.pass = cert.violations == 0;
    cert.elapsed_ms = ms_since(t0);
    return cert;
}

CertificateRecord verify_rank_distance(const DGFrame& frame) {
    return verify_rank_distance(frame.params(), frame.basis());
}

CertificateRecord verify_group_closure(const DGFrame& frame, std::uint64_t max_exhaustive_pairs,
                                       std::uint64_t samples, std::uint64_t seed) {
    const auto t0 = clock_type::now();
    const FrameParams& p = frame.params();
    CertificateRecord cert;
    cert.check_name = "group_closure";
    cert.m = p.m;
    cert.r = p.r;

    const std::uint64_t c = p.columns;
    const bool exhaustive = p.index_bits() <= 31 && c * c <= max_exhaustive_pairs;
    cert.exhaustive = exhaustive;

    // Precompute exponent tables and diagonals for the exhaustive case; the
    // sampled path regenerates per pair.
    auto check_pair = [&](const ColumnIndex& i1, const ColumnIndex& i2,
                          const ChirpColumn& c1, const ChirpColumn& c2) {
        ++cert.pairs_checked;
        const BinSymMatrix p1 = frame.matrix_of(i1);
        const BinSymMatrix p2 = frame.matrix_of(i2);
        ColumnIndex prod;
        prod.dg_coeffs = i1.dg_coeffs ^ i2.dg_coeffs;
        prod.b = i1.b ^ i2.b ^ (p1.diagonal() & p2.diagonal());
        const ChirpColumn cp = frame.column(prod);
        for (std::size_t x = 0; x < p.n; ++x) {
            const int lhs = (c1.global_phase + c1.exponents[x] + c2.global_phase + c2.exponents[x]) & 3;
            const int rhs = (cp.global_phase + cp.exponents[x]) & 3;
            if (lhs != rhs) {
                ++cert.violations;
                if (cert.witness.empty())
                    cert.witness = "pair flat=(" + std::to_string(i1.flat(p)) + "," +
                                   std::to_string(i2.flat(p)) + ") x=" + std::to_string(x);
                return;
            }
        }
    };

    if (exhaustive) {
        std::vector<ChirpColumn> cols(c);
        std::vector<ColumnIndex> idxs(c);
        for (std::uint64_t f = 0; f < c; ++f) {
            idxs[f] = ColumnIndex::from_flat(p, f);
            cols[f] = frame.column(idxs[f]);
        }
        for (std::uint64_t f1 = 0; f1 < c; ++f1)
            for (std::uint64_t f2 = 0; f2 < c; ++f2)
                check_pair(idxs[f1], idxs[f2], cols[f1], cols[f2]);
    } else {
        Rng rng(seed);
        for (std::uint64_t s = 0; s < samples; ++s) {
            const ColumnIndex i1 = frame.sample_index(rng);
            const ColumnIndex i2 = frame.sample_index(rng);
            check_pair(i1, i2, frame.column(i1), frame.column(i2));
        }
    }

    cert.pass = cert.violations == 0;
    cert.elapsed_ms = ms_since(t0);
    return cert;
}

CertificateRecord verify_gauss_sum_law(int m, int max_exhaustive_m, std::uint64_t samples,
                                       std::uint64_t seed) {
    const auto t0 = clock_type::now();
    CertificateRecord cert;
    cert.check_name = "gauss_sum_law";
    cert.m = m;
    cert.r = -1;  // property of all symmetric P, not tied to a DG layer

    const int cells = triangle_cells(m);
    const std::uint64_t nb = std::uint64_t(1) << m;

    auto check = [&](const BinSymMatrix& p, std::uint64_t tri) {
        for (std::uint64_t bw = 0; bw < nb; ++bw) {
            ++cert.pairs_checked;
            const BitVec b(bw, m);
            const auto res = gauss_sum(p, b);
            if (!res.law_holds(m)) {
                ++cert.violations;
                if (cert.witness.empty())
                    cert.witness = "P_tri=" + std::to_string(tri) + " b=" + b.to_string() +
                                   " S=" + res.value.to_string() +
                                   " predicted=" + res.square_predicted.to_string();
            }
        }
    };

    if (m <= max_exhaustive_m) {
        const std::uint64_t total = std::uint64_t(1) << cells;
        for (std::uint64_t tri = 0; tri < total; ++tri) check(symmetric_from_triangle(tri, m), tri);
    } else {
        cert.exhaustive = false;
        Rng rng(seed);
        const std::uint64_t mask = cells < 64 ? (std::uint64_t(1) << cells) - 1 : ~std::uint64_t(0);
        for (std::uint64_t s = 0; s < samples; ++s) {
            const std::uint64_t tri = rng.next_u64() & mask;
            check(symmetric_from_triangle(tri, m), tri);
        }
    }

    cert.pass = cert.violations == 0;
    cert.elapsed_ms = ms_since(t0);
    return cert;
}

CertificateRecord verify_diag_rowspace(int m, int max_exhaustive_m, std::uint64_t samples,
                                       std::uint64_t seed) {
    const auto t0 = clock_type::now();
    CertificateRecord cert;
    cert.check_name = "diag_rowspace";
    cert.m = m;
    cert.r = -1;

    auto check = [&](const BinSymMatrix& p, std::uint64_t tri) {
        ++cert.pairs_checked;
        const BitVec d = p.diagonal();
        const auto z = solve_in_rowspace(p, d);
        bool ok = z.has_value();
        if (ok) {
            // verify z P = d
            for (int j = 0; j < m && ok; ++j)
                if (parity64(z->word() & p.row_word(j)) != static_cast<int>(d.bit(j))) ok = false;
        }
        if (!ok) {
            ++cert.violations;
            if (cert.witness.empty()) cert.witness = "P_tri=" + std::to_string(tri);
        }
    };

    const int cells = triangle_cells(m);
    if (m <= max_exhaustive_m) {
        const std::uint64_t total = std::uint64_t(1) << cells;
        for (std::uint64_t tri = 0; tri < total; ++tri) check(symmetric_from_triangle(tri, m), tri);
    } else {
        cert.exhaustive = false;
        Rng rng(seed);
        const std::uint64_t mask = cells < 64 ? (std::uint64_t(1) << cells) - 1 : ~std::uint64_t(0);
        for (std::uint64_t s = 0; s < samples; ++s) {
            const std::uint64_t tri = rng.next_u64() & mask;
            check(symmetric_from_triangle(tri, m), tri);
        }
    }

    cert.pass = cert.violations == 0;
    cert.elapsed_ms = ms_since(t0);
    return cert;
}

SpectrumReport column_sum_spectrum(const DGFrame& frame, std::uint64_t max_exhaustive_columns,
                                   std::uint64_t samples, std::uint64_t seed) {
    const auto t0 = clock_type::now();
    const FrameParams& p = frame.params();
    SpectrumReport report;
    report.cert.check_name = "column_sum_spectrum";
    report.cert.m = p.m;
    report.cert.r = p.r;

    // Allowed squared sums for P != 0: 0 or 2^(2m - t), t in [m - 2r, m].
    std::set<std::uint64_t> allowed;
    allowed.insert(0);
    for (int t = p.m - 2 * p.r; t <= p.m; ++t) allowed.insert(std::uint64_t(1) << (2 * p.m - t));

    auto check_column = [&](std::uint64_t coeffs, const std::vector<std::uint8_t>& qf,
                            std::uint64_t bw) {
        ++report.cert.pairs_checked;
        std::int64_t counts[4] = {0, 0, 0, 0};
        for (std::size_t x = 0; x < p.n; ++x)
            counts[(qf[x] + 2 * parity64(bw & x)) & 3]++;
        const GaussInt s(counts[0] - counts[2], counts[1] - counts[3]);
        const std::uint64_t mag2 = s.norm2();
        if (coeffs == 0) {
            report.observed_walsh.insert(mag2);
            return;
        }
        report.observed.insert(mag2);
        if (!allowed.contains(mag2)) {
            ++report.cert.violations;
            if (report.cert.witness.empty())
                report.cert.witness = "coeffs=" + std::to_string(coeffs) +
                                      " b=" + std::to_string(bw) + " |S|^2=" + std::to_string(mag2);
        }
    };

    const std::uint64_t nb = std::uint64_t(1) << p.m;
    if (p.columns <= max_exhaustive_columns) {
        const std::uint64_t ncoeffs = std::uint64_t(1) << p.coeff_bits();
        for (std::uint64_t coeffs = 0; coeffs < ncoeffs; ++coeffs) {
            const BinSymMatrix mat = frame.matrix_for(coeffs);
            const auto qf = chirp_exponents(mat, 0, p.n);
            for (std::uint64_t bw = 0; bw < nb; ++bw) check_column(coeffs, qf, bw);
        }
    } else {
        report.cert.exhaustive = false;
        Rng rng(seed);
        for (std::uint64_t s = 0; s < samples; ++s) {
            const ColumnIndex idx = frame.sample_index(rng);
            const BinSymMatrix mat = frame.matrix_for(idx.dg_coeffs);
            const auto qf = chirp_exponents(mat, 0, p.n);
            check_column(idx.dg_coeffs, qf, idx.b.word());
        }
    }

    report.cert.pass = report.cert.violations == 0;
    report.cert.elapsed_ms = ms_since(t0);
    return report;
}

CertificateRecord verify_tight_frame(const DGFrame& frame, std::uint64_t max_exhaustive_work,
                                     std::uint64_t seed) {
    const auto t0 = clock_type::now();
    const FrameParams& p = frame.params();
    CertificateRecord cert;
    cert.check_name = "tight_frame";
    cert.m = p.m;
    cert.r = p.r;

    // Every checked (x, x') pair sums over all C columns exactly; when the
    // full N^2 pair grid is too much work, a random pair subset is used.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    const std::uint64_t full_work = p.columns * static_cast<std::uint64_t>(p.n) *
                                    static_cast<std::uint64_t>(p.n);
    if (full_work <= max_exhaustive_work) {
        for (std::uint64_t x = 0; x < p.n; ++x)
            for (std::uint64_t y = 0; y < p.n; ++y) pairs.emplace_back(x, y);
    } else {
        cert.exhaustive = false;
        Rng rng(seed);
        std::uint64_t npairs = max_exhaustive_work / p.columns;
        if (npairs < 16) npairs = 16;
        pairs.emplace_back(0, 0);  // keep at least one diagonal pair in view
        for (std::uint64_t s = 1; s < npairs; ++s)
            pairs.emplace_back(rng.next_below(p.n), rng.next_below(p.n));
    }

    std::vector<GaussInt> acc(pairs.size());
    const std::uint64_t ncoeffs = std::uint64_t(1) << p.coeff_bits();
    const std::uint64_t nb = std::uint64_t(1) << p.m;
    for (std::uint64_t coeffs = 0; coeffs < ncoeffs; ++coeffs) {
        const BinSymMatrix mat = frame.matrix_for(coeffs);
        const auto qf = chirp_exponents(mat, 0, p.n);
        for (std::uint64_t bw = 0; bw < nb; ++bw) {
            for (std::size_t q = 0; q < pairs.size(); ++q) {
                const auto [x, y] = pairs[q];
                const int ex = (qf[x] + 2 * parity64(bw & x)) & 3;
                const int ey = (qf[y] + 2 * parity64(bw & y)) & 3;
                acc[q] += GaussInt::unit_power(ex - ey + 4);
            }
        }
    }

    for (std::size_t q = 0; q < pairs.size(); ++q) {
        ++cert.pairs_checked;
        const auto [x, y] = pairs[q];
        const GaussInt expected =
            x == y ? GaussInt(static_cast<std::int64_t>(p.columns), 0) : GaussInt(0, 0);
        if (!(acc[q] == expected)) {
            ++cert.violations;
            if (cert.witness.empty())
                cert.witness = "x=" + std::to_string(x) + " x'=" + std::to_string(y) +
                               " sum=" + acc[q].to_string();
        }
    }

    cert.pass = cert.violations == 0;
    cert.elapsed_ms = ms_since(t0);
    return cert;
}

}  // namespace chirpcs
