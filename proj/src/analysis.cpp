#include "chirpcs/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace chirpcs {

namespace {

using clock_type = std::chrono::steady_clock;

double ms_since(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

// sum_j alpha_j phi_j without any normalization.
std::vector<cplx> accumulate_columns(const DGFrame& frame, const SparseSignal& signal) {
    const std::size_t n = frame.params().n;
    std::vector<cplx> y(n, 0.0);
    for (std::size_t j = 0; j < signal.support.size(); ++j) {
        const ChirpColumn col = frame.column(signal.support[j]);
        const cplx a = signal.coefficients[j];
        for (std::size_t x = 0; x < n; ++x) y[x] += a * col.entry(x);
    }
    return y;
}

double mc_slack(double delta, int trials) {
    return 3.0 * std::sqrt(delta / static_cast<double>(trials));
}

}  // namespace

void parallel_for_trials(int trials, int jobs, const std::function<void(int)>& fn) {
    if (jobs <= 1 || trials <= 1) {
        for (int i = 0; i < trials; ++i) fn(i);
        return;
    }
    const int nthreads = std::min(jobs, trials);
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= trials) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    break;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

SparseSignal sample_sparse_signal(const DGFrame& frame, int k, CoefficientModel model, Rng& rng) {
    const FrameParams& p = frame.params();
    if (k < 1) throw std::invalid_argument("sample_sparse_signal: k must be >= 1");
    if (static_cast<std::uint64_t>(k) > p.columns)
        throw std::invalid_argument("sample_sparse_signal: k exceeds column count");

    SparseSignal sig;
    std::vector<std::uint64_t> flats;
    const std::uint64_t mask = p.columns - 1;  // C is a power of two
    while (static_cast<int>(flats.size()) < k) {
        const std::uint64_t f = rng.next_u64() & mask;
        if (std::find(flats.begin(), flats.end(), f) != flats.end()) continue;
        flats.push_back(f);
    }
    for (const auto f : flats) {
        sig.support.push_back(ColumnIndex::from_flat(p, f));
        sig.coefficients.push_back(model == CoefficientModel::kUnitModulusRandomPhase
                                       ? rng.next_unit_phase()
                                       : cplx(rng.next_gaussian(), 0.0));
    }
    return sig;
}

std::vector<cplx> synthesize_measurement(const DGFrame& frame, const SparseSignal& signal) {
    std::vector<cplx> y = accumulate_columns(frame, signal);
    const double scale = 1.0 / std::sqrt(static_cast<double>(frame.params().n));
    for (auto& z : y) z *= scale;
    return y;
}

double strip_ratio(const DGFrame& frame, const SparseSignal& signal) {
    double alpha_norm2 = 0.0;
    for (const auto& a : signal.coefficients) alpha_norm2 += std::norm(a);
    if (alpha_norm2 == 0.0) throw std::invalid_argument("strip_ratio: zero signal");
    const std::vector<cplx> y = accumulate_columns(frame, signal);
    double y_norm2 = 0.0;
    for (const auto& z : y) y_norm2 += std::norm(z);
    return y_norm2 / (static_cast<double>(frame.params().n) * alpha_norm2);
}

double strip_delta_bound(const FrameParams& params, int k, double epsilon) {
    const double c = static_cast<double>(params.columns);
    const double gap = epsilon - static_cast<double>(k - 1) / (c - 1.0);
    if (gap <= 0.0)
        throw std::invalid_argument("strip_delta_bound: need k < 1 + (C-1) epsilon");
    const double n_eta = std::pow(2.0, static_cast<double>(params.m - 2 * params.r));
    return 2.0 * std::exp(-(gap * gap * n_eta) / (32.0 * static_cast<double>(k)));
}

StripResult strip_montecarlo(const DGFrame& frame, const StripParams& params, std::uint64_t seed,
                             int jobs) {
    const FrameParams& fp = frame.params();
    if (params.trials < 1) throw std::invalid_argument("strip_montecarlo: trials must be >= 1");
    if (params.epsilon <= 0.0) throw std::invalid_argument("strip_montecarlo: epsilon must be > 0");

    StripResult result;
    result.trials = params.trials;
    result.delta_bound = strip_delta_bound(fp, params.k, params.epsilon);

    std::vector<double> ratios(static_cast<std::size_t>(params.trials));
    parallel_for_trials(params.trials, jobs, [&](int i) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(i));
        const SparseSignal sig = sample_sparse_signal(frame, params.k, params.model, rng);
        ratios[static_cast<std::size_t>(i)] = strip_ratio(frame, sig);
    });

    int violations = 0;
    double ratio_sum = 0.0;
    for (int i = 0; i < params.trials; ++i) {
        const double ratio = ratios[static_cast<std::size_t>(i)];
        const bool ok = ratio >= 1.0 - params.epsilon && ratio <= 1.0 + params.epsilon;
        if (!ok) ++violations;
        ratio_sum += ratio;
        result.records.push_back({static_cast<std::uint64_t>(i), fp.m, fp.r, params.k, seed,
                                  "strip_ratio", ratio, params.epsilon, ok});
    }
    result.violation_rate = static_cast<double>(violations) / params.trials;
    result.mean_ratio = ratio_sum / params.trials;
    result.within_bound =
        result.violation_rate <= result.delta_bound + mc_slack(result.delta_bound, params.trials);
    return result;
}

namespace {

// Z4 exponent tables (global phase folded in) for every column of a small
// frame, indexed by flat column index.
std::vector<std::vector<std::uint8_t>> all_column_exponents(const DGFrame& frame) {
    const FrameParams& p = frame.params();
    std::vector<std::vector<std::uint8_t>> tables(p.columns);
    const std::uint64_t ncoeffs = std::uint64_t(1) << p.coeff_bits();
    const std::uint64_t nb = std::uint64_t(1) << p.m;
    for (std::uint64_t coeffs = 0; coeffs < ncoeffs; ++coeffs) {
        const BinSymMatrix mat = frame.matrix_for(coeffs);
        const auto qf = chirp_exponents(mat, 0, p.n);
        const int dw = mat.diagonal().weight();
        for (std::uint64_t bw = 0; bw < nb; ++bw) {
            const int glob = (dw + 2 * std::popcount(bw)) & 3;
            std::vector<std::uint8_t> tab(p.n);
            for (std::size_t x = 0; x < p.n; ++x)
                tab[x] = static_cast<std::uint8_t>((glob + qf[x] + 2 * parity64(bw & x)) & 3);
            tables[(coeffs << p.m) | bw] = std::move(tab);
        }
    }
    return tables;
}

}  // namespace

GaussInt expected_gamma(const DGFrame& frame, const BitVec& a, const BitVec& l) {
    const FrameParams& p = frame.params();
    if (a.is_zero()) throw std::invalid_argument("expected_gamma: offset a must be nonzero");
    if (p.columns > 4096)
        throw std::invalid_argument("expected_gamma: direct pair enumeration needs C <= 4096");

    const auto tables = all_column_exponents(frame);
    const std::uint64_t c = p.columns;
    GaussInt total;
    for (std::size_t x = 0; x < p.n; ++x) {
        const std::size_t xa = x ^ a.word();
        std::int64_t counts[4] = {0, 0, 0, 0};
        for (std::uint64_t g = 0; g < c; ++g) {
            const int eg = tables[g][xa];
            for (std::uint64_t h = 0; h < c; ++h) {
                if (h == g) continue;
                counts[(eg - tables[h][x] + 4) & 3]++;
            }
        }
        const GaussInt t1(counts[0] - counts[2], counts[1] - counts[3]);
        total += l.dot(BitVec(static_cast<std::uint64_t>(x), p.m)) ? -t1 : t1;
    }
    return total;
}

CertificateRecord verify_zero_mean_cross_terms(const DGFrame& frame, int max_offsets,
                                               std::uint64_t seed) {
    const auto t0 = clock_type::now();
    const FrameParams& p = frame.params();
    CertificateRecord cert;
    cert.check_name = "zero_mean_cross_terms";
    cert.m = p.m;
    cert.r = p.r;

    const std::uint64_t nb = std::uint64_t(1) << p.m;
    std::vector<std::uint64_t> offsets;
    if (max_offsets <= 0 || static_cast<std::uint64_t>(max_offsets) >= nb - 1) {
        for (std::uint64_t a = 1; a < nb; ++a) offsets.push_back(a);
    } else {
        cert.exhaustive = false;  // over offsets; each offset is still exact
        Rng rng(seed);
        while (offsets.size() < static_cast<std::size_t>(max_offsets)) {
            const std::uint64_t a = rng.next_u64() & (nb - 1);
            if (a == 0 || std::find(offsets.begin(), offsets.end(), a) != offsets.end()) continue;
            offsets.push_back(a);
        }
    }

    const std::uint64_t c = p.columns;

    // Frames too large to tabulate get the pointwise group identity checked
    // at sampled (a, x) positions only, with columns evaluated on the fly.
    if (static_cast<double>(c) * static_cast<double>(p.n) > 33554432.0) {
        cert.exhaustive = false;
        cert.witness = "partial mode: pointwise identity at sampled (a, x) only";
        Rng rng(seed ^ 0xA5A5A5A5ull);
        const std::uint64_t ncoeffs = std::uint64_t(1) << p.coeff_bits();
        const std::uint64_t nbw = std::uint64_t(1) << p.m;
        const int xs_per_offset = 8;
        for (const std::uint64_t aw : offsets) {
            for (int s = 0; s < xs_per_offset; ++s) {
                const std::uint64_t x = rng.next_below(p.n);
                const std::uint64_t xa = x ^ aw;
                std::int64_t ca[4] = {0, 0, 0, 0};
                std::int64_t cb[4] = {0, 0, 0, 0};
                for (std::uint64_t coeffs = 0; coeffs < ncoeffs; ++coeffs) {
                    const BinSymMatrix mat = frame.matrix_for(coeffs);
                    const int dw = mat.diagonal().weight();
                    const int qa = quad_form_z4(mat, xa);
                    const int qb = quad_form_z4(mat, x);
                    for (std::uint64_t bw = 0; bw < nbw; ++bw) {
                        const int glob = (dw + 2 * std::popcount(bw)) & 3;
                        ca[(glob + qa + 2 * parity64(bw & xa)) & 3]++;
                        cb[(glob + qb + 2 * parity64(bw & x)) & 3]++;
                    }
                }
                ++cert.pairs_checked;
                const GaussInt t_all = GaussInt(ca[0] - ca[2], ca[1] - ca[3]) *
                                       GaussInt(cb[0] - cb[2], cb[1] - cb[3]).conj();
                if (!t_all.is_zero()) {
                    ++cert.violations;
                    cert.witness = "sum_{g,h} != 0 at a=" + std::to_string(aw) +
                                   " x=" + std::to_string(x);
                }
            }
        }
        cert.pass = cert.violations == 0;
        cert.elapsed_ms = ms_since(t0);
        return cert;
    }

    const auto tables = all_column_exponents(frame);
    // Direct pair loop at small scale; otherwise the algebraically identical
    // factored form sum_{g!=h} = (sum_g)(sum_h bar) - sum_diag, still exact.
    const bool direct =
        static_cast<double>(c) * static_cast<double>(c) * static_cast<double>(p.n) *
            static_cast<double>(offsets.size()) <=
        268435456.0;

    for (const std::uint64_t aw : offsets) {
        std::vector<GaussInt> t1_by_x(p.n);
        bool identity_ok = true;
        for (std::size_t x = 0; x < p.n && identity_ok; ++x) {
            const std::size_t xa = x ^ aw;
            GaussInt t_all, t_diag;
            if (direct) {
                std::int64_t counts[4] = {0, 0, 0, 0};
                for (std::uint64_t g = 0; g < c; ++g) {
                    const int eg = tables[g][xa];
                    for (std::uint64_t h = 0; h < c; ++h)
                        counts[(eg - tables[h][x] + 4) & 3]++;
                }
                t_all = GaussInt(counts[0] - counts[2], counts[1] - counts[3]);
            } else {
                std::int64_t ca[4] = {0, 0, 0, 0};
                std::int64_t cb[4] = {0, 0, 0, 0};
                for (std::uint64_t g = 0; g < c; ++g) {
                    ca[tables[g][xa]]++;
                    cb[tables[g][x]]++;
                }
                const GaussInt sa(ca[0] - ca[2], ca[1] - ca[3]);
                const GaussInt sb(cb[0] - cb[2], cb[1] - cb[3]);
                t_all = sa * sb.conj();
            }
            std::int64_t cd[4] = {0, 0, 0, 0};
            for (std::uint64_t g = 0; g < c; ++g)
                cd[(tables[g][xa] - tables[g][x] + 4) & 3]++;
            t_diag = GaussInt(cd[0] - cd[2], cd[1] - cd[3]);

            // Group identity: the full double sum vanishes pointwise, so
            // sum_{g != h} equals -sum_g g(x+a) g^-1(x).
            if (!t_all.is_zero()) {
                identity_ok = false;
                ++cert.violations;
                if (cert.witness.empty())
                    cert.witness = "sum_{g,h} != 0 at a=" + std::to_string(aw) +
                                   " x=" + std::to_string(x) + " value=" + t_all.to_string();
            }
            t1_by_x[x] = t_all - t_diag;
        }
        if (!identity_ok) continue;

        for (std::uint64_t lw = 0; lw < nb; ++lw) {
            ++cert.pairs_checked;
            GaussInt total;
            for (std::size_t x = 0; x < p.n; ++x)
                total += parity64(lw & x) ? -t1_by_x[x] : t1_by_x[x];
            if (!total.is_zero()) {
                ++cert.violations;
                if (cert.witness.empty())
                    cert.witness = "E[Gamma] != 0 at a=" + std::to_string(aw) +
                                   " l=" + std::to_string(lw) + " value=" + total.to_string();
            }
        }
    }

    cert.pass = cert.violations == 0;
    cert.elapsed_ms = ms_since(t0);
    return cert;
}

GammaExperimentResult gamma_experiment(const DGFrame& frame, int k, double delta, int trials,
                                       std::uint64_t seed, int jobs) {
    const FrameParams& p = frame.params();
    if (k < 2) throw std::invalid_argument("gamma_experiment: k must be >= 2");
    if (trials < 1) throw std::invalid_argument("gamma_experiment: trials must be >= 1");

    GammaExperimentResult result;
    result.trials = trials;

    const double n = static_cast<double>(p.n);
    const double alpha_norm2 = static_cast<double>(k);  // unit coefficients
    const double log_term = 8.0 * k * std::log(n / delta);
    const double bound_exp_r =
        std::sqrt(log_term / std::pow(n, 1.0 - static_cast<double>(p.r) / p.m)) * alpha_norm2;
    const double bound_eta = std::sqrt(log_term / std::pow(n, p.eta)) * alpha_norm2;

    std::vector<double> maxima(static_cast<std::size_t>(trials));
    parallel_for_trials(trials, jobs, [&](int i) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(i));
        std::vector<std::uint64_t> flats;
        const std::uint64_t mask = p.columns - 1;
        while (static_cast<int>(flats.size()) < k) {
            const std::uint64_t f = rng.next_u64() & mask;
            if (std::find(flats.begin(), flats.end(), f) != flats.end()) continue;
            flats.push_back(f);
        }
        std::vector<ChirpColumn> cols;
        cols.reserve(flats.size());
        for (const auto f : flats) cols.push_back(frame.column(ColumnIndex::from_flat(p, f)));

        const std::uint64_t aw = 1;  // offset e_1
        std::vector<cplx> u(p.n, 0.0);
        for (int ii = 0; ii < k; ++ii)
            for (int jj = 0; jj < k; ++jj) {
                if (ii == jj) continue;
                const auto& gi = cols[static_cast<std::size_t>(ii)];
                const auto& gj = cols[static_cast<std::size_t>(jj)];
                for (std::size_t x = 0; x < p.n; ++x) {
                    const int e = gi.global_phase + gi.exponents[x ^ aw] - gj.global_phase -
                                  gj.exponents[x] + 8;
                    u[x] += GaussInt::unit_power(e).to_complex();
                }
            }
        fwht(u);
        double best = 0.0;
        for (const auto& z : u) best = std::max(best, std::abs(z));
        maxima[static_cast<std::size_t>(i)] = best / std::pow(n, 1.5);
    });

    int exceed_r = 0, exceed_eta = 0;
    for (int i = 0; i < trials; ++i) {
        const double g = maxima[static_cast<std::size_t>(i)];
        result.max_gamma = std::max(result.max_gamma, g);
        const bool over_r = g > bound_exp_r;
        const bool over_eta = g > bound_eta;
        exceed_r += over_r;
        exceed_eta += over_eta;
        result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                  "crossterm_max", g, bound_exp_r, !over_r});
        result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                  "crossterm_max_eta", g, bound_eta, !over_eta});
    }
    result.exceed_rate_r = static_cast<double>(exceed_r) / trials;
    result.exceed_rate_eta = static_cast<double>(exceed_eta) / trials;
    result.within_bound = result.exceed_rate_r <= delta + mc_slack(delta, trials);
    return result;
}

L2L2Result l2l2_experiment(const DGFrame& frame, int k, const NoiseModel& noise, double epsilon,
                           int trials, std::uint64_t seed, const RecoveryOptions& base_opts,
                           int jobs) {
    const FrameParams& p = frame.params();
    if (k < 1) throw std::invalid_argument("l2l2_experiment: k must be >= 1");
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("l2l2_experiment: epsilon must be in (0, 1)");

    L2L2Result result;
    result.trials = trials;
    result.materialized = p.columns <= (std::uint64_t(1) << 20);
    const double factor = 2.0 / (1.0 - epsilon);
    const double root_n = std::sqrt(static_cast<double>(p.n));
    const ChirpDecoder decoder(frame);

    struct TrialOut {
        bool bound_ok = false, folding_ok = false, support_ok = false;
        double error = 0.0, bound_rhs = 0.0, folding_lhs = 0.0, tail_norm = 0.0;
    };
    std::vector<TrialOut> outs(static_cast<std::size_t>(trials));

    parallel_for_trials(trials, jobs, [&](int i) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(i));
        TrialOut out;

        // Planted support + coefficients.
        SparseSignal planted =
            sample_sparse_signal(frame, k, CoefficientModel::kUnitModulusRandomPhase, rng);
        std::vector<std::uint64_t> planted_flats;
        for (const auto& idx : planted.support) planted_flats.push_back(idx.flat(p));

        std::vector<cplx> f(p.n, 0.0);
        std::vector<std::uint64_t> topk_flats;
        std::map<std::uint64_t, cplx> alpha_k;

        if (result.materialized) {
            // Data-domain noise on every entry of alpha.
            std::vector<cplx> alpha(p.columns);
            for (auto& z : alpha) z = rng.next_complex_gaussian(noise.sigma_data);
            for (int j = 0; j < k; ++j)
                alpha[planted_flats[static_cast<std::size_t>(j)]] +=
                    planted.coefficients[static_cast<std::size_t>(j)];

            // Full measurement y = (1/sqrt N) Phi alpha, one column at a time.
            const std::uint64_t ncoeffs = std::uint64_t(1) << p.coeff_bits();
            const std::uint64_t nb = std::uint64_t(1) << p.m;
            for (std::uint64_t coeffs = 0; coeffs < ncoeffs; ++coeffs) {
                const BinSymMatrix mat = frame.matrix_for(coeffs);
                const auto qf = chirp_exponents(mat, 0, p.n);
                const int dw = mat.diagonal().weight();
                for (std::uint64_t bw = 0; bw < nb; ++bw) {
                    const cplx ac = alpha[(coeffs << p.m) | bw];
                    const int glob = (dw + 2 * std::popcount(bw)) & 3;
                    for (std::size_t x = 0; x < p.n; ++x)
                        f[x] += ac *
                                GaussInt::unit_power(glob + qf[x] + 2 * parity64(bw & x)).to_complex();
                }
            }
            for (auto& z : f) z /= root_n;

            // Best k-term approximation of alpha.
            std::vector<std::uint64_t> order(p.columns);
            std::iota(order.begin(), order.end(), 0);
            std::nth_element(order.begin(), order.begin() + k, order.end(),
                             [&](std::uint64_t lhs, std::uint64_t rhs) {
                                 const double ml = std::norm(alpha[lhs]);
                                 const double mr = std::norm(alpha[rhs]);
                                 return ml != mr ? ml > mr : lhs < rhs;
                             });
            topk_flats.assign(order.begin(), order.begin() + k);
            for (const auto c : topk_flats) alpha_k[c] = alpha[c];

            double tail2 = 0.0;
            for (std::uint64_t c = 0; c < p.columns; ++c)
                if (std::find(topk_flats.begin(), topk_flats.end(), c) == topk_flats.end())
                    tail2 += std::norm(alpha[c]);
            out.tail_norm = std::sqrt(tail2);

            // Folding: || (1/sqrt N) Phi (alpha - alpha_k) ||.
            SparseSignal topk_sig;
            for (const auto c : topk_flats) {
                topk_sig.support.push_back(ColumnIndex::from_flat(p, c));
                topk_sig.coefficients.push_back(alpha[c]);
            }
            const std::vector<cplx> y_k = synthesize_measurement(frame, topk_sig);
            double fold2 = 0.0;
            for (std::size_t x = 0; x < p.n; ++x) fold2 += std::norm(f[x] - y_k[x]);
            out.folding_lhs = std::sqrt(fold2);
        } else {
            // Tight-frame equivalent: white measurement noise with variance
            // C sigma_data^2 / N per entry stands in for the data-noise image.
            f = synthesize_measurement(frame, planted);
            const double sigma_eq =
                noise.sigma_data *
                std::sqrt(static_cast<double>(p.columns) / static_cast<double>(p.n));
            for (auto& z : f) z += rng.next_complex_gaussian(sigma_eq);
            topk_flats = planted_flats;
            for (int j = 0; j < k; ++j)
                alpha_k[planted_flats[static_cast<std::size_t>(j)]] =
                    planted.coefficients[static_cast<std::size_t>(j)];
            out.tail_norm =
                noise.sigma_data * std::sqrt(static_cast<double>(p.columns - k));
        }

        std::vector<cplx> mu(p.n);
        double mu2 = 0.0;
        for (auto& z : mu) {
            z = rng.next_complex_gaussian(noise.sigma_meas);
            mu2 += std::norm(z);
        }
        for (std::size_t x = 0; x < p.n; ++x) f[x] += mu[x];

        RecoveryOptions opts = base_opts;
        opts.k = k;
        std::uint64_t mix = seed ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ull);
        opts.seed = splitmix64(mix);
        const RecoveryReport rec = decoder.recover(f, opts);

        // || alpha_hat - alpha_k || over the union of supports.
        std::map<std::uint64_t, cplx> diff = alpha_k;
        for (const auto& term : rec.terms) diff[term.index.flat(p)] -= term.coefficient;
        double err2 = 0.0;
        for (const auto& [c, v] : diff) err2 += std::norm(v);
        out.error = std::sqrt(err2);

        // fp slack keeps the exactly-noiseless corner (both sides zero) honest
        double alpha_scale = 0.0;
        for (const auto& [c, v] : alpha_k) alpha_scale += std::norm(v);
        alpha_scale = std::sqrt(alpha_scale);
        out.bound_rhs = factor * (out.tail_norm + std::sqrt(mu2));
        out.bound_ok = out.error <= out.bound_rhs + 1e-9 * alpha_scale;
        out.folding_ok =
            !result.materialized || out.folding_lhs <= out.tail_norm + 1e-12 * alpha_scale;

        std::vector<std::uint64_t> rec_flats;
        for (const auto& term : rec.terms) rec_flats.push_back(term.index.flat(p));
        std::sort(rec_flats.begin(), rec_flats.end());
        std::vector<std::uint64_t> want = topk_flats;
        std::sort(want.begin(), want.end());
        out.support_ok = rec_flats == want;

        outs[static_cast<std::size_t>(i)] = out;
    });

    int bound_ok = 0, folding_ok = 0, support_ok = 0;
    double err_sum = 0.0;
    for (int i = 0; i < trials; ++i) {
        const auto& out = outs[static_cast<std::size_t>(i)];
        bound_ok += out.bound_ok;
        folding_ok += out.folding_ok;
        support_ok += out.support_ok;
        err_sum += out.error;
        result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed, "l2l2_error",
                                  out.error, out.bound_rhs, out.bound_ok});
        if (result.materialized)
            result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                      "l2l2_folding", out.folding_lhs, out.tail_norm,
                                      out.folding_ok});
        result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                  "support_recovered", out.support_ok ? 1.0 : 0.0, 1.0,
                                  out.support_ok});
    }
    result.bound_rate = static_cast<double>(bound_ok) / trials;
    result.folding_rate = static_cast<double>(folding_ok) / trials;
    result.support_rate = static_cast<double>(support_ok) / trials;
    result.mean_error = err_sum / trials;
    return result;
}

RecoveryExperimentResult recovery_experiment(const DGFrame& frame, int k, int trials,
                                             std::uint64_t seed, double sigma_meas,
                                             double amplitude_decay, RecoveryOptions base_opts,
                                             int jobs) {
    const FrameParams& p = frame.params();
    if (k < 1) throw std::invalid_argument("recovery_experiment: k must be >= 1");
    if (trials < 1) throw std::invalid_argument("recovery_experiment: trials must be >= 1");

    RecoveryExperimentResult result;
    result.trials = trials;
    result.column_budget = static_cast<std::size_t>(k) * static_cast<std::size_t>(p.m + 2) +
                           static_cast<std::size_t>(k) * static_cast<std::size_t>(k);

    const ChirpDecoder decoder(frame);
    struct TrialOut {
        bool support_ok = false;
        double coeff_error = 0.0;
        std::size_t columns = 0;
        double ms = 0.0;
    };
    std::vector<TrialOut> outs(static_cast<std::size_t>(trials));

    parallel_for_trials(trials, jobs, [&](int i) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(i));
        SparseSignal planted =
            sample_sparse_signal(frame, k, CoefficientModel::kUnitModulusRandomPhase, rng);
        for (int j = 0; j < k; ++j)
            planted.coefficients[static_cast<std::size_t>(j)] *=
                std::pow(amplitude_decay, static_cast<double>(j));

        std::vector<cplx> f = synthesize_measurement(frame, planted);
        if (sigma_meas > 0.0)
            for (auto& z : f) z += rng.next_complex_gaussian(sigma_meas);

        RecoveryOptions opts = base_opts;
        opts.k = k;
        std::uint64_t mix = seed ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ull);
        opts.seed = splitmix64(mix);

        const auto t0 = clock_type::now();
        const RecoveryReport rec = decoder.recover(f, opts);
        TrialOut out;
        out.ms = ms_since(t0);
        out.columns = rec.columns_evaluated;

        std::vector<std::uint64_t> got, want;
        for (const auto& term : rec.terms) got.push_back(term.index.flat(p));
        for (const auto& idx : planted.support) want.push_back(idx.flat(p));
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        out.support_ok = got == want;

        if (out.support_ok) {
            double err2 = 0.0;
            for (int j = 0; j < k; ++j) {
                const std::uint64_t flat = planted.support[static_cast<std::size_t>(j)].flat(p);
                for (const auto& term : rec.terms)
                    if (term.index.flat(p) == flat) {
                        err2 += std::norm(term.coefficient -
                                          planted.coefficients[static_cast<std::size_t>(j)]);
                        break;
                    }
            }
            out.coeff_error = std::sqrt(err2);
        }
        outs[static_cast<std::size_t>(i)] = out;
    });

    int ok_count = 0;
    double err_sum = 0.0, ms_sum = 0.0;
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        const auto& out = outs[static_cast<std::size_t>(i)];
        ok_count += out.support_ok;
        ms_sum += out.ms;
        times.push_back(out.ms);
        result.max_columns_evaluated = std::max(result.max_columns_evaluated, out.columns);
        result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                  "support_recovered", out.support_ok ? 1.0 : 0.0, 1.0,
                                  out.support_ok});
        result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                  "columns_evaluated", static_cast<double>(out.columns),
                                  static_cast<double>(result.column_budget),
                                  out.columns <= result.column_budget});
        if (out.support_ok) {
            err_sum += out.coeff_error;
            result.max_coeff_error = std::max(result.max_coeff_error, out.coeff_error);
            result.records.push_back({static_cast<std::uint64_t>(i), p.m, p.r, k, seed,
                                      "coeff_error", out.coeff_error, 0.0, true});
        }
    }
    result.support_rate = static_cast<double>(ok_count) / trials;
    result.mean_coeff_error = ok_count > 0 ? err_sum / ok_count : 0.0;
    result.budget_respected = result.max_columns_evaluated <= result.column_budget;
    result.mean_recover_ms = ms_sum / trials;
    std::sort(times.begin(), times.end());
    result.median_recover_ms = trials % 2 == 1
                                   ? times[static_cast<std::size_t>(trials / 2)]
                                   : 0.5 * (times[static_cast<std::size_t>(trials / 2 - 1)] +
                                            times[static_cast<std::size_t>(trials / 2)]);
    return result;
}

SuiteReport verify_suite(int m, int r) {
    const auto t0 = clock_type::now();
    SuiteReport report;
    report.m = m;
    report.r = r;

    const FrameParams params(m, r);  // validates m odd etc.

    report.checks.push_back(verify_diag_rowspace(m));
    report.checks.push_back(verify_gauss_sum_law(m));

    const DGFrame frame(params);
    report.checks.push_back(verify_group_closure(frame));
    report.checks.push_back(verify_rank_distance(frame));
    report.checks.push_back(column_sum_spectrum(frame).cert);
    report.checks.push_back(verify_tight_frame(frame));
    // Keep the exact cross-term check tractable beyond desk scale.
    const int max_offsets = m <= 3 ? 0 : 8;
    report.checks.push_back(verify_zero_mean_cross_terms(frame, max_offsets));

    for (const auto& check : report.checks) report.pass = report.pass && check.pass;
    report.elapsed_ms = ms_since(t0);
    return report;
}

nlohmann::json to_json(const SuiteReport& report) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& check : report.checks) checks.push_back(to_json(check));
    return {{"m", report.m},
            {"r", report.r},
            {"checks", checks},
            {"pass", report.pass},
            {"elapsed_ms", report.elapsed_ms}};
}

}  // namespace chirpcs
