#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "chirpcs/decoder.hpp"
#include "chirpcs/frame.hpp"
#include "chirpcs/records.hpp"
#include "chirpcs/rng.hpp"

namespace chirpcs {

enum class CoefficientModel { kUnitModulusRandomPhase, kRealGaussian };

struct SparseSignal {
    std::vector<ColumnIndex> support;  // distinct
    std::vector<cplx> coefficients;
};

/// k distinct flat indices sampled uniformly (rejection on duplicates, no
/// enumeration of C), coefficients drawn from the given model.
SparseSignal sample_sparse_signal(const DGFrame& frame, int k, CoefficientModel model, Rng& rng);

/// y[x] = (1/sqrt(N)) sum_j alpha_j phi_j(x); O(kN), never materializes Phi.
std::vector<cplx> synthesize_measurement(const DGFrame& frame, const SparseSignal& signal);

/// ||Phi alpha||^2 / (N ||alpha||^2).
double strip_ratio(const DGFrame& frame, const SparseSignal& signal);

struct StripParams {
    int k = 2;
    double epsilon = 0.5;
    int trials = 100;
    CoefficientModel model = CoefficientModel::kUnitModulusRandomPhase;
};

/// delta = 2 exp(-[eps - (k-1)/(C-1)]^2 N^eta / (32 k)).
double strip_delta_bound(const FrameParams& params, int k, double epsilon);

struct StripResult {
    double violation_rate = 0.0;
    double delta_bound = 0.0;
    double mean_ratio = 0.0;
    int trials = 0;
    bool within_bound = true;  // violation_rate <= delta + 3 sqrt(delta/trials)
    std::vector<ExperimentRecord> records;
};

StripResult strip_montecarlo(const DGFrame& frame, const StripParams& params, std::uint64_t seed,
                             int jobs = 1);

/// Exact cross-term expectation sum_x (-1)^(l.x) sum_{g != h} g(x+a) h^-1(x)
/// over the full column group; must be the Gaussian integer 0. Direct pair
/// enumeration; requires a small frame (C <= 4096).
GaussInt expected_gamma(const DGFrame& frame, const BitVec& a, const BitVec& l);

/// Certificate over all offsets a != 0 (or a sample of max_offsets of them)
/// and all spectral indices l, including the pointwise group identity
/// sum_{g,h} g(x+a) h^-1(x) = 0.
CertificateRecord verify_zero_mean_cross_terms(const DGFrame& frame, int max_offsets = 0,
                                               std::uint64_t seed = 1);

struct GammaExperimentResult {
    double exceed_rate_r = 0.0;  // bound exponent p = 1 - r/m
    double exceed_rate_eta = 0.0;  // bound exponent p = 1 - 2r/m (eta)
    double max_gamma = 0.0;
    int trials = 0;
    bool within_bound = true;
    std::vector<ExperimentRecord> records;
};

/// Cross-term concentration: per trial, the full spectrum Gamma_a^l at offset
/// a = e_1 for a random k-support with unit coefficients, versus the Azuma
/// bound sqrt(8 k log(N/delta) / N^p) ||alpha||^2 measured at both exponents.
GammaExperimentResult gamma_experiment(const DGFrame& frame, int k, double delta, int trials,
                                       std::uint64_t seed, int jobs = 1);

struct NoiseModel {
    double sigma_data = 0.0;  // sqrt(E|z|^2) of iid data-domain noise, all C entries
    double sigma_meas = 0.0;  // sqrt(E|z|^2) of iid measurement noise per entry
};

struct L2L2Result {
    double bound_rate = 0.0;    // ||a* - a_k|| <= 2/(1-eps) (||a - a_k|| + ||mu||)
    double folding_rate = 0.0;  // ||(1/sqrt N) Phi(a - a_k)|| <= ||a - a_k||
    double support_rate = 0.0;
    double mean_error = 0.0;
    int trials = 0;
    bool materialized = true;  // false: tight-frame equivalent noise (huge C)
    std::vector<ExperimentRecord> records;
};

/// End-to-end noisy recovery against the l2/l2 bound. Data noise is
/// materialized over all C entries when C <= 2^20; beyond that the
/// tight-frame equivalent measurement noise (variance C sigma^2 / N per
/// entry) stands in and the folding check is skipped.
L2L2Result l2l2_experiment(const DGFrame& frame, int k, const NoiseModel& noise, double epsilon,
                           int trials, std::uint64_t seed, const RecoveryOptions& base_opts = {},
                           int jobs = 1);

struct RecoveryExperimentResult {
    double support_rate = 0.0;
    double mean_coeff_error = 0.0;  // post-refit l2 error over recovered-support trials
    double max_coeff_error = 0.0;
    std::size_t max_columns_evaluated = 0;
    std::size_t column_budget = 0;  // k (m + 2) + k^2
    bool budget_respected = true;
    double mean_recover_ms = 0.0;
    double median_recover_ms = 0.0;
    int trials = 0;
    std::vector<ExperimentRecord> records;
};

/// Plant-and-recover Monte Carlo. Coefficients are unit modulus with random
/// phase, scaled by amplitude_decay^j so benches can avoid exact magnitude
/// ties; sigma_meas adds measurement noise.
RecoveryExperimentResult recovery_experiment(const DGFrame& frame, int k, int trials,
                                             std::uint64_t seed, double sigma_meas = 0.0,
                                             double amplitude_decay = 1.0,
                                             RecoveryOptions base_opts = {}, int jobs = 1);

struct SuiteReport {
    int m = 0;
    int r = 0;
    std::vector<CertificateRecord> checks;
    bool pass = true;
    double elapsed_ms = 0.0;
};

/// The seven frame certificates: diagonal row-space, Gauss-sum law, group
/// closure, rank distance, column-sum spectrum, tight frame, zero-mean
/// cross terms. Exhaustive at desk scale (m <= 5), sampled beyond.
SuiteReport verify_suite(int m, int r);

nlohmann::json to_json(const SuiteReport& report);

/// Run fn(trial) for trial in [0, trials) across up to `jobs` threads.
/// Trials must be independent; the first exception is rethrown.
void parallel_for_trials(int trials, int jobs, const std::function<void(int)>& fn);

}  // namespace chirpcs
