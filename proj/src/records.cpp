#include "chirpcs/records.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace chirpcs {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string to_csv(const std::vector<ExperimentRecord>& records) {
    std::string out;
    out += "# ";
    out += kCsvSchemaVersion;
    out += "\n";
    out += "trial_id,m,r,k,seed,metric_name,value,bound,pass\n";
    for (const auto& rec : records) {
        out += std::to_string(rec.trial_id) + ",";
        out += std::to_string(rec.m) + ",";
        out += std::to_string(rec.r) + ",";
        out += std::to_string(rec.k) + ",";
        out += std::to_string(rec.seed) + ",";
        out += rec.metric_name + ",";
        out += fmt_double(rec.value) + ",";
        out += fmt_double(rec.bound) + ",";
        out += rec.pass ? "1" : "0";
        out += "\n";
    }
    return out;
}

void write_csv_file(const std::string& path, const std::vector<ExperimentRecord>& records) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_csv(records);
}

nlohmann::json to_json(const ExperimentRecord& rec) {
    return {{"trial_id", rec.trial_id}, {"m", rec.m},         {"r", rec.r},
            {"k", rec.k},               {"seed", rec.seed},   {"metric_name", rec.metric_name},
            {"value", rec.value},       {"bound", rec.bound}, {"pass", rec.pass}};
}

nlohmann::json to_json(const CertificateRecord& cert) {
    nlohmann::json j{{"m", cert.m},
                     {"r", cert.r},
                     {"check_name", cert.check_name},
                     {"pairs_checked", cert.pairs_checked},
                     {"violations", cert.violations},
                     {"elapsed_ms", cert.elapsed_ms},
                     {"pass", cert.pass},
                     {"exhaustive", cert.exhaustive}};
    if (!cert.witness.empty()) j["witness"] = cert.witness;
    return j;
}

nlohmann::json to_json(const FrameParams& params) {
    return {{"m", params.m},
            {"r", params.r},
            {"n", params.n},
            {"columns", params.columns},
            {"eta", params.eta}};
}

nlohmann::json to_json(const RecoveryOptions& opts) {
    return {{"k", opts.k},
            {"stop_epsilon", opts.stop_epsilon},
            {"max_retries", opts.max_retries},
            {"kerdock_projection", opts.kerdock_projection},
            {"seed", opts.seed}};
}

nlohmann::json to_json(const RecoveryReport& report, const FrameParams& params) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& term : report.terms)
        terms.push_back({{"flat_index", term.index.flat(params)},
                         {"dg_coeffs", term.index.dg_coeffs},
                         {"b", term.index.b.word()},
                         {"coeff_re", term.coefficient.real()},
                         {"coeff_im", term.coefficient.imag()}});
    return {{"iterations", report.iterations},
            {"row_decode_failures", report.row_decode_failures},
            {"decode_failed", report.decode_failed},
            {"refit_failed", report.refit_failed},
            {"degenerate", report.degenerate},
            {"columns_evaluated", report.columns_evaluated},
            {"residual_norms", report.residual_norms},
            {"refit_residual", report.refit_residual},
            {"decode_ms", report.decode_ms},
            {"refit_ms", report.refit_ms},
            {"terms", terms}};
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

}  // namespace chirpcs
