#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "chirpcs/decoder.hpp"
#include "chirpcs/frame.hpp"

namespace chirpcs {

/// One long-format experiment row; the CSV schema is fixed and versioned.
struct ExperimentRecord {
    std::uint64_t trial_id = 0;
    int m = 0;
    int r = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::string metric_name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = true;
};

inline constexpr const char* kCsvSchemaVersion = "cscli-csv v1";

/// Stable formatting (%.17g) so identical seeds give byte-identical files.
std::string to_csv(const std::vector<ExperimentRecord>& records);
void write_csv_file(const std::string& path, const std::vector<ExperimentRecord>& records);

nlohmann::json to_json(const ExperimentRecord& rec);
nlohmann::json to_json(const CertificateRecord& cert);
nlohmann::json to_json(const FrameParams& params);
nlohmann::json to_json(const RecoveryOptions& opts);
nlohmann::json to_json(const RecoveryReport& report, const FrameParams& params);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace chirpcs
