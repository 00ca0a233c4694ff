#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resodyn/cli/output.hpp"
#include "resodyn/cli/schema.hpp"
#include "resodyn/ensemble.hpp"
#include "resodyn/goodness_of_fit.hpp"
#include "resodyn/two_level.hpp"

namespace resodyn::cli {

enum class Format { csv, json };
Format parse_format(const std::string& text);

// ---- two-level sweep -------------------------------------------------------

struct SweepRequest {
    two_level::Params params;
    double alpha_min = -1.0;
    double alpha_max = 1.0;
    std::size_t steps = 201;
};

const Schema& sweep_schema();
SweepRequest sweep_request(const nlohmann::json& resolved);

/// Column order of the trajectory table. New columns go at the end.
const std::vector<std::string>& sweep_columns();
std::string sweep_output(const SweepRequest& request, const Provenance& provenance, Format format);

// ---- two-level critical-points ----------------------------------------------

struct CriticalRequest {
    two_level::Params params;
    double alpha_min = -2.0;
    double alpha_max = 2.0;
    std::size_t scan_points = 2001;
};

const Schema& critical_schema();
CriticalRequest critical_request(const nlohmann::json& resolved);

struct CriticalResult {
    nlohmann::json report;
    /// Empty when both searches succeeded.
    std::vector<std::string> errors;
};

CriticalResult critical_points(const CriticalRequest& request, const Provenance& provenance);

// ---- ensemble ---------------------------------------------------------------

struct EnsembleRequest {
    EnsembleConfig config;
    bool seed_given = false;
    std::size_t bins = 61;
    double y_min = 0.0;
    double y_max = 0.0;
    double max_memory_mb = 4096.0;
};

const Schema& ensemble_schema();
/// `generated_seed` fills in the seed when the key is absent.
EnsembleRequest ensemble_request(const nlohmann::json& resolved, std::uint64_t generated_seed);

/// Rough peak memory of a run in MiB.
double projected_memory_mb(const EnsembleConfig& config);

struct EnsembleOutputs {
    VelocitySampleSet samples;
    std::string histogram_csv;
    std::string samples_csv;
    nlohmann::json report;
};

/// Throws UsageError when the projected memory exceeds the cap.
EnsembleOutputs run_ensemble(const EnsembleRequest& request, const Provenance& provenance);

std::string samples_csv(const VelocitySampleSet& samples, const Provenance& provenance);

// ---- dist -------------------------------------------------------------------

struct DistRequest {
    SpectrumKind kind = SpectrumKind::picket_fence;
    int channels = 1;
    std::vector<double> grid;
};

const Schema& dist_schema();
DistRequest dist_request(const nlohmann::json& resolved);
const std::vector<std::string>& dist_columns();
std::string dist_output(const DistRequest& request, const Provenance& provenance, Format format);

}  // namespace resodyn::cli
