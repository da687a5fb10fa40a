#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalbench/baselines.hpp"
#include "causalbench/datagen.hpp"
#include "causalbench/metrics.hpp"
#include "causalbench/profiles.hpp"

namespace causalbench {

enum class SourceKind {
    Synthetic,  ///< generate data, fit the estimator roster
    Ihdp,       ///< load NPCI realizations, fit the estimator roster
    Outcomes,   ///< externally produced potential-outcome CSVs (one per simulation)
    Errors,     ///< precomputed error matrices, one CSV per metric
};

std::string_view to_string(SourceKind kind);

struct SourceConfig {
    SourceKind kind = SourceKind::Synthetic;
    SyntheticConfig synthetic;
    std::string path;                             // ihdp / outcomes: file or directory
    std::optional<std::size_t> limit;             // ihdp / outcomes
    std::optional<std::size_t> expect_units;      // ihdp
    std::optional<std::size_t> expect_treated;    // ihdp
    std::map<Metric, std::string> error_files;    // errors
};

struct BenchmarkConfig {
    SourceConfig source;
    std::vector<Metric> metrics{Metric::AteAbs, Metric::Pehe};
    std::vector<EstimatorSpec> estimators = default_estimators();
    double alpha = 0.05;
    std::string output_dir = "causalbench-report";
    Scale scale = Scale::Log10;
    bool root_pehe = false;

    /// The three stand-in estimators with default names.
    static std::vector<EstimatorSpec> default_estimators();
};

/// Throws ValidationError on schema violations. Relative paths inside the
/// document are resolved against `base_dir` when it is non-empty.
BenchmarkConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = {});
BenchmarkConfig load_config(const std::string& path);

/// CAUSALBENCH_OUTPUT_DIR and CAUSALBENCH_SEED, when set.
void apply_env_overrides(BenchmarkConfig& config);

nlohmann::json to_json(const BenchmarkConfig& config);

}  // namespace causalbench
