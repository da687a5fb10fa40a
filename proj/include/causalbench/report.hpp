#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "causalbench/config.hpp"
#include "causalbench/errors.hpp"
#include "causalbench/metrics.hpp"
#include "causalbench/posthoc.hpp"
#include "causalbench/profiles.hpp"
#include "causalbench/ranktest.hpp"

namespace causalbench {

/// Failure inside one pipeline stage ("load", "metrics", "profiles", ...).
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// For each model (best Friedman rank first) the models it significantly beats.
struct OutperformanceSummary {
    struct Entry {
        std::string model;
        double avg_rank = 0.0;
        std::vector<std::string> outperforms;
    };
    std::vector<Entry> entries;
};

/// A beats B iff H(A,B) is rejected and R_A < R_B.
OutperformanceSummary build_outperformance(const RankSummary& ranks, const PosthocReport& posthoc);

/// Everything computed for one metric.
struct MetricAnalysis {
    ErrorMatrix errors;
    RatioMatrix ratios;
    std::vector<ProfileCurve> curves;  // Friedman rank order
    RankSummary ranks;
    PosthocReport posthoc;
    OutperformanceSummary outperformance;
};

MetricAnalysis analyze(const ErrorMatrix& errors, double alpha);

// ---- table rendering ------------------------------------------------------

/// Six decimals; values below 5e-7 print as "0".
std::string format_apv(double apv);
/// Scientific notation, floored at 1e-16 for display only.
std::string format_p_display(double p);

std::string friedman_markdown(const RankSummary& ranks, std::string_view title);
/// `model,avg_rank,statistic,dof,p_value,n_sims`, rank order, full precision.
std::string friedman_csv(const RankSummary& ranks);

struct FriedmanCsvRow {
    std::string model;
    double avg_rank = 0.0;
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
    std::size_t n_sims = 0;
};
std::vector<FriedmanCsvRow> read_friedman_csv(const std::string& path);

/// Pair naming follows `order` (positions into models): the earlier model is
/// named first. Pass an empty order for declaration order.
std::string posthoc_markdown(const PosthocReport& report, std::span<const std::size_t> order,
                             std::string_view title);
std::string posthoc_csv(const PosthocReport& report, std::span<const std::size_t> order);

std::string outperformance_markdown(const OutperformanceSummary& summary, const PosthocReport& posthoc,
                                    std::string_view title);

std::string summary_markdown(const ErrorMatrix& errors, std::span<const std::size_t> order, bool root_pehe);

/// Writes the per-metric bundle into `dir` and returns the relative file names.
std::vector<std::string> write_metric_report(const MetricAnalysis& analysis, const std::filesystem::path& dir,
                                             Scale scale, bool root_pehe);

// ---- orchestration --------------------------------------------------------

struct RunResult {
    std::filesystem::path output_dir;
    std::vector<std::string> files;  // relative to output_dir
    std::vector<MetricAnalysis> analyses;
};

/// Schema, NaN, model-set and group-presence checks without running the
/// benchmark. Throws IoError for unreadable paths.
std::vector<Diagnostic> validate_inputs(const BenchmarkConfig& config);

/// Error matrices for every configured metric (loads data, fits estimators).
std::vector<ErrorMatrix> compute_error_matrices(const BenchmarkConfig& config);

/// Full pipeline. Output is staged and only moved into place once every stage
/// succeeded; on failure the staging directory is removed and StageError thrown.
RunResult run_benchmark(const BenchmarkConfig& config);

/// Profiles only, from a precomputed error CSV.
std::vector<std::string> run_profile_only(const ErrorMatrix& errors, Scale scale, const std::filesystem::path& out);

/// Friedman + Bergmann-Hommel from a precomputed error CSV.
std::vector<std::string> run_posthoc_only(const ErrorMatrix& errors, double alpha, const std::filesystem::path& out);

/// Bergmann-Hommel over supplied raw p-values (`model_a,model_b,p` CSV).
std::vector<ExternalPValue> read_p_value_csv(const std::string& path);
std::vector<std::string> run_posthoc_from_p_values(std::span<const ExternalPValue> p_values, double alpha,
                                                   const std::filesystem::path& out);

/// Writes one potential-outcome CSV per realization (`sim_0001.csv`, ...);
/// estimator predictions are included when `roster` is non-empty.
std::vector<std::string> export_synthetic(const SyntheticConfig& config, std::span<const EstimatorSpec> roster,
                                          const std::filesystem::path& out);

std::string sha256_hex(const std::filesystem::path& file);

inline constexpr std::string_view kVersion = "0.3.0";

}  // namespace causalbench
