#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causalbench {

/// Error metric used to score an estimator on one simulation.
enum class Metric {
    AteAbs,  ///< absolute error of the average treatment effect
    Pehe,    ///< mean squared error of individual treatment effects (no root)
};

std::string_view to_string(Metric metric);
/// Accepts "ATE_ABS" / "PEHE" (case-insensitive).
Metric parse_metric(std::string_view text);

struct ModelPrediction {
    std::string name;
    std::vector<double> y0_hat;
    std::vector<double> y1_hat;
};

/// True and estimated potential outcomes of one simulation.
///
/// `t`, `y_factual` and `covariates` are optional provenance columns; an
/// empty vector means "absent". `covariates` is row-major, one row per unit.
struct PotentialOutcomeTable {
    long long sim_id = 0;
    std::vector<double> y0_true;
    std::vector<double> y1_true;
    std::vector<int> t;
    std::vector<double> y_factual;
    std::vector<std::vector<double>> covariates;
    std::vector<ModelPrediction> models;

    std::size_t n_units() const noexcept { return y0_true.size(); }

    /// Checks shared lengths, n >= 1, finiteness, binary t and unique model
    /// names. Throws ValidationError.
    void validate() const;

    /// Throws LookupError when absent.
    const ModelPrediction& model(std::string_view name) const;

    std::vector<std::string> model_names() const;
};

double ate_error(const PotentialOutcomeTable& table, std::string_view model);
double pehe(const PotentialOutcomeTable& table, std::string_view model);
double metric_value(const PotentialOutcomeTable& table, std::string_view model, Metric metric);

/// n_sims x k grid of nonnegative error scores, row-major by simulation.
class ErrorMatrix {
public:
    /// Throws ValidationError unless k >= 2, n_s >= 1, shape matches, names are
    /// unique and every value is finite and >= 0.
    ErrorMatrix(Metric metric, std::vector<std::string> models, std::vector<long long> sims,
                std::vector<double> values);

    Metric metric() const noexcept { return metric_; }
    const std::vector<std::string>& models() const noexcept { return models_; }
    const std::vector<long long>& sims() const noexcept { return sims_; }
    std::size_t n_sims() const noexcept { return sims_.size(); }
    std::size_t n_models() const noexcept { return models_.size(); }

    double at(std::size_t sim, std::size_t model) const { return values_[sim * models_.size() + model]; }
    std::span<const double> row(std::size_t sim) const {
        return {values_.data() + sim * models_.size(), models_.size()};
    }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Index of `name` in model order; throws LookupError.
    std::size_t model_index(std::string_view name) const;

    /// Same content with columns reordered to `order` (a permutation of models()).
    ErrorMatrix with_model_order(const std::vector<std::string>& order) const;

private:
    Metric metric_;
    std::vector<std::string> models_;
    std::vector<long long> sims_;
    std::vector<double> values_;
};

/// Assembles one row per table, columns in the first table's declaration
/// order. Tables must all carry the same model set.
ErrorMatrix build_error_matrix(std::span<const PotentialOutcomeTable> tables, Metric metric);

// ---- CSV interchange ------------------------------------------------------

/// Potential-outcome file (one simulation):
///   unit,t,y0_true,y1_true[,y_factual][,x1..xd],<model>_y0,<model>_y1,...
/// `t` may be left blank on every row when unknown.
PotentialOutcomeTable read_outcome_csv(const std::string& path, long long sim_id);
void write_outcome_csv(const PotentialOutcomeTable& table, const std::string& path);

/// A single problem found while reading a precomputed error file.
struct Diagnostic {
    std::string source;
    std::string message;
};

/// Precomputed errors: `sim,<model1>,<model2>,...`. Collects every problem
/// instead of stopping at the first; `matrix` is set only when clean.
struct ErrorCsvScan {
    std::optional<ErrorMatrix> matrix;
    std::vector<Diagnostic> diagnostics;
};
ErrorCsvScan scan_error_csv(const std::string& path, Metric metric);

/// Throws ValidationError carrying all diagnostics when the file is not clean.
ErrorMatrix read_error_csv(const std::string& path, Metric metric);
void write_error_csv(const ErrorMatrix& errors, const std::string& path);

}  // namespace causalbench
