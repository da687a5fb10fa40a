#include "causalbench/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "causalbench/errors.hpp"
#include "causalbench/numeric.hpp"

namespace causalbench {
namespace {

void require_finite(std::span<const double> xs, std::string_view what, long long sim_id) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(xs[i])) {
            throw ValidationError("sim " + std::to_string(sim_id) + ": non-finite " +
                                  std::string(what) + " at unit " + std::to_string(i));
        }
    }
}

// Residual ITE of one unit: true effect minus estimated effect.
template <typename Fn>
void for_each_residual(const PotentialOutcomeTable& table, const ModelPrediction& pred, Fn&& fn) {
    const std::size_t n = table.n_units();
    if (pred.y0_hat.size() != n || pred.y1_hat.size() != n) {
        throw ValidationError("sim " + std::to_string(table.sim_id) + ": model '" + pred.name +
                              "' has prediction length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        fn((table.y1_true[i] - table.y0_true[i]) - (pred.y1_hat[i] - pred.y0_hat[i]));
    }
}

}  // namespace

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::AteAbs: return "ATE_ABS";
        case Metric::Pehe: return "PEHE";
    }
    return "?";
}

Metric parse_metric(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "ATE_ABS" || upper == "ATE") return Metric::AteAbs;
    if (upper == "PEHE") return Metric::Pehe;
    throw LookupError("unknown metric '" + std::string(text) + "' (expected ATE_ABS or PEHE)");
}

void PotentialOutcomeTable::validate() const {
    const std::size_t n = y0_true.size();
    const std::string tag = "sim " + std::to_string(sim_id) + ": ";
    if (n == 0) throw ValidationError(tag + "no units");
    if (y1_true.size() != n) throw ValidationError(tag + "y1_true/y0_true length mismatch");
    if (!t.empty() && t.size() != n) throw ValidationError(tag + "treatment length mismatch");
    if (!y_factual.empty() && y_factual.size() != n)
        throw ValidationError(tag + "y_factual length mismatch");
    if (!covariates.empty()) {
        if (covariates.size() != n) throw ValidationError(tag + "covariate row count mismatch");
        const std::size_t d = covariates.front().size();
        for (const auto& row : covariates) {
            if (row.size() != d) throw ValidationError(tag + "ragged covariate rows");
            require_finite(row, "covariate", sim_id);
        }
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] != 0 && t[i] != 1) {
            throw ValidationError(tag + "treatment must be 0 or 1 at unit " + std::to_string(i));
        }
    }
    require_finite(y0_true, "y0_true", sim_id);
    require_finite(y1_true, "y1_true", sim_id);
    require_finite(y_factual, "y_factual", sim_id);

    std::set<std::string_view> seen;
    for (const auto& m : models) {
        if (m.name.empty()) throw ValidationError(tag + "empty model name");
        if (!seen.insert(m.name).second)
            throw ValidationError(tag + "duplicate model '" + m.name + "'");
        if (m.y0_hat.size() != n || m.y1_hat.size() != n)
            throw ValidationError(tag + "model '" + m.name + "' has prediction length mismatch");
        require_finite(m.y0_hat, m.name + "_y0", sim_id);
        require_finite(m.y1_hat, m.name + "_y1", sim_id);
    }
}

const ModelPrediction& PotentialOutcomeTable::model(std::string_view name) const {
    for (const auto& m : models) {
        if (m.name == name) return m;
    }
    throw LookupError("sim " + std::to_string(sim_id) + ": unknown model '" + std::string(name) + "'");
}

std::vector<std::string> PotentialOutcomeTable::model_names() const {
    std::vector<std::string> names;
    names.reserve(models.size());
    for (const auto& m : models) names.push_back(m.name);
    return names;
}

double ate_error(const PotentialOutcomeTable& table, std::string_view model) {
    if (table.y1_true.size() != table.y0_true.size() || table.n_units() == 0)
        throw ValidationError("sim " + std::to_string(table.sim_id) + ": invalid outcome vectors");
    CompensatedSum acc;
    for_each_residual(table, table.model(model), [&](double r) { acc.add(r); });
    return std::abs(acc.value() / static_cast<double>(table.n_units()));
}

double pehe(const PotentialOutcomeTable& table, std::string_view model) {
    if (table.y1_true.size() != table.y0_true.size() || table.n_units() == 0)
        throw ValidationError("sim " + std::to_string(table.sim_id) + ": invalid outcome vectors");
    CompensatedSum acc;
    for_each_residual(table, table.model(model), [&](double r) { acc.add(r * r); });
    return acc.value() / static_cast<double>(table.n_units());
}

double metric_value(const PotentialOutcomeTable& table, std::string_view model, Metric metric) {
    return metric == Metric::AteAbs ? ate_error(table, model) : pehe(table, model);
}

ErrorMatrix::ErrorMatrix(Metric metric, std::vector<std::string> models,
                         std::vector<long long> sims, std::vector<double> values)
    : metric_(metric), models_(std::move(models)), sims_(std::move(sims)), values_(std::move(values)) {
    if (models_.size() < 2) throw ValidationError("error matrix needs at least 2 models");
    if (sims_.empty()) throw ValidationError("error matrix needs at least 1 simulation");
    if (values_.size() != models_.size() * sims_.size())
        throw ValidationError("error matrix shape mismatch");
    std::set<std::string_view> seen;
    for (const auto& m : models_) {
        if (!seen.insert(m).second) throw ValidationError("duplicate model '" + m + "'");
    }
    for (std::size_t s = 0; s < sims_.size(); ++s) {
        for (std::size_t m = 0; m < models_.size(); ++m) {
            const double v = at(s, m);
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("sim " + std::to_string(sims_[s]) + ", model '" + models_[m] +
                                      "': error must be finite and >= 0");
            }
        }
    }
}

std::size_t ErrorMatrix::model_index(std::string_view name) const {
    const auto it = std::find(models_.begin(), models_.end(), name);
    if (it == models_.end()) throw LookupError("unknown model '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - models_.begin());
}

ErrorMatrix ErrorMatrix::with_model_order(const std::vector<std::string>& order) const {
    if (order.size() != models_.size()) throw ValidationError("model order is not a permutation");
    std::vector<std::size_t> src;
    src.reserve(order.size());
    for (const auto& name : order) src.push_back(model_index(name));
    std::vector<double> values;
    values.reserve(values_.size());
    for (std::size_t s = 0; s < n_sims(); ++s) {
        for (std::size_t j : src) values.push_back(at(s, j));
    }
    return ErrorMatrix(metric_, order, sims_, std::move(values));
}

ErrorMatrix build_error_matrix(std::span<const PotentialOutcomeTable> tables, Metric metric) {
    if (tables.empty()) throw ValidationError("no simulation tables supplied");
    const auto models = tables.front().model_names();
    const std::set<std::string> reference(models.begin(), models.end());

    std::vector<std::string> offenders;
    for (const auto& table : tables) {
        const auto names = table.model_names();
        if (std::set<std::string>(names.begin(), names.end()) != reference)
            offenders.push_back(std::to_string(table.sim_id));
    }
    if (!offenders.empty()) {
        std::string list;
        for (const auto& o : offenders) list += (list.empty() ? "" : ", ") + o;
        throw ValidationError("inconsistent model sets in simulations: " + list);
    }

    std::vector<long long> sims;
    std::vector<double> values;
    sims.reserve(tables.size());
    values.reserve(tables.size() * models.size());
    for (const auto& table : tables) {
        table.validate();
        sims.push_back(table.sim_id);
        for (const auto& m : models) values.push_back(metric_value(table, m, metric));
    }
    return ErrorMatrix(metric, models, std::move(sims), std::move(values));
}

}  // namespace causalbench
