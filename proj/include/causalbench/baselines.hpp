#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalbench/datagen.hpp"
#include "causalbench/metrics.hpp"

namespace causalbench {

/// Stand-in estimators that exist so the pipeline runs without external models.
enum class EstimatorKind { DiffInMeans, SLearnerLinear, KnnMatching };

std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view text);

struct EstimatorSpec {
    std::string name;
    EstimatorKind kind = EstimatorKind::DiffInMeans;
    std::map<std::string, double> hyperparams;  // KNN: "k" (default 1)
};

struct Predictions {
    std::vector<double> y0_hat;
    std::vector<double> y1_hat;
};

/// Throws EstimationError when the realization lacks a treated or a control unit.
Predictions fit_predict(const EstimatorSpec& spec, const SimulationRealization& realization);

/// Runs every estimator and returns the realization's outcome table with one
/// model column pair per spec. Names must be unique.
PotentialOutcomeTable predict_all(std::span<const EstimatorSpec> roster, const SimulationRealization& realization);

}  // namespace causalbench
