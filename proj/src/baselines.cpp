#include "causalbench/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "causalbench/errors.hpp"
#include "causalbench/numeric.hpp"

namespace causalbench {
namespace {

constexpr double kRidgeJitter = 1e-10;

void require_both_groups(const SimulationRealization& r) {
    const std::size_t treated = r.n_treated();
    if (r.n_units() == 0 || treated == 0 || treated == r.n_units()) {
        throw EstimationError("sim " + std::to_string(r.sim_id) + ": need both treated and control units");
    }
    if (r.y_factual.size() != r.n_units())
        throw EstimationError("sim " + std::to_string(r.sim_id) + ": factual outcomes missing");
}

Predictions diff_in_means(const SimulationRealization& r) {
    CompensatedSum treated, control;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < r.n_units(); ++i) {
        if (r.t[i] == 1) {
            treated.add(r.y_factual[i]);
            ++n1;
        } else {
            control.add(r.y_factual[i]);
        }
    }
    const double mu1 = treated.value() / static_cast<double>(n1);
    const double mu0 = control.value() / static_cast<double>(r.n_units() - n1);
    return {std::vector<double>(r.n_units(), mu0), std::vector<double>(r.n_units(), mu1)};
}

// Least squares on [1, x, t] through the normal equations.
Predictions s_learner_linear(const SimulationRealization& r) {
    const auto n = static_cast<Eigen::Index>(r.n_units());
    const auto d = static_cast<Eigen::Index>(r.n_covariates());
    Eigen::MatrixXd design(n, d + 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        design(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < d; ++j) design(i, j + 1) = r.covariates[iu][static_cast<std::size_t>(j)];
        design(i, d + 1) = static_cast<double>(r.t[iu]);
        y(i) = r.y_factual[iu];
    }
    Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd rhs = design.transpose() * y;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd diag = ldlt.vectorD();
    const double scale = std::max(1.0, gram.diagonal().cwiseAbs().maxCoeff());
    const bool singular = ldlt.info() != Eigen::Success ||
                          diag.cwiseAbs().minCoeff() <= scale * 1e-13 * static_cast<double>(gram.rows());
    if (singular) {
        gram.diagonal().array() += kRidgeJitter;
        ldlt.compute(gram);
    }
    const Eigen::VectorXd beta = ldlt.solve(rhs);

    Predictions out;
    out.y0_hat.resize(r.n_units());
    out.y1_hat.resize(r.n_units());
    const double effect = beta(d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        double base = beta(0);
        for (Eigen::Index j = 0; j < d; ++j) base += beta(j + 1) * design(i, j + 1);
        out.y0_hat[static_cast<std::size_t>(i)] = base;
        out.y1_hat[static_cast<std::size_t>(i)] = base + effect;
    }
    return out;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

Predictions knn_matching(const SimulationRealization& r, std::size_t k) {
    const std::size_t n = r.n_units();
    std::vector<std::size_t> treated, control;
    for (std::size_t i = 0; i < n; ++i) (r.t[i] == 1 ? treated : control).push_back(i);

    const std::vector<std::vector<double>> empty_rows(n);
    const auto& x = r.covariates.empty() ? empty_rows : r.covariates;

    Predictions out{std::vector<double>(n), std::vector<double>(n)};
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pool = r.t[i] == 1 ? control : treated;
        dist.clear();
        for (std::size_t j : pool) dist.emplace_back(squared_distance(x[i], x[j]), j);
        const std::size_t take = std::min(k, dist.size());
        // (distance, unit index) ordering breaks ties by lowest index
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
        CompensatedSum acc;
        for (std::size_t p = 0; p < take; ++p) acc.add(r.y_factual[dist[p].second]);
        const double counterfactual = acc.value() / static_cast<double>(take);
        if (r.t[i] == 1) {
            out.y1_hat[i] = r.y_factual[i];
            out.y0_hat[i] = counterfactual;
        } else {
            out.y0_hat[i] = r.y_factual[i];
            out.y1_hat[i] = counterfactual;
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::DiffInMeans: return "DIFF_IN_MEANS";
        case EstimatorKind::SLearnerLinear: return "S_LEARNER_LINEAR";
        case EstimatorKind::KnnMatching: return "KNN_MATCHING";
    }
    return "?";
}

EstimatorKind parse_estimator_kind(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "DIFF_IN_MEANS") return EstimatorKind::DiffInMeans;
    if (upper == "S_LEARNER_LINEAR") return EstimatorKind::SLearnerLinear;
    if (upper == "KNN_MATCHING") return EstimatorKind::KnnMatching;
    throw LookupError("unknown estimator kind '" + std::string(text) + "'");
}

Predictions fit_predict(const EstimatorSpec& spec, const SimulationRealization& realization) {
    require_both_groups(realization);
    switch (spec.kind) {
        case EstimatorKind::DiffInMeans: return diff_in_means(realization);
        case EstimatorKind::SLearnerLinear: return s_learner_linear(realization);
        case EstimatorKind::KnnMatching: {
            double k = 1.0;
            if (const auto it = spec.hyperparams.find("k"); it != spec.hyperparams.end()) k = it->second;
            if (!(k >= 1.0) || k != std::floor(k))
                throw EstimationError("estimator '" + spec.name + "': k must be a positive integer");
            return knn_matching(realization, static_cast<std::size_t>(k));
        }
    }
    throw EstimationError("unhandled estimator kind");
}

PotentialOutcomeTable predict_all(std::span<const EstimatorSpec> roster, const SimulationRealization& realization) {
    std::set<std::string_view> names;
    for (const auto& spec : roster) {
        if (!names.insert(spec.name).second) throw ValidationError("duplicate estimator name '" + spec.name + "'");
    }
    auto table = realization.to_outcome_table();
    for (const auto& spec : roster) {
        auto p = fit_predict(spec, realization);
        table.models.push_back(ModelPrediction{spec.name, std::move(p.y0_hat), std::move(p.y1_hat)});
    }
    return table;
}

}  // namespace causalbench
