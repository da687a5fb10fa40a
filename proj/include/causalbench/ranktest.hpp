#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalbench/metrics.hpp"

namespace causalbench {

/// Friedman ranking of k models over n simulations.
struct RankSummary {
    std::vector<std::string> models;
    std::vector<double> per_sim_ranks;  // n_sims x k, row-major; 1 = best
    std::vector<double> avg_ranks;      // R_j
    std::size_t n_sims = 0;
    int dof = 0;
    std::optional<double> statistic;
    std::optional<double> p_value;

    std::size_t n_models() const noexcept { return models.size(); }
};

/// Average ranks within one row, smallest value ranked 1, exact ties sharing
/// the mean of the ranks they span.
std::vector<double> rank_row(std::span<const double> row);

/// Ranks each simulation row and averages per model. Requires k >= 2, n >= 2.
RankSummary friedman_ranks(const ErrorMatrix& errors);

/// Fills the chi-square statistic and its upper-tail p-value (k-1 dof).
RankSummary friedman_statistic(RankSummary ranks);

/// Statistic from average ranks alone.
double friedman_statistic_value(std::span<const double> avg_ranks, std::size_t n_sims);

/// Upper tail of the chi-square distribution, Q(dof/2, x/2).
double chi_square_sf(double x, int dof);

/// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

/// Model indices ordered best (lowest average rank) first, ties by name.
std::vector<std::size_t> rank_order(const RankSummary& ranks);

}  // namespace causalbench
