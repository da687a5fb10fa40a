#include "causalbench/ranktest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causalbench/errors.hpp"
#include "causalbench/numeric.hpp"

namespace causalbench {

std::vector<double> rank_row(std::span<const double> row) {
    const std::size_t k = row.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });

    std::vector<double> ranks(k);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i + 1;
        while (j < k && row[order[j]] == row[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j; their mean is exact in binary
        const double shared = static_cast<double>(i + 1 + j) / 2.0;
        for (std::size_t p = i; p < j; ++p) ranks[order[p]] = shared;
        i = j;
    }
    return ranks;
}

RankSummary friedman_ranks(const ErrorMatrix& errors) {
    const std::size_t k = errors.n_models();
    const std::size_t n = errors.n_sims();
    if (k < 2) throw ValidationError("Friedman test needs at least 2 models");
    if (n < 2) throw ValidationError("Friedman test needs at least 2 simulations");

    RankSummary out;
    out.models = errors.models();
    out.n_sims = n;
    out.dof = static_cast<int>(k) - 1;
    out.per_sim_ranks.reserve(n * k);
    std::vector<CompensatedSum> sums(k);
    for (std::size_t s = 0; s < n; ++s) {
        const auto ranks = rank_row(errors.row(s));
        for (std::size_t j = 0; j < k; ++j) {
            out.per_sim_ranks.push_back(ranks[j]);
            sums[j].add(ranks[j]);
        }
    }
    out.avg_ranks.reserve(k);
    for (const auto& acc : sums) out.avg_ranks.push_back(acc.value() / static_cast<double>(n));
    return out;
}

double friedman_statistic_value(std::span<const double> avg_ranks, std::size_t n_sims) {
    const double k = static_cast<double>(avg_ranks.size());
    const double n = static_cast<double>(n_sims);
    CompensatedSum squares;
    for (double r : avg_ranks) squares.add(r * r);
    const double centred = squares.value() - k * (k + 1.0) * (k + 1.0) / 4.0;
    const double f = 12.0 * n / (k * (k + 1.0)) * centred;
    // cancellation can leave -ulp residue for exactly tied ranks
    return std::max(f, 0.0);
}

RankSummary friedman_statistic(RankSummary ranks) {
    if (ranks.avg_ranks.size() < 2) throw ValidationError("Friedman statistic needs average ranks");
    const double f = friedman_statistic_value(ranks.avg_ranks, ranks.n_sims);
    ranks.statistic = f;
    ranks.p_value = chi_square_sf(f, ranks.dof);
    return ranks;
}

namespace {

// Iteration limits for Q(a, x); fixed so results are reproducible bit for bit.
constexpr int kMaxIterations = 10000;
constexpr double kRelTolerance = 1e-16;
constexpr double kTiny = 1e-300;

// P(a, x) by its power series; used for x < a + 1.
double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double denom = a;
    for (int i = 0; i < kMaxIterations; ++i) {
        denom += 1.0;
        term *= x / denom;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kRelTolerance) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by modified Lentz evaluation of the Legendre continued fraction.
double upper_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kRelTolerance) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw DomainError("incomplete gamma needs a > 0");
    if (!(x >= 0.0)) throw DomainError("incomplete gamma needs x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return std::clamp(1.0 - lower_series(a, x), 0.0, 1.0);
    return std::clamp(upper_fraction(a, x), 0.0, 1.0);
}

double chi_square_sf(double x, int dof) {
    if (dof < 1) throw DomainError("chi-square needs dof >= 1");
    if (std::isnan(x) || x < 0.0) throw DomainError("chi-square argument must be >= 0");
    return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

std::vector<std::size_t> rank_order(const RankSummary& ranks) {
    std::vector<std::size_t> order(ranks.n_models());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (ranks.avg_ranks[a] != ranks.avg_ranks[b]) return ranks.avg_ranks[a] < ranks.avg_ranks[b];
        return ranks.models[a] < ranks.models[b];
    });
    return order;
}

}  // namespace causalbench
