#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "causalbench/ranktest.hpp"

namespace causalbench {

/// Largest model count accepted by exhaustive-set enumeration. Bell(9) = 21147
/// partitions; Bell(10) would already be 115975 with m = 45 hypotheses.
inline constexpr int kMaxExhaustiveModels = 9;

/// Null hypothesis "model_a and model_b perform equally".
struct PairHypothesis {
    int index = 0;  // 1-based, lexicographic over (a, b) with a < b
    std::size_t a = 0;
    std::size_t b = 0;
    std::string model_a;
    std::string model_b;
    double z = 0.0;
    double p_raw = 1.0;
};

/// 1-based hypothesis index of the pair (a, b), a != b, among k models.
int pair_index(std::size_t a, std::size_t b, std::size_t k);

/// Two-sided normal p-values of z = (R_a - R_b) / sqrt(k(k+1) / (6n)).
std::vector<PairHypothesis> pairwise_p_values(const RankSummary& ranks);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/// Hypotheses over `models` with externally supplied raw p-values. Every pair
/// must appear exactly once in `p_values`, given as (model_a, model_b, p).
struct ExternalPValue {
    std::string model_a;
    std::string model_b;
    double p = 1.0;
};
std::vector<PairHypothesis> hypotheses_from_p_values(const std::vector<std::string>& models,
                                                     std::span<const ExternalPValue> p_values);

/// Index set of hypotheses that can all be true together: the within-block
/// pairs of some partition of the models.
struct ExhaustiveSet {
    std::vector<int> indices;        // sorted, 1-based
    std::uint64_t mask = 0;          // bit (index - 1)
    std::vector<int> partition;      // block label per model (restricted growth string)
};

struct ExhaustiveSetFamily {
    int k = 0;
    std::vector<ExhaustiveSet> sets;  // includes the empty set; ordered by (size, indices)

    std::size_t n_hypotheses() const noexcept { return static_cast<std::size_t>(k * (k - 1) / 2); }
};

/// Throws DomainError for k < 2, CapacityError for k > kMaxExhaustiveModels.
ExhaustiveSetFamily enumerate_exhaustive_sets(int k);

/// A = union of exhaustive I with min p_I > alpha / |I|. Returned sorted, 1-based.
std::vector<int> acceptance_set(std::span<const PairHypothesis> hypotheses,
                                const ExhaustiveSetFamily& family, double alpha);

enum class Decision { Rejected, Retained };

struct AdjustedHypothesis {
    PairHypothesis hypothesis;
    double apv = 1.0;
    Decision decision = Decision::Retained;
};

struct PosthocReport {
    std::vector<AdjustedHypothesis> hypotheses;  // by index
    double alpha = 0.05;
    std::vector<int> acceptance_set;

    /// Positions into `hypotheses`, ascending APV, ties by index.
    std::vector<std::size_t> display_order() const;
};

/// Bergmann-Hommel adjusted p-values, decisions at `alpha` (APV <= alpha
/// rejects) and the matching acceptance set.
PosthocReport bergmann_hommel_apv(std::span<const PairHypothesis> hypotheses,
                                  const ExhaustiveSetFamily& family, double alpha = 0.05);

}  // namespace causalbench
