#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causalbench/metrics.hpp"

namespace causalbench {

/// SplitMix64 (Steele, Lea & Flood; constants as published by Vigna).
///
/// Every unit of every simulation draws from its own stream keyed by
/// (seed, sim, unit), so generation order and parallelism do not change
/// the output.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Standard normal by the Box-Muller transform (one value per two uniforms).
    double normal() noexcept;

    /// Independent stream for (seed, a, b).
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept;

private:
    std::uint64_t state_;
};

double sigmoid(double x) noexcept;

struct SyntheticConfig {
    std::size_t n_units = 500;
    std::size_t n_sims = 100;
    std::uint64_t seed = 0;
    double sigma_z0 = 3.0;  ///< proxy standard deviation when z = 0
    double sigma_z1 = 5.0;  ///< proxy standard deviation when z = 1
    bool noiseless_truth = true;
    std::size_t proxy_dim = 1;

    /// Throws ValidationError.
    void validate() const;
};

enum class DataSource { Synthetic, Ihdp };

struct SimulationRealization {
    long long sim_id = 0;
    std::vector<std::vector<double>> covariates;  // n x d
    std::vector<int> t;
    std::vector<double> y_factual;
    std::vector<double> y0_true;
    std::vector<double> y1_true;
    DataSource source = DataSource::Synthetic;
    /// Latent mixture component (synthetic only; empty otherwise).
    std::vector<int> z;

    std::size_t n_units() const noexcept { return t.size(); }
    std::size_t n_covariates() const noexcept { return covariates.empty() ? 0 : covariates.front().size(); }
    std::size_t n_treated() const noexcept;

    /// Outcome table with no model columns.
    PotentialOutcomeTable to_outcome_table() const;
    static SimulationRealization from_outcome_table(const PotentialOutcomeTable& table, DataSource source);
};

/// Hidden-confounder generator. Per unit:
///   z ~ Bern(0.5), t | z ~ Bern(0.75 z + 0.25 (1 - z)),
///   x | z ~ N(z, sigma_z1^2 z + sigma_z0^2 (1 - z)),
///   y | t, z ~ Bern(sigmoid(3 (z + 2 (2t - 1)))).
/// With noiseless truth the potential outcomes are the success probabilities.
std::vector<SimulationRealization> generate_synthetic(const SyntheticConfig& config);
SimulationRealization generate_synthetic_sim(const SyntheticConfig& config, std::size_t sim_index);

/// Expected outcome probability under treatment arm `t` given the latent z.
double synthetic_outcome_probability(int z, int t) noexcept;

inline constexpr std::size_t kIhdpCovariates = 25;

struct IhdpLoadOptions {
    std::optional<std::size_t> limit;
    /// When set, realizations must have exactly this many units / treated units.
    std::optional<std::size_t> expect_units;
    std::optional<std::size_t> expect_treated;
};

/// Rows `treatment,y_factual,y_cfactual,mu0,mu1,x1..x25`, optional header.
/// Ground truth uses mu0/mu1 when present, otherwise the factual and
/// counterfactual outcomes.
SimulationRealization load_ihdp_file(const std::string& path, long long sim_id,
                                     const IhdpLoadOptions& options = {});

/// A single file, or every *.csv in a directory in name order.
std::vector<SimulationRealization> load_ihdp(const std::string& path, const IhdpLoadOptions& options = {});

}  // namespace causalbench
