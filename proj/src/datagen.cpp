#include "causalbench/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "causalbench/csv.hpp"
#include "causalbench/errors.hpp"

namespace causalbench {

double SplitMix64::normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    SplitMix64 outer(seed);
    SplitMix64 middle(outer.next() ^ (a * 0xD1B54A32D192ED03ULL));
    SplitMix64 inner(middle.next() ^ (b * 0x8CB92BA72F3D8DD7ULL));
    return SplitMix64(inner.next());
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

double synthetic_outcome_probability(int z, int t) noexcept {
    return sigmoid(3.0 * (static_cast<double>(z) + 2.0 * (2.0 * t - 1.0)));
}

void SyntheticConfig::validate() const {
    if (n_units < 2) throw ValidationError("synthetic n_units must be >= 2");
    if (n_sims < 1) throw ValidationError("synthetic n_sims must be >= 1");
    if (!(sigma_z0 > 0.0) || !std::isfinite(sigma_z0)) throw ValidationError("sigma_z0 must be > 0");
    if (!(sigma_z1 > 0.0) || !std::isfinite(sigma_z1)) throw ValidationError("sigma_z1 must be > 0");
    if (proxy_dim < 1) throw ValidationError("proxy_dim must be >= 1");
}

std::size_t SimulationRealization::n_treated() const noexcept {
    return static_cast<std::size_t>(std::count(t.begin(), t.end(), 1));
}

PotentialOutcomeTable SimulationRealization::to_outcome_table() const {
    PotentialOutcomeTable table;
    table.sim_id = sim_id;
    table.y0_true = y0_true;
    table.y1_true = y1_true;
    table.t = t;
    table.y_factual = y_factual;
    table.covariates = covariates;
    return table;
}

SimulationRealization SimulationRealization::from_outcome_table(const PotentialOutcomeTable& table,
                                                                DataSource source) {
    table.validate();
    if (table.t.empty()) throw SchemaError("outcome table has no treatment column");
    if (table.y_factual.empty()) throw SchemaError("outcome table has no y_factual column");
    SimulationRealization r;
    r.sim_id = table.sim_id;
    r.covariates = table.covariates;
    r.t = table.t;
    r.y_factual = table.y_factual;
    r.y0_true = table.y0_true;
    r.y1_true = table.y1_true;
    r.source = source;
    return r;
}

SimulationRealization generate_synthetic_sim(const SyntheticConfig& config, std::size_t sim_index) {
    config.validate();
    const std::size_t n = config.n_units;
    SimulationRealization r;
    r.sim_id = static_cast<long long>(sim_index) + 1;
    r.source = DataSource::Synthetic;
    r.covariates.reserve(n);
    r.t.reserve(n);
    r.z.reserve(n);
    r.y_factual.reserve(n);
    r.y0_true.reserve(n);
    r.y1_true.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        auto rng = SplitMix64::stream(config.seed, sim_index, i);
        // draw order is part of the reproducibility contract
        const int z = rng.bernoulli(0.5) ? 1 : 0;
        const int t = rng.bernoulli(0.75 * z + 0.25 * (1 - z)) ? 1 : 0;
        const double sd = z == 1 ? config.sigma_z1 : config.sigma_z0;
        std::vector<double> x(config.proxy_dim);
        for (auto& xj : x) xj = static_cast<double>(z) + sd * rng.normal();
        const double q0 = synthetic_outcome_probability(z, 0);
        const double q1 = synthetic_outcome_probability(z, 1);
        const double y0_draw = rng.bernoulli(q0) ? 1.0 : 0.0;
        const double y1_draw = rng.bernoulli(q1) ? 1.0 : 0.0;

        r.z.push_back(z);
        r.t.push_back(t);
        r.covariates.push_back(std::move(x));
        r.y_factual.push_back(t == 1 ? y1_draw : y0_draw);
        if (config.noiseless_truth) {
            r.y0_true.push_back(q0);
            r.y1_true.push_back(q1);
        } else {
            r.y0_true.push_back(y0_draw);
            r.y1_true.push_back(y1_draw);
        }
    }
    return r;
}

std::vector<SimulationRealization> generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    std::vector<SimulationRealization> out;
    out.reserve(config.n_sims);
    for (std::size_t s = 0; s < config.n_sims; ++s) out.push_back(generate_synthetic_sim(config, s));
    return out;
}

// ---- IHDP ----------------------------------------------------------------

SimulationRealization load_ihdp_file(const std::string& path, long long sim_id, const IhdpLoadOptions& options) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw ParseError(path, 1, "empty IHDP file");

    // column positions; headerless files follow the NPCI layout
    std::size_t width = 5 + kIhdpCovariates;
    std::size_t c_t = 0, c_yf = 1;
    std::optional<std::size_t> c_ycf = 2, c_mu0 = 3, c_mu1 = 4;
    std::vector<std::size_t> c_x;
    std::size_t first_data = 0;

    const bool has_header = !rows.front().fields.empty() && !csv::looks_numeric(rows.front().fields.front());
    if (has_header) {
        const auto& header = rows.front().fields;
        width = header.size();
        std::map<std::string, std::size_t, std::less<>> col;
        for (std::size_t i = 0; i < header.size(); ++i) col.emplace(header[i], i);
        const auto find = [&](std::string_view name) -> std::optional<std::size_t> {
            const auto it = col.find(name);
            if (it == col.end()) return std::nullopt;
            return it->second;
        };
        const auto t = find("treatment");
        const auto yf = find("y_factual");
        if (!t || !yf) throw SchemaError(path + ": IHDP header needs 'treatment' and 'y_factual'");
        c_t = *t;
        c_yf = *yf;
        c_ycf = find("y_cfactual");
        c_mu0 = find("mu0");
        c_mu1 = find("mu1");
        if (c_mu0.has_value() != c_mu1.has_value())
            throw SchemaError(path + ": IHDP header has only one of mu0/mu1");
        for (std::size_t j = 1;; ++j) {
            const auto x = find("x" + std::to_string(j));
            if (!x) break;
            c_x.push_back(*x);
        }
        if (!c_ycf && !c_mu0)
            throw SchemaError(path + ": missing counterfactual columns (need y_cfactual or mu0/mu1)");
        first_data = 1;
    } else {
        const std::size_t found = rows.front().fields.size();
        if (found < 5) {
            throw SchemaError(path + ": missing counterfactual columns, expected " + std::to_string(width) +
                              " columns, found " + std::to_string(found));
        }
        width = found;
        for (std::size_t j = 5; j < found; ++j) c_x.push_back(j);
    }
    if (c_x.size() != kIhdpCovariates) {
        throw SchemaError(path + ": expected " + std::to_string(kIhdpCovariates) + " covariates, found " +
                          std::to_string(c_x.size()));
    }

    SimulationRealization r;
    r.sim_id = sim_id;
    r.source = DataSource::Ihdp;
    for (std::size_t i = first_data; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != width) {
            throw ParseError(path, row.line,
                             "expected " + std::to_string(width) + " fields, got " + std::to_string(row.fields.size()));
        }
        const auto num = [&](std::size_t c, std::string_view name) {
            return csv::parse_double(row.fields[c], path, row.line, name);
        };
        const double tv = num(c_t, "treatment");
        if (tv != 0.0 && tv != 1.0) throw ParseError(path, row.line, "treatment must be 0 or 1");
        const int t = tv == 1.0 ? 1 : 0;
        const double yf = num(c_yf, "y_factual");
        std::vector<double> x;
        x.reserve(c_x.size());
        for (std::size_t j = 0; j < c_x.size(); ++j) x.push_back(num(c_x[j], "x" + std::to_string(j + 1)));

        double y0 = 0.0, y1 = 0.0;
        if (c_mu0) {
            y0 = num(*c_mu0, "mu0");
            y1 = num(*c_mu1, "mu1");
            if (c_ycf) num(*c_ycf, "y_cfactual");
        } else {
            const double ycf = num(*c_ycf, "y_cfactual");
            y0 = t == 1 ? ycf : yf;
            y1 = t == 1 ? yf : ycf;
        }
        r.t.push_back(t);
        r.y_factual.push_back(yf);
        r.y0_true.push_back(y0);
        r.y1_true.push_back(y1);
        r.covariates.push_back(std::move(x));
    }

    const std::size_t n = r.n_units();
    const std::size_t treated = r.n_treated();
    if (n == 0) throw ParseError(path, rows.back().line, "IHDP file has no data rows");
    if (treated == 0 || treated == n)
        throw ValidationError(path + ": realization needs both treated and control units");
    if (options.expect_units && n != *options.expect_units) {
        throw ValidationError(path + ": expected " + std::to_string(*options.expect_units) + " units, found " +
                              std::to_string(n));
    }
    if (options.expect_treated && treated != *options.expect_treated) {
        throw ValidationError(path + ": expected " + std::to_string(*options.expect_treated) +
                              " treated units, found " + std::to_string(treated));
    }
    return r;
}

std::vector<SimulationRealization> load_ihdp(const std::string& path, const IhdpLoadOptions& options) {
    auto files = csv::list_csv_files(path);
    if (options.limit && *options.limit < files.size()) files.resize(*options.limit);

    std::vector<SimulationRealization> out;
    out.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        out.push_back(load_ihdp_file(files[i].string(), static_cast<long long>(i) + 1, options));
    }
    return out;
}

}  // namespace causalbench
