#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "causalbench/csv.hpp"
#include "causalbench/datagen.hpp"
#include "causalbench/errors.hpp"
#include "test_support.hpp"

using namespace causalbench;
using causalbench::testing::TempDir;

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// NPCI-style rows: treatment,y_factual,y_cfactual,mu0,mu1,x1..x<d>.
std::string ihdp_body(std::size_t n, std::size_t treated, std::size_t d, bool header, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::ostringstream out;
    out.precision(17);
    if (header) {
        out << "treatment,y_factual,y_cfactual,mu0,mu1";
        for (std::size_t j = 1; j <= d; ++j) out << ",x" << j;
        out << '\n';
    }
    for (std::size_t i = 0; i < n; ++i) {
        const int t = i < treated ? 1 : 0;
        const double mu0 = normal(rng), mu1 = mu0 + 4.0;
        const double y1 = mu1 + normal(rng), y0 = mu0 + normal(rng);
        out << t << ',' << (t ? y1 : y0) << ',' << (t ? y0 : y1) << ',' << mu0 << ',' << mu1;
        for (std::size_t j = 0; j < d; ++j) out << ',' << normal(rng);
        out << '\n';
    }
    return out.str();
}

}  // namespace

TEST(SplitMix64, ReferenceSequence) {
    // first outputs for state 1234567 from the published reference implementation
    SplitMix64 g(1234567);
    EXPECT_EQ(g.next(), 6457827717110365317ULL);
    EXPECT_EQ(g.next(), 3203168211198807973ULL);
    EXPECT_EQ(g.next(), 9817491932198370423ULL);
}

TEST(SplitMix64, UniformAndNormalMoments) {
    SplitMix64 g(99);
    double su = 0, sn = 0, sn2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = g.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 3 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sn / n, 0.0, 3 / std::sqrt(n));
    EXPECT_NEAR(sn2 / n, 1.0, 3 * std::sqrt(2.0 / n));
}

TEST(Synthetic, OutcomeProbabilitiesAndIte) {
    EXPECT_DOUBLE_EQ(synthetic_outcome_probability(0, 1), logistic(6));
    EXPECT_DOUBLE_EQ(synthetic_outcome_probability(1, 0), logistic(-3));
    EXPECT_NEAR(synthetic_outcome_probability(0, 1) - synthetic_outcome_probability(0, 0), 0.995054, 1e-6);
    EXPECT_NEAR(synthetic_outcome_probability(1, 1) - synthetic_outcome_probability(1, 0), 0.952451, 1e-6);
}

TEST(Synthetic, ShapesTruthAndDeterminism) {
    SyntheticConfig cfg;
    cfg.n_units = 300;
    cfg.n_sims = 3;
    cfg.seed = 17;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t s = 0; s < a.size(); ++s) {
        EXPECT_EQ(a[s].sim_id, static_cast<long long>(s) + 1);
        EXPECT_EQ(a[s].n_units(), 300u);
        EXPECT_EQ(a[s].n_covariates(), 1u);
        EXPECT_EQ(a[s].covariates, b[s].covariates);
        EXPECT_EQ(a[s].t, b[s].t);
        EXPECT_EQ(a[s].y_factual, b[s].y_factual);
        for (std::size_t i = 0; i < 300; ++i) {
            const int z = a[s].z[i];
            EXPECT_EQ(a[s].y0_true[i], synthetic_outcome_probability(z, 0));
            EXPECT_EQ(a[s].y1_true[i], synthetic_outcome_probability(z, 1));
            EXPECT_TRUE(a[s].y_factual[i] == 0.0 || a[s].y_factual[i] == 1.0);
        }
    }
    // a single simulation does not depend on how many others are generated
    const auto alone = generate_synthetic_sim(cfg, 2);
    EXPECT_EQ(alone.covariates, a[2].covariates);
    EXPECT_EQ(alone.t, a[2].t);

    cfg.seed = 18;
    EXPECT_NE(generate_synthetic(cfg)[0].covariates, a[0].covariates);
}

TEST(Synthetic, LargeSampleStatistics) {
    SyntheticConfig cfg;
    cfg.n_units = 100000;
    cfg.n_sims = 1;
    cfg.seed = 5;
    const auto r = generate_synthetic_sim(cfg, 0);
    std::size_t z1 = 0, t_given_z1 = 0, z0 = 0, t_given_z0 = 0;
    double x_z1 = 0, x2_z1 = 0, ate = 0;
    for (std::size_t i = 0; i < r.n_units(); ++i) {
        ate += r.y1_true[i] - r.y0_true[i];
        if (r.z[i] == 1) {
            ++z1;
            t_given_z1 += r.t[i];
            x_z1 += r.covariates[i][0];
            x2_z1 += r.covariates[i][0] * r.covariates[i][0];
        } else {
            ++z0;
            t_given_z0 += r.t[i];
        }
    }
    const double p1 = static_cast<double>(t_given_z1) / z1;
    const double p0 = static_cast<double>(t_given_z0) / z0;
    EXPECT_NEAR(p1, 0.75, 3 * std::sqrt(0.75 * 0.25 / z1));
    EXPECT_NEAR(p0, 0.25, 3 * std::sqrt(0.75 * 0.25 / z0));
    const double mean_x = x_z1 / z1;
    EXPECT_NEAR(mean_x, 1.0, 3 * 5.0 / std::sqrt(z1));
    EXPECT_NEAR(x2_z1 / z1 - mean_x * mean_x, 25.0, 3 * 25.0 * std::sqrt(2.0 / z1));

    const double ite0 = logistic(6) - logistic(-6), ite1 = logistic(9) - logistic(-3);
    const double half_gap = (ite0 - ite1) / 2;
    EXPECT_NEAR(ate / r.n_units(), (ite0 + ite1) / 2, 3 * half_gap / std::sqrt(r.n_units()));
}

TEST(Synthetic, ConfigValidation) {
    SyntheticConfig cfg;
    cfg.n_units = 1;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = SyntheticConfig{};
    cfg.sigma_z0 = -1;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = SyntheticConfig{};
    cfg.n_sims = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Ihdp, LoadsNpciRealization) {
    TempDir dir("ihdp");
    causalbench::testing::write_file(dir.file("ihdp_1.csv"), ihdp_body(747, 139, 25, false, 1));
    IhdpLoadOptions opts;
    opts.expect_units = 747;
    opts.expect_treated = 139;
    const auto r = load_ihdp_file(dir.file("ihdp_1.csv"), 1, opts);
    EXPECT_EQ(r.n_units(), 747u);
    EXPECT_EQ(r.n_treated(), 139u);
    EXPECT_EQ(r.n_covariates(), 25u);
    EXPECT_EQ(r.source, DataSource::Ihdp);
    for (std::size_t i = 0; i < r.n_units(); ++i) EXPECT_NEAR(r.y1_true[i] - r.y0_true[i], 4.0, 1e-12);

    opts.expect_treated = 140;
    EXPECT_THROW(load_ihdp_file(dir.file("ihdp_1.csv"), 1, opts), ValidationError);
}

TEST(Ihdp, HeaderAndDirectoryOrder) {
    TempDir dir("ihdp_dir");
    causalbench::testing::write_file(dir.file("ihdp_10.csv"), ihdp_body(30, 10, 25, true, 3));
    causalbench::testing::write_file(dir.file("ihdp_2.csv"), ihdp_body(30, 12, 25, false, 2));
    const auto all = load_ihdp(dir.path().string());
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0].n_treated(), 12u);
    EXPECT_EQ(all[1].n_treated(), 10u);
    IhdpLoadOptions opts;
    opts.limit = 1;
    EXPECT_EQ(load_ihdp(dir.path().string(), opts).size(), 1u);
}

TEST(Ihdp, TruncatedRowIsParseErrorWithLine) {
    TempDir dir("ihdp_trunc");
    auto body = ihdp_body(20, 5, 25, false, 4);
    body = body.substr(0, body.rfind(',', body.size() - 2)) + "\n";
    causalbench::testing::write_file(dir.file("bad.csv"), body);
    try {
        load_ihdp_file(dir.file("bad.csv"), 1);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(":20:"), std::string::npos) << e.what();
    }
}

TEST(Ihdp, WrongCovariateCountIsSchemaError) {
    TempDir dir("ihdp_schema");
    causalbench::testing::write_file(dir.file("x24.csv"), ihdp_body(20, 5, 24, false, 5));
    EXPECT_THROW(load_ihdp_file(dir.file("x24.csv"), 1), SchemaError);
    causalbench::testing::write_file(dir.file("h24.csv"), ihdp_body(20, 5, 24, true, 5));
    EXPECT_THROW(load_ihdp_file(dir.file("h24.csv"), 1), SchemaError);
}

TEST(Ihdp, SingleGroupIsRejected) {
    TempDir dir("ihdp_group");
    causalbench::testing::write_file(dir.file("all_control.csv"), ihdp_body(20, 0, 25, false, 6));
    EXPECT_THROW(load_ihdp_file(dir.file("all_control.csv"), 1), ValidationError);
}

TEST(Realization, OutcomeTableRoundTrip) {
    SyntheticConfig cfg;
    cfg.n_units = 40;
    cfg.n_sims = 1;
    const auto r = generate_synthetic_sim(cfg, 0);
    const auto back = SimulationRealization::from_outcome_table(r.to_outcome_table(), DataSource::Synthetic);
    EXPECT_EQ(back.t, r.t);
    EXPECT_EQ(back.covariates, r.covariates);
    EXPECT_EQ(back.y0_true, r.y0_true);
    EXPECT_EQ(back.y_factual, r.y_factual);
}
