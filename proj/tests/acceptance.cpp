// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "causalbench/baselines.hpp"
#include "causalbench/config.hpp"
#include "causalbench/datagen.hpp"
#include "causalbench/metrics.hpp"
#include "causalbench/posthoc.hpp"
#include "causalbench/profiles.hpp"
#include "causalbench/ranktest.hpp"
#include "causalbench/report.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace causalbench;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<PairHypothesis> with_p(int k, const std::vector<double>& p) {
    std::vector<std::string> models;
    for (int i = 0; i < k; ++i) models.push_back("M" + std::to_string(i + 1));
    std::vector<ExternalPValue> ext;
    std::size_t h = 0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) ext.push_back({models[a], models[b], p[h++]});
    return hypotheses_from_p_values(models, ext);
}

// 10,000 random p-vectors shared by the two post-hoc criteria.
struct PVector {
    int k;
    std::vector<double> p;
};

const std::vector<PVector>& random_p_vectors() {
    static const std::vector<PVector> vectors = [] {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<PVector> out;
        for (int i = 0; i < 10000; ++i) {
            const int k = 2 + static_cast<int>(rng() % 5);
            std::vector<double> p(static_cast<std::size_t>(k * (k - 1) / 2));
            // mix of tiny, moderate and tied p-values
            for (auto& v : p) {
                const double r = u(rng);
                v = r < 0.1 ? 0.0 : (r < 0.2 ? 1.0 : std::pow(u(rng), 4.0));
            }
            out.push_back({k, std::move(p)});
        }
        return out;
    }();
    return vectors;
}

Outcome metrics_oracle() {
    std::mt19937_64 rng(1);
    const auto start = Clock::now();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto t = causalbench::testing::random_table(rng, 1 + rng() % 50, 1);
        const auto& m = t.models[0];
        const double a = ate_error(t, "m0"), p = pehe(t, "m0");
        const double oa = oracle::ate_error(t.y0_true, t.y1_true, m.y0_hat, m.y1_hat);
        const double op = oracle::pehe(t.y0_true, t.y1_true, m.y0_hat, m.y1_hat);
        worst = std::max(worst, std::abs(a - oa) / std::max(std::abs(oa), 1e-300));
        worst = std::max(worst, std::abs(p - op) / std::max(std::abs(op), 1e-300));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-12 && secs < 5.0, "max rel err " + fmt("%.3g", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome jensen_property() {
    std::mt19937_64 rng(2);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto t = causalbench::testing::random_table(rng, 1 + rng() % 50, 1);
        const double a = ate_error(t, "m0");
        if (a * a > pehe(t, "m0") + 1e-12) ++violations;
    }
    return {violations == 0, std::to_string(violations) + " violations in 1000 tables"};
}

Outcome profile_properties() {
    std::mt19937_64 rng(3);
    int failures = 0;
    for (int i = 0; i < 500; ++i) {
        const std::size_t n = 1 + rng() % 100;
        const std::size_t k = 2 + rng() % 7;
        const auto m = causalbench::testing::random_error_matrix(rng, n, k);
        const auto curves = profile_curves(performance_ratios(m));
        std::size_t count_at_one = 0;
        double sum_at_one = 0.0;
        for (const auto& c : curves) {
            for (std::size_t b = 1; b < c.breakpoints.size(); ++b)
                if (!(c.breakpoints[b - 1].ratio < c.breakpoints[b].ratio) ||
                    !(c.breakpoints[b - 1].fraction <= c.breakpoints[b].fraction))
                    ++failures;
            const double v = profile_value(c, 1.0);
            sum_at_one += v;
            count_at_one += static_cast<std::size_t>(std::llround(v * static_cast<double>(n)));
        }
        if (count_at_one != n || std::abs(sum_at_one - 1.0) > 1e-12) ++failures;

        for (const double c : {1e-6, 1.0, 1e6}) {
            auto scaled = m.values();
            for (auto& v : scaled) v *= c;
            const auto sc = profile_curves(performance_ratios(ErrorMatrix(m.metric(), m.models(), m.sims(), scaled)));
            for (std::size_t j = 0; j < curves.size(); ++j) {
                if (sc[j].breakpoints.size() != curves[j].breakpoints.size()) {
                    ++failures;
                    continue;
                }
                for (std::size_t b = 0; b < sc[j].breakpoints.size(); ++b) {
                    const auto& x = curves[j].breakpoints[b];
                    const auto& y = sc[j].breakpoints[b];
                    if (std::abs(x.ratio - y.ratio) > 1e-12 * x.ratio || x.fraction != y.fraction) ++failures;
                }
            }
        }
    }
    return {failures == 0, std::to_string(failures) + " failures over 500 matrices x 3 scalings"};
}

Outcome friedman_exactness() {
    const ErrorMatrix m(Metric::Pehe, {"A", "B", "C"}, {1, 2, 3}, {0.1, 0.2, 0.3, 0.3, 0.2, 0.1, 0.1, 0.1, 0.2});
    const auto r = friedman_statistic(friedman_ranks(m));
    const double err = std::max({std::abs(r.avg_ranks[0] - 11.0 / 6.0), std::abs(r.avg_ranks[1] - 11.0 / 6.0),
                                 std::abs(r.avg_ranks[2] - 7.0 / 3.0), std::abs(*r.statistic - 0.5)});
    bool ties_ok = true;
    for (std::size_t k = 2; k <= 6; ++k) {
        std::vector<std::string> models;
        for (std::size_t j = 0; j < k; ++j) models.push_back("m" + std::to_string(j));
        const ErrorMatrix tie(Metric::AteAbs, models, {1, 2, 3}, std::vector<double>(3 * k, 0.7));
        const auto t = friedman_statistic(friedman_ranks(tie));
        ties_ok = ties_ok && *t.statistic == 0.0 && *t.p_value == 1.0;
    }
    return {err <= 1e-12 && ties_ok, "max err " + fmt("%.3g", err) + (ties_ok ? ", full ties exact" : ", full tie mismatch")};
}

Outcome chi_square_accuracy() {
    double worst = 0.0;
    for (int dof = 1; dof <= 20; ++dof)
        for (int i = 0; i <= 1000; ++i) {
            const double x = 0.1 * i;
            worst = std::max(worst, std::abs(chi_square_sf(x, dof) - oracle::chi_square_sf(x, dof)));
        }
    const double crit = chi_square_sf(11.0705, 5);
    return {worst <= 1e-10 && std::abs(crit - 0.05) <= 1e-4,
            "max abs err " + fmt("%.3g", worst) + ", SF(11.0705; 5) = " + fmt("%.6f", crit)};
}

Outcome exhaustive_counts() {
    const std::vector<std::size_t> expected{1, 4, 14, 51, 202};
    bool ok = true;
    std::string counts;
    double k6_secs = 0.0;
    for (int k = 2; k <= 6; ++k) {
        const auto start = Clock::now();
        const auto fam = enumerate_exhaustive_sets(k);
        if (k == 6) k6_secs = seconds_since(start);
        std::vector<std::uint64_t> got;
        for (const auto& s : fam.sets)
            if (s.mask != 0) got.push_back(s.mask);
        auto want = oracle::exhaustive_masks(k);
        want.erase(std::remove(want.begin(), want.end(), std::uint64_t{0}), want.end());
        std::sort(got.begin(), got.end());
        std::sort(want.begin(), want.end());
        ok = ok && got == want && got.size() == expected[k - 2];
        counts += (counts.empty() ? "" : ",") + std::to_string(got.size());
    }
    return {ok && k6_secs < 1.0, "nonempty counts " + counts + ", k=6 in " + fmt("%.4f", k6_secs) + " s"};
}

Outcome acceptance_apv_consistency() {
    long discrepancies = 0;
    std::vector<ExhaustiveSetFamily> families;
    for (int k = 2; k <= 6; ++k) families.push_back(enumerate_exhaustive_sets(k));
    for (const auto& v : random_p_vectors()) {
        const auto hyps = with_p(v.k, v.p);
        const auto& fam = families[v.k - 2];
        for (const double alpha : {0.01, 0.05, 0.1}) {
            // apv is computed independently of the acceptance set here
            const auto report = bergmann_hommel_apv(hyps, fam, 0.5);
            const auto a = acceptance_set(hyps, fam, alpha);
            for (std::size_t h = 0; h < v.p.size(); ++h) {
                const bool rejected = report.hypotheses[h].apv <= alpha;
                const bool in_a = std::binary_search(a.begin(), a.end(), static_cast<int>(h) + 1);
                if (rejected == in_a) ++discrepancies;
            }
        }
    }
    return {discrepancies == 0, std::to_string(discrepancies) + " discrepancies over 10000 p-vectors x 3 alphas"};
}

Outcome bh_dominance() {
    long violations = 0;
    std::vector<ExhaustiveSetFamily> families;
    for (int k = 2; k <= 6; ++k) families.push_back(enumerate_exhaustive_sets(k));
    for (const auto& v : random_p_vectors()) {
        const auto report = bergmann_hommel_apv(with_p(v.k, v.p), families[v.k - 2], 0.05);
        const auto bonf = oracle::bonferroni_apv(v.p);
        for (std::size_t h = 0; h < v.p.size(); ++h)
            if (report.hypotheses[h].apv > bonf[h]) ++violations;
    }
    return {violations == 0, std::to_string(violations) + " hypotheses with BH APV above Bonferroni"};
}

Outcome synthetic_statistics() {
    SyntheticConfig cfg;
    cfg.n_units = 100000;
    cfg.n_sims = 1;
    cfg.seed = 20240501;
    const auto r = generate_synthetic_sim(cfg, 0);
    std::size_t z1 = 0, treated_z1 = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < r.n_units(); ++i) {
        if (r.z[i] == 1) {
            ++z1;
            treated_z1 += static_cast<std::size_t>(r.t[i]);
        }
        const double ite = r.y1_true[i] - r.y0_true[i];
        sum += ite;
        sum_sq += ite * ite;
    }
    const double n = static_cast<double>(r.n_units());
    const double p1 = static_cast<double>(treated_z1) / static_cast<double>(z1);
    const double se_p = std::sqrt(0.75 * 0.25 / static_cast<double>(z1));
    const double ate = sum / n;
    const double se_ate = std::sqrt(std::max(sum_sq / n - ate * ate, 0.0) / n);
    const bool ok = std::abs(p1 - 0.75) <= 3 * se_p && std::abs(ate - 0.973752) <= 3 * se_ate;
    return {ok, "Pr(t=1|z=1) = " + fmt("%.5f", p1) + " (" + fmt("%.2f", std::abs(p1 - 0.75) / se_p) +
                    " SE), ATE = " + fmt("%.6f", ate) + " (" + fmt("%.2f", std::abs(ate - 0.973752) / se_ate) + " SE)"};
}

BenchmarkConfig end_to_end_config(const std::string& out) {
    BenchmarkConfig cfg;
    cfg.source.kind = SourceKind::Synthetic;
    cfg.source.synthetic.n_units = 500;
    cfg.source.synthetic.n_sims = 200;
    cfg.source.synthetic.seed = 0;
    cfg.estimators = BenchmarkConfig::default_estimators();
    cfg.output_dir = out;
    return cfg;
}

Outcome end_to_end() {
    causalbench::testing::TempDir dir("acceptance_e2e");
    const auto start = Clock::now();
    const auto result = run_benchmark(end_to_end_config(dir.file("report")));
    const double secs = seconds_since(start);
    for (const auto& a : result.analyses) {
        if (a.errors.metric() != Metric::Pehe) continue;
        std::size_t rejections = 0;
        for (const auto& h : a.posthoc.hypotheses) rejections += h.decision == Decision::Rejected;
        const double p = a.ranks.p_value.value_or(1.0);
        return {p < 0.05 && rejections >= 1 && secs < 60.0,
                "PEHE Friedman p = " + format_p_display(p) + ", " + std::to_string(rejections) + " rejections, " +
                    fmt("%.2f", secs) + " s"};
    }
    return {false, "no PEHE analysis produced"};
}

Outcome determinism() {
    causalbench::testing::TempDir dir("acceptance_det");
    auto small = [&](const std::string& out) {
        auto cfg = end_to_end_config(dir.file(out));
        cfg.source.synthetic.n_sims = 40;
        cfg.source.synthetic.seed = 99;
        return cfg;
    };
    run_benchmark(small("a"));
    run_benchmark(small("b"));
    std::size_t compared = 0, differing = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir.file("a"))) {
        if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
        const auto other = fs::path(dir.file("b")) / fs::relative(entry.path(), dir.file("a"));
        ++compared;
        if (causalbench::testing::read_file(entry.path().string()) != causalbench::testing::read_file(other.string()))
            ++differing;
    }
    return {compared > 0 && differing == 0,
            std::to_string(compared) + " CSV files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metrics-oracle", metrics_oracle},
        {"jensen-property", jensen_property},
        {"profile-properties", profile_properties},
        {"friedman-exactness", friedman_exactness},
        {"chi-square-sf-accuracy", chi_square_accuracy},
        {"exhaustive-set-counts", exhaustive_counts},
        {"acceptance-set-apv-consistency", acceptance_apv_consistency},
        {"bh-dominates-bonferroni", bh_dominance},
        {"synthetic-data-statistics", synthetic_statistics},
        {"end-to-end-discrimination", end_to_end},
        {"determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
