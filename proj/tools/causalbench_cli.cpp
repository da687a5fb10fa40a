// causalbench: compare causal-effect estimators with performance profiles,
// the Friedman test and Bergmann-Hommel post-hoc analysis.
//
// Exit codes: 0 success, 2 validation failure, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "causalbench/config.hpp"
#include "causalbench/errors.hpp"
#include "causalbench/report.hpp"

namespace cb = causalbench;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> metrics;
    std::optional<double> alpha;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scale;
    bool root_pehe = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool require_config) {
    auto* opt = cmd->add_option("--config", f.config_path, "JSON benchmark configuration");
    if (require_config) opt->required();
    cmd->add_option("--metric", f.metrics, "ATE_ABS and/or PEHE (repeatable)");
    cmd->add_option("--alpha", f.alpha, "significance level in (0,1)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--seed", f.seed, "seed for synthetic data");
    cmd->add_option("--scale", f.scale, "LINEAR or LOG10 profile axis");
}

cb::BenchmarkConfig resolve_config(const CommonFlags& f) {
    auto cfg = cb::load_config(f.config_path);
    cb::apply_env_overrides(cfg);
    if (!f.metrics.empty()) {
        cfg.metrics.clear();
        for (const auto& m : f.metrics) {
            try {
                cfg.metrics.push_back(cb::parse_metric(m));
            } catch (const cb::LookupError& e) {
                throw cb::ValidationError(e.what());
            }
        }
    }
    if (f.alpha) cfg.alpha = *f.alpha;
    if (f.out) cfg.output_dir = *f.out;
    if (f.seed) cfg.source.synthetic.seed = *f.seed;
    if (f.scale) {
        try {
            cfg.scale = cb::parse_scale(*f.scale);
        } catch (const cb::LookupError& e) {
            throw cb::ValidationError(e.what());
        }
    }
    if (f.root_pehe) cfg.root_pehe = true;
    return cfg;
}

void print_diagnostics(const std::vector<cb::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << "invalid: " << d.source << ": " << d.message << '\n';
}

cb::Metric single_metric(const CommonFlags& f) {
    if (f.metrics.size() > 1) throw cb::ValidationError("give exactly one --metric for precomputed errors");
    if (f.metrics.empty()) return cb::Metric::AteAbs;
    try {
        return cb::parse_metric(f.metrics.front());
    } catch (const cb::LookupError& e) {
        throw cb::ValidationError(e.what());
    }
}

// Runs `fn`, mapping library errors onto the documented exit codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const cb::ValidationError& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cb::SchemaError& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cb::ParseError& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return kExitValidation;
    } catch (const cb::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"causalbench: statistical comparison of causal-effect estimators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cb::kVersion));

    CommonFlags run_flags, validate_flags, gen_flags, profile_flags, posthoc_flags;

    auto* run = app.add_subcommand("run", "run the full benchmark and write the report bundle");
    add_common(run, run_flags, true);
    run->add_flag("--root-pehe", run_flags.root_pehe, "add a display-only sqrt(PEHE) column to summary.md");

    auto* validate = app.add_subcommand("validate", "check config and inputs without running");
    add_common(validate, validate_flags, true);

    auto* gen = app.add_subcommand("gen-synthetic", "write synthetic realizations as potential-outcome CSVs");
    add_common(gen, gen_flags, false);
    std::optional<std::size_t> gen_units, gen_sims;
    bool gen_predict = false;
    gen->add_option("--n-units", gen_units, "units per simulation");
    gen->add_option("--n-sims", gen_sims, "number of simulations");
    gen->add_flag("--predict", gen_predict, "include the configured estimators' predictions");

    auto* profile = app.add_subcommand("profile-only", "performance profiles from a precomputed error CSV");
    add_common(profile, profile_flags, false);
    std::string profile_errors;
    profile->add_option("--errors", profile_errors, "CSV 'sim,<model1>,<model2>,...'")->required();

    auto* posthoc = app.add_subcommand("posthoc-only", "Friedman and Bergmann-Hommel from precomputed inputs");
    add_common(posthoc, posthoc_flags, false);
    std::string posthoc_errors, posthoc_pvalues;
    auto* err_opt = posthoc->add_option("--errors", posthoc_errors, "CSV 'sim,<model1>,<model2>,...'");
    auto* pv_opt = posthoc->add_option("--pvalues", posthoc_pvalues, "CSV 'model_a,model_b,p' of raw p-values");
    err_opt->excludes(pv_opt);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return guarded([&] {
            const auto cfg = resolve_config(run_flags);
            const auto diags = cb::validate_inputs(cfg);
            if (!diags.empty()) {
                print_diagnostics(diags);
                return kExitValidation;
            }
            const auto result = cb::run_benchmark(cfg);
            for (const auto& a : result.analyses) {
                std::cout << cb::to_string(a.errors.metric()) << ": Friedman F_f = " << a.ranks.statistic.value_or(0.0)
                          << ", p = " << cb::format_p_display(a.ranks.p_value.value_or(1.0)) << '\n';
            }
            std::cout << "wrote " << result.files.size() << " files to " << result.output_dir.string() << '\n';
            return 0;
        });
    }
    if (validate->parsed()) {
        return guarded([&] {
            const auto cfg = resolve_config(validate_flags);
            const auto diags = cb::validate_inputs(cfg);
            if (!diags.empty()) {
                print_diagnostics(diags);
                return kExitValidation;
            }
            std::cout << "ok\n";
            return 0;
        });
    }
    if (gen->parsed()) {
        return guarded([&] {
            cb::BenchmarkConfig cfg;
            if (!gen_flags.config_path.empty()) cfg = resolve_config(gen_flags);
            else cb::apply_env_overrides(cfg);
            if (cfg.source.kind != cb::SourceKind::Synthetic)
                throw cb::ValidationError("gen-synthetic needs a synthetic source");
            auto synth = cfg.source.synthetic;
            if (gen_flags.seed) synth.seed = *gen_flags.seed;
            if (gen_units) synth.n_units = *gen_units;
            if (gen_sims) synth.n_sims = *gen_sims;
            const std::string out = gen_flags.out.value_or(cfg.output_dir);
            const std::vector<cb::EstimatorSpec> none;
            const auto files =
                cb::export_synthetic(synth, gen_predict ? std::span<const cb::EstimatorSpec>(cfg.estimators) : none, out);
            std::cout << "wrote " << files.size() << " realizations to " << out << '\n';
            return 0;
        });
    }
    if (profile->parsed()) {
        return guarded([&] {
            const auto errors = cb::read_error_csv(profile_errors, single_metric(profile_flags));
            const auto scale = cb::parse_scale(profile_flags.scale.value_or("LOG10"));
            const std::string out = profile_flags.out.value_or("profiles");
            cb::run_profile_only(errors, scale, out);
            std::cout << "wrote profiles.csv and profiles.svg to " << out << '\n';
            return 0;
        });
    }
    if (posthoc->parsed()) {
        return guarded([&] {
            const double alpha = posthoc_flags.alpha.value_or(0.05);
            if (!(alpha > 0.0 && alpha < 1.0)) throw cb::ValidationError("alpha must lie in (0, 1)");
            const std::string out = posthoc_flags.out.value_or("posthoc");
            if (!posthoc_pvalues.empty()) {
                const auto pv = cb::read_p_value_csv(posthoc_pvalues);
                cb::run_posthoc_from_p_values(pv, alpha, out);
            } else if (!posthoc_errors.empty()) {
                const auto errors = cb::read_error_csv(posthoc_errors, single_metric(posthoc_flags));
                cb::run_posthoc_only(errors, alpha, out);
            } else {
                throw cb::ValidationError("posthoc-only needs --errors or --pvalues");
            }
            std::cout << "wrote post-hoc tables to " << out << '\n';
            return 0;
        });
    }
    return 0;
}
