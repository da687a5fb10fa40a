#include "causalbench/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "causalbench/baselines.hpp"
#include "causalbench/csv.hpp"
#include "causalbench/datagen.hpp"
#include "causalbench/errors.hpp"
#include "causalbench/numeric.hpp"

namespace causalbench {
namespace fs = std::filesystem;

namespace {

std::vector<std::size_t> identity_order(std::size_t k) {
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    return order;
}

// position[model] within the display order
std::vector<std::size_t> positions(std::span<const std::size_t> order, std::size_t k) {
    std::vector<std::size_t> pos(k);
    if (order.empty()) {
        for (std::size_t i = 0; i < k; ++i) pos[i] = i;
    } else {
        for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    }
    return pos;
}

std::size_t model_count(const PosthocReport& report) {
    std::size_t k = 0;
    for (const auto& h : report.hypotheses) k = std::max({k, h.hypothesis.a + 1, h.hypothesis.b + 1});
    return k;
}

struct OrientedPair {
    const AdjustedHypothesis* h;
    std::string first;
    std::string second;
    double z;
    std::size_t first_pos;
    std::size_t second_pos;
};

// Hypotheses named by display order and sorted ascending APV, ties by the
// display positions of the pair.
std::vector<OrientedPair> oriented_rows(const PosthocReport& report, std::span<const std::size_t> order) {
    const auto pos = positions(order, model_count(report));
    std::vector<OrientedPair> rows;
    rows.reserve(report.hypotheses.size());
    for (const auto& adj : report.hypotheses) {
        const auto& h = adj.hypothesis;
        const bool swap = pos[h.b] < pos[h.a];
        rows.push_back(OrientedPair{&adj, swap ? h.model_b : h.model_a, swap ? h.model_a : h.model_b,
                                    swap ? -h.z : h.z, std::min(pos[h.a], pos[h.b]),
                                    std::max(pos[h.a], pos[h.b])});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const OrientedPair& x, const OrientedPair& y) {
        if (x.h->apv != y.h->apv) return x.h->apv < y.h->apv;
        if (x.first_pos != y.first_pos) return x.first_pos < y.first_pos;
        return x.second_pos < y.second_pos;
    });
    return rows;
}

std::string_view decision_text(Decision d) { return d == Decision::Rejected ? "Rejected" : "Failed to be rejected"; }

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
    if (!out) throw IoError("write failure on " + path.string());
}

std::string metric_dir(Metric metric) { return metric == Metric::AteAbs ? "ate_abs" : "pehe"; }

std::string metric_label(Metric metric) { return metric == Metric::AteAbs ? "|e_ATE|" : "e_PEHE"; }

constexpr std::string_view kTieFooter =
    "_Models with equal average rank are listed in lexicographic order._\n";

}  // namespace

// ---- analysis ---------------------------------------------------------------

OutperformanceSummary build_outperformance(const RankSummary& ranks, const PosthocReport& posthoc) {
    const auto order = rank_order(ranks);
    const auto pos = positions(order, ranks.n_models());
    OutperformanceSummary out;
    for (std::size_t m : order) {
        OutperformanceSummary::Entry entry{ranks.models[m], ranks.avg_ranks[m], {}};
        std::vector<std::size_t> beaten;
        for (const auto& adj : posthoc.hypotheses) {
            if (adj.decision != Decision::Rejected) continue;
            const auto& h = adj.hypothesis;
            std::size_t other = 0;
            if (h.a == m) other = h.b;
            else if (h.b == m) other = h.a;
            else continue;
            if (ranks.avg_ranks[m] < ranks.avg_ranks[other]) beaten.push_back(other);
        }
        std::sort(beaten.begin(), beaten.end(), [&](std::size_t x, std::size_t y) { return pos[x] < pos[y]; });
        for (std::size_t b : beaten) entry.outperforms.push_back(ranks.models[b]);
        out.entries.push_back(std::move(entry));
    }
    return out;
}

MetricAnalysis analyze(const ErrorMatrix& errors, double alpha) {
    auto ranks = friedman_statistic(friedman_ranks(errors));
    const auto order = rank_order(ranks);
    auto ratios = performance_ratios(errors);
    std::vector<ProfileCurve> curves;
    curves.reserve(order.size());
    for (std::size_t m : order) curves.push_back(profile_curve(ratios, errors.models()[m]));

    const auto hypotheses = pairwise_p_values(ranks);
    const auto family = enumerate_exhaustive_sets(static_cast<int>(errors.n_models()));
    auto posthoc = bergmann_hommel_apv(hypotheses, family, alpha);
    auto outperformance = build_outperformance(ranks, posthoc);
    return MetricAnalysis{errors, std::move(ratios), std::move(curves), std::move(ranks), std::move(posthoc),
                          std::move(outperformance)};
}

// ---- rendering --------------------------------------------------------------

std::string format_apv(double apv) {
    if (apv < 5e-7) return "0";
    return format_fixed(apv, 6);
}

std::string format_p_display(double p) {
    if (p < 1e-16) return "<1e-16";
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.4g", p);
    return buf.data();
}

std::string friedman_markdown(const RankSummary& ranks, std::string_view title) {
    std::ostringstream out;
    out << "# " << title << "\n\n| Algorithm | Ranking |\n|---|---|\n";
    for (std::size_t m : rank_order(ranks)) {
        out << "| " << ranks.models[m] << " | " << format_fixed(ranks.avg_ranks[m], 4) << " |\n";
    }
    out << "\nFriedman statistic F_f = " << format_fixed(ranks.statistic.value_or(0.0), 4) << " with " << ranks.dof
        << " degrees of freedom, p-value = " << format_p_display(ranks.p_value.value_or(1.0)) << " (n = "
        << ranks.n_sims << " simulations).\n\n"
        << kTieFooter;
    return out.str();
}

std::string friedman_csv(const RankSummary& ranks) {
    std::ostringstream out;
    out << "model,avg_rank,statistic,dof,p_value,n_sims\n";
    for (std::size_t m : rank_order(ranks)) {
        out << ranks.models[m] << ',' << format_double(ranks.avg_ranks[m]) << ','
            << format_double(ranks.statistic.value_or(0.0)) << ',' << ranks.dof << ','
            << format_double(ranks.p_value.value_or(1.0)) << ',' << ranks.n_sims << '\n';
    }
    return out.str();
}

std::vector<FriedmanCsvRow> read_friedman_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows.front().fields != std::vector<std::string>{"model", "avg_rank", "statistic", "dof",
                                                                         "p_value", "n_sims"}) {
        throw SchemaError(path + ": not a Friedman table");
    }
    std::vector<FriedmanCsvRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.fields.size() != 6) throw ParseError(path, r.line, "expected 6 fields");
        out.push_back(FriedmanCsvRow{r.fields[0], csv::parse_double(r.fields[1], path, r.line, "avg_rank"),
                                     csv::parse_double(r.fields[2], path, r.line, "statistic"),
                                     static_cast<int>(csv::parse_int(r.fields[3], path, r.line, "dof")),
                                     csv::parse_double(r.fields[4], path, r.line, "p_value"),
                                     static_cast<std::size_t>(csv::parse_int(r.fields[5], path, r.line, "n_sims"))});
    }
    return out;
}

std::string posthoc_markdown(const PosthocReport& report, std::span<const std::size_t> order, std::string_view title) {
    std::ostringstream out;
    out << "# " << title << "\n\nBergmann-Hommel adjusted p-values at alpha = " << format_double(report.alpha)
        << ".\n\n| Hypothesis | p_Berg | |\n|---|---|---|\n";
    for (const auto& row : oriented_rows(report, order)) {
        out << "| " << row.first << " vs " << row.second << " | " << format_apv(row.h->apv) << " | "
            << decision_text(row.h->decision) << " |\n";
    }
    return out.str();
}

std::string posthoc_csv(const PosthocReport& report, std::span<const std::size_t> order) {
    std::ostringstream out;
    out << "hypothesis,model_a,model_b,z,p_raw,apv,decision\n";
    for (const auto& row : oriented_rows(report, order)) {
        out << row.first << " vs " << row.second << ',' << row.first << ',' << row.second << ','
            << format_double(row.z) << ',' << format_double(row.h->hypothesis.p_raw) << ','
            << format_double(row.h->apv) << ',' << (row.h->decision == Decision::Rejected ? "REJECTED" : "RETAINED")
            << '\n';
    }
    return out.str();
}

std::string outperformance_markdown(const OutperformanceSummary& summary, const PosthocReport& posthoc,
                                    std::string_view title) {
    std::ostringstream out;
    out << "# " << title << "\n\nModels ordered by Friedman average rank; each row lists the models it "
        << "statistically outperforms (Bergmann-Hommel, alpha = " << format_double(posthoc.alpha) << ").\n\n"
        << "| Model | Average rank | Outperforms |\n|---|---|---|\n";
    for (const auto& e : summary.entries) {
        std::string list;
        for (const auto& m : e.outperforms) list += (list.empty() ? "" : ", ") + m;
        out << "| " << e.model << " | " << format_fixed(e.avg_rank, 4) << " | " << (list.empty() ? "-" : list)
            << " |\n";
    }
    out << '\n' << kTieFooter;
    return out.str();
}

std::string summary_markdown(const ErrorMatrix& errors, std::span<const std::size_t> order, bool root_pehe) {
    const bool show_root = root_pehe && errors.metric() == Metric::Pehe;
    std::ostringstream out;
    out << "# Error summary: " << to_string(errors.metric()) << "\n\n"
        << "Descriptive only; rankings and tests never use these columns.\n\n"
        << "| Model | Mean | Median |" << (show_root ? " Mean sqrt(PEHE) (display only) |" : "") << "\n"
        << "|---|---|---|" << (show_root ? "---|" : "") << "\n";
    const auto ord = order.empty() ? identity_order(errors.n_models())
                                   : std::vector<std::size_t>(order.begin(), order.end());
    for (std::size_t m : ord) {
        std::vector<double> col;
        CompensatedSum sum, root_sum;
        for (std::size_t s = 0; s < errors.n_sims(); ++s) {
            col.push_back(errors.at(s, m));
            sum.add(errors.at(s, m));
            root_sum.add(std::sqrt(errors.at(s, m)));
        }
        std::sort(col.begin(), col.end());
        const std::size_t n = col.size();
        const double median = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
        out << "| " << errors.models()[m] << " | " << format_fixed(sum.value() / static_cast<double>(n), 6) << " | "
            << format_fixed(median, 6) << " |";
        if (show_root) out << ' ' << format_fixed(root_sum.value() / static_cast<double>(n), 6) << " |";
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> write_metric_report(const MetricAnalysis& a, const fs::path& dir, Scale scale,
                                             bool root_pehe) {
    fs::create_directories(dir);
    const Metric metric = a.errors.metric();
    const std::string label = metric_label(metric);
    const auto order = rank_order(a.ranks);

    SvgOptions svg;
    svg.title = std::string(scale == Scale::Log10 ? "Log10 scaled performance profiles based on "
                                                  : "Performance profiles based on ") +
                label;
    export_profiles(a.curves, scale, (dir / "profiles").string(), svg);
    write_error_csv(a.errors, (dir / "errors.csv").string());
    write_text(dir / "friedman.md", friedman_markdown(a.ranks, "Friedman average rankings based on " + label));
    write_text(dir / "friedman.csv", friedman_csv(a.ranks));
    write_text(dir / "posthoc.md",
               posthoc_markdown(a.posthoc, order, "Multiple comparison test: Bergmann-Hommel APVs based on " + label));
    write_text(dir / "posthoc.csv", posthoc_csv(a.posthoc, order));
    write_text(dir / "outperformance.md",
               outperformance_markdown(a.outperformance, a.posthoc, "Conclusions for comparison based on " + label));
    write_text(dir / "summary.md", summary_markdown(a.errors, order, root_pehe));
    return {"errors.csv",  "friedman.csv",       "friedman.md", "outperformance.md", "posthoc.csv",
            "posthoc.md",  "profiles.csv",       "profiles.svg", "summary.md"};
}

// ---- inputs -----------------------------------------------------------------

namespace {

void check_model_count(std::size_t k, const std::string& source, std::vector<Diagnostic>& diags) {
    if (k < 2) diags.push_back({source, "need at least 2 models, found " + std::to_string(k)});
    if (k > static_cast<std::size_t>(kMaxExhaustiveModels)) {
        diags.push_back({source, "at most " + std::to_string(kMaxExhaustiveModels) +
                                     " models are supported by the exhaustive post-hoc procedure, found " +
                                     std::to_string(k)});
    }
}

void check_sim_count(std::size_t n, const std::string& source, std::vector<Diagnostic>& diags) {
    if (n < 2) diags.push_back({source, "the Friedman test needs at least 2 simulations, found " + std::to_string(n)});
}

IhdpLoadOptions ihdp_options(const SourceConfig& src) {
    return IhdpLoadOptions{src.limit, src.expect_units, src.expect_treated};
}

std::vector<fs::path> outcome_files(const SourceConfig& src) {
    auto files = csv::list_csv_files(src.path);
    if (src.limit && *src.limit < files.size()) files.resize(*src.limit);
    return files;
}

}  // namespace

std::vector<Diagnostic> validate_inputs(const BenchmarkConfig& config) {
    std::vector<Diagnostic> diags;
    if (config.metrics.empty()) diags.push_back({"config", "at least one metric is required"});
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) diags.push_back({"config", "alpha must lie in (0, 1)"});

    const auto& src = config.source;
    const bool fits_estimators = src.kind == SourceKind::Synthetic || src.kind == SourceKind::Ihdp;
    if (fits_estimators) {
        std::set<std::string> names;
        for (const auto& e : config.estimators) {
            if (!names.insert(e.name).second) diags.push_back({"config", "duplicate estimator name '" + e.name + "'"});
        }
        check_model_count(config.estimators.size(), "config.estimators", diags);
    }

    switch (src.kind) {
        case SourceKind::Synthetic:
            try {
                src.synthetic.validate();
            } catch (const ValidationError& e) {
                diags.push_back({"config.source", e.what()});
            }
            check_sim_count(src.synthetic.n_sims, "config.source", diags);
            break;
        case SourceKind::Ihdp: {
            const auto files = csv::list_csv_files(src.path);
            const std::size_t take = src.limit ? std::min(*src.limit, files.size()) : files.size();
            for (std::size_t i = 0; i < take; ++i) {
                try {
                    load_ihdp_file(files[i].string(), static_cast<long long>(i) + 1, ihdp_options(src));
                } catch (const IoError&) {
                    throw;
                } catch (const Error& e) {
                    diags.push_back({files[i].string(), e.what()});
                }
            }
            check_sim_count(take, src.path, diags);
            break;
        }
        case SourceKind::Outcomes: {
            const auto files = outcome_files(src);
            std::optional<std::set<std::string>> reference;
            for (std::size_t i = 0; i < files.size(); ++i) {
                try {
                    const auto table = read_outcome_csv(files[i].string(), static_cast<long long>(i) + 1);
                    const auto names = table.model_names();
                    std::set<std::string> set(names.begin(), names.end());
                    if (!reference) {
                        reference = set;
                        check_model_count(names.size(), files[i].string(), diags);
                    } else if (set != *reference) {
                        diags.push_back({files[i].string(), "model set differs from " + files.front().string()});
                    }
                    if (!table.t.empty()) {
                        const auto treated = std::count(table.t.begin(), table.t.end(), 1);
                        if (treated == 0 || static_cast<std::size_t>(treated) == table.t.size())
                            diags.push_back({files[i].string(), "only one treatment group present"});
                    }
                } catch (const IoError&) {
                    throw;
                } catch (const Error& e) {
                    diags.push_back({files[i].string(), e.what()});
                }
            }
            check_sim_count(files.size(), src.path, diags);
            break;
        }
        case SourceKind::Errors:
            for (Metric m : config.metrics) {
                const auto it = src.error_files.find(m);
                if (it == src.error_files.end()) {
                    diags.push_back({"config.source", "no error file for metric " + std::string(to_string(m))});
                    continue;
                }
                if (!fs::is_regular_file(it->second)) throw IoError("cannot read error file " + it->second);
                auto scan = scan_error_csv(it->second, m);
                diags.insert(diags.end(), scan.diagnostics.begin(), scan.diagnostics.end());
                if (scan.matrix) {
                    check_model_count(scan.matrix->n_models(), it->second, diags);
                    check_sim_count(scan.matrix->n_sims(), it->second, diags);
                }
            }
            break;
    }
    return diags;
}

std::vector<ErrorMatrix> compute_error_matrices(const BenchmarkConfig& config) {
    const auto& src = config.source;
    std::vector<ErrorMatrix> out;

    if (src.kind == SourceKind::Errors) {
        for (Metric m : config.metrics) {
            const auto it = src.error_files.find(m);
            if (it == src.error_files.end())
                throw ValidationError("no error file for metric " + std::string(to_string(m)));
            out.push_back(read_error_csv(it->second, m));
        }
        return out;
    }

    std::vector<std::string> models;
    std::vector<long long> sims;
    std::vector<std::vector<double>> values(config.metrics.size());
    const auto add_table = [&](const PotentialOutcomeTable& table) {
        if (models.empty()) models = table.model_names();
        sims.push_back(table.sim_id);
        for (std::size_t mi = 0; mi < config.metrics.size(); ++mi) {
            for (const auto& name : models) values[mi].push_back(metric_value(table, name, config.metrics[mi]));
        }
    };

    switch (src.kind) {
        case SourceKind::Synthetic:
            for (std::size_t s = 0; s < src.synthetic.n_sims; ++s) {
                add_table(predict_all(config.estimators, generate_synthetic_sim(src.synthetic, s)));
            }
            break;
        case SourceKind::Ihdp:
            for (const auto& r : load_ihdp(src.path, ihdp_options(src))) add_table(predict_all(config.estimators, r));
            break;
        case SourceKind::Outcomes: {
            const auto files = outcome_files(src);
            std::vector<PotentialOutcomeTable> tables;
            tables.reserve(files.size());
            for (std::size_t i = 0; i < files.size(); ++i)
                tables.push_back(read_outcome_csv(files[i].string(), static_cast<long long>(i) + 1));
            for (Metric m : config.metrics) out.push_back(build_error_matrix(tables, m));
            return out;
        }
        case SourceKind::Errors: break;
    }
    for (std::size_t mi = 0; mi < config.metrics.size(); ++mi) {
        out.emplace_back(config.metrics[mi], models, sims, std::move(values[mi]));
    }
    return out;
}

// ---- orchestration ------------------------------------------------------------

std::string sha256_hex(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0xF]);
    }
    return hex;
}

namespace {

std::vector<std::string> input_files(const BenchmarkConfig& config) {
    const auto& src = config.source;
    std::vector<std::string> files;
    switch (src.kind) {
        case SourceKind::Synthetic: break;
        case SourceKind::Ihdp:
        case SourceKind::Outcomes: {
            auto list = csv::list_csv_files(src.path);
            if (src.limit && *src.limit < list.size()) list.resize(*src.limit);
            for (const auto& f : list) files.push_back(f.string());
            break;
        }
        case SourceKind::Errors:
            for (Metric m : config.metrics) files.push_back(src.error_files.at(m));
            break;
    }
    return files;
}

// Moves every entry of `staging` into `target`, replacing same-named entries.
void publish(const fs::path& staging, const fs::path& target) {
    fs::create_directories(target);
    for (const auto& entry : fs::directory_iterator(staging)) {
        const auto dest = target / entry.path().filename();
        fs::remove_all(dest);
        fs::rename(entry.path(), dest);
    }
    fs::remove_all(staging);
}

fs::path staging_dir_for(const fs::path& out) {
    const auto abs = fs::absolute(out).lexically_normal();
    const auto name = abs.filename().empty() ? abs.parent_path().filename() : abs.filename();
    const auto parent = abs.filename().empty() ? abs.parent_path().parent_path() : abs.parent_path();
    return parent / ("." + name.string() + ".partial");
}

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

nlohmann::json analysis_json(const MetricAnalysis& a) {
    nlohmann::json j;
    j["models"] = a.errors.models();
    j["n_sims"] = a.errors.n_sims();
    j["friedman"] = {{"statistic", a.ranks.statistic.value_or(0.0)},
                     {"dof", a.ranks.dof},
                     {"p_value", a.ranks.p_value.value_or(1.0)},
                     {"avg_ranks", a.ranks.avg_ranks}};
    auto hyps = nlohmann::json::array();
    for (const auto& h : a.posthoc.hypotheses) {
        hyps.push_back({{"model_a", h.hypothesis.model_a},
                        {"model_b", h.hypothesis.model_b},
                        {"z", h.hypothesis.z},
                        {"p_raw", h.hypothesis.p_raw},
                        {"apv", h.apv},
                        {"rejected", h.decision == Decision::Rejected}});
    }
    j["posthoc"] = {{"alpha", a.posthoc.alpha}, {"hypotheses", hyps}, {"acceptance_set", a.posthoc.acceptance_set}};
    return j;
}

}  // namespace

RunResult run_benchmark(const BenchmarkConfig& config) {
    stage("validate", [&] {
        const auto diags = validate_inputs(config);
        if (!diags.empty()) {
            std::string msg;
            for (const auto& d : diags) msg += (msg.empty() ? "" : "\n") + d.source + ": " + d.message;
            throw ValidationError(msg);
        }
        return 0;
    });

    const auto matrices = stage("load", [&] { return compute_error_matrices(config); });

    RunResult result;
    result.output_dir = config.output_dir;
    for (const auto& errors : matrices) {
        result.analyses.push_back(stage("analysis:" + std::string(to_string(errors.metric())),
                                        [&] { return analyze(errors, config.alpha); }));
    }

    const auto staging = staging_dir_for(config.output_dir);
    try {
        stage("write", [&] {
            fs::remove_all(staging);
            fs::create_directories(staging);
            nlohmann::json manifest;
            manifest["tool"] = "causalbench";
            manifest["version"] = std::string(kVersion);
            auto cfg = to_json(config);
            cfg.erase("output_dir");
            manifest["config"] = cfg;
            if (config.source.kind == SourceKind::Synthetic) manifest["seed"] = config.source.synthetic.seed;
            manifest["inputs"] = nlohmann::json::array();
            for (const auto& f : input_files(config)) {
                manifest["inputs"].push_back({{"path", f}, {"sha256", sha256_hex(f)}});
            }
            manifest["outputs"] = nlohmann::json::array();
            for (const auto& a : result.analyses) {
                const auto sub = metric_dir(a.errors.metric());
                for (const auto& f : write_metric_report(a, staging / sub, config.scale, config.root_pehe)) {
                    const auto rel = sub + "/" + f;
                    manifest["outputs"].push_back({{"path", rel}, {"sha256", sha256_hex(staging / rel)}});
                    result.files.push_back(rel);
                }
                manifest["results"][std::string(to_string(a.errors.metric()))] = analysis_json(a);
            }
            write_text(staging / "manifest.json", manifest.dump(2) + "\n");
            result.files.push_back("manifest.json");
            return 0;
        });
        stage("publish", [&] {
            publish(staging, config.output_dir);
            return 0;
        });
    } catch (...) {
        std::error_code ec;
        fs::remove_all(staging, ec);
        throw;
    }
    return result;
}

std::vector<std::string> run_profile_only(const ErrorMatrix& errors, Scale scale, const fs::path& out) {
    fs::create_directories(out);
    const auto ratios = performance_ratios(errors);
    const auto curves = profile_curves(ratios);
    SvgOptions svg;
    svg.title = "Performance profiles based on " + metric_label(errors.metric());
    export_profiles(curves, scale, (out / "profiles").string(), svg);
    return {"profiles.csv", "profiles.svg"};
}

std::vector<std::string> run_posthoc_only(const ErrorMatrix& errors, double alpha, const fs::path& out) {
    fs::create_directories(out);
    const auto a = analyze(errors, alpha);
    const auto order = rank_order(a.ranks);
    const auto label = metric_label(errors.metric());
    write_text(out / "friedman.md", friedman_markdown(a.ranks, "Friedman average rankings based on " + label));
    write_text(out / "friedman.csv", friedman_csv(a.ranks));
    write_text(out / "posthoc.md",
               posthoc_markdown(a.posthoc, order, "Multiple comparison test: Bergmann-Hommel APVs based on " + label));
    write_text(out / "posthoc.csv", posthoc_csv(a.posthoc, order));
    write_text(out / "outperformance.md",
               outperformance_markdown(a.outperformance, a.posthoc, "Conclusions for comparison based on " + label));
    return {"friedman.csv", "friedman.md", "outperformance.md", "posthoc.csv", "posthoc.md"};
}

std::vector<ExternalPValue> read_p_value_csv(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows.front().fields != std::vector<std::string>{"model_a", "model_b", "p"})
        throw SchemaError(path + ": expected header 'model_a,model_b,p'");
    std::vector<ExternalPValue> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.fields.size() != 3) throw ParseError(path, r.line, "expected 3 fields");
        out.push_back({r.fields[0], r.fields[1], csv::parse_double(r.fields[2], path, r.line, "p")});
    }
    return out;
}

std::vector<std::string> run_posthoc_from_p_values(std::span<const ExternalPValue> p_values, double alpha,
                                                   const fs::path& out) {
    std::vector<std::string> models;
    for (const auto& pv : p_values) {
        for (const auto* name : {&pv.model_a, &pv.model_b}) {
            if (std::find(models.begin(), models.end(), *name) == models.end()) models.push_back(*name);
        }
    }
    const auto hypotheses = hypotheses_from_p_values(models, p_values);
    const auto family = enumerate_exhaustive_sets(static_cast<int>(models.size()));
    const auto report = bergmann_hommel_apv(hypotheses, family, alpha);
    fs::create_directories(out);
    write_text(out / "posthoc.md", posthoc_markdown(report, {}, "Multiple comparison test: Bergmann-Hommel APVs"));
    write_text(out / "posthoc.csv", posthoc_csv(report, {}));
    return {"posthoc.csv", "posthoc.md"};
}

std::vector<std::string> export_synthetic(const SyntheticConfig& config, std::span<const EstimatorSpec> roster,
                                          const fs::path& out) {
    config.validate();
    fs::create_directories(out);
    std::vector<std::string> files;
    const int width = std::max<int>(4, static_cast<int>(std::to_string(config.n_sims).size()));
    for (std::size_t s = 0; s < config.n_sims; ++s) {
        const auto r = generate_synthetic_sim(config, s);
        const auto table = roster.empty() ? r.to_outcome_table() : predict_all(roster, r);
        std::string id = std::to_string(r.sim_id);
        id.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0');
        const auto name = "sim_" + id + ".csv";
        write_outcome_csv(table, (out / name).string());
        files.push_back(name);
    }
    return files;
}

}  // namespace causalbench
