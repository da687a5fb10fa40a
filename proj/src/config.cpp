#include "causalbench/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "causalbench/errors.hpp"

namespace causalbench {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get_as(const json& obj, std::string_view key, std::string_view where) {
    try {
        return obj.at(std::string(key)).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string(where) + "." + std::string(key) + ": " + e.what());
    }
}

std::size_t get_count(const json& obj, std::string_view key, std::string_view where) {
    const auto& v = obj.at(std::string(key));
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError(std::string(where) + "." + std::string(key) + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (base_dir.empty() || path.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

SourceConfig parse_source(const json& src, const std::string& base_dir) {
    if (!src.is_object()) throw ValidationError("source must be an object");
    const auto type = get_as<std::string>(src, "type", "source");
    SourceConfig out;
    if (type == "synthetic") {
        out.kind = SourceKind::Synthetic;
        reject_unknown_keys(src, {"type", "n_units", "n_sims", "seed", "sigma_z0", "sigma_z1", "noiseless_truth",
                                  "proxy_dim"},
                            "source");
        auto& s = out.synthetic;
        if (src.contains("n_units")) s.n_units = get_count(src, "n_units", "source");
        if (src.contains("n_sims")) s.n_sims = get_count(src, "n_sims", "source");
        if (src.contains("seed")) s.seed = get_as<std::uint64_t>(src, "seed", "source");
        if (src.contains("sigma_z0")) s.sigma_z0 = get_as<double>(src, "sigma_z0", "source");
        if (src.contains("sigma_z1")) s.sigma_z1 = get_as<double>(src, "sigma_z1", "source");
        if (src.contains("noiseless_truth")) s.noiseless_truth = get_as<bool>(src, "noiseless_truth", "source");
        if (src.contains("proxy_dim")) s.proxy_dim = get_count(src, "proxy_dim", "source");
    } else if (type == "ihdp" || type == "outcomes") {
        out.kind = type == "ihdp" ? SourceKind::Ihdp : SourceKind::Outcomes;
        if (out.kind == SourceKind::Ihdp)
            reject_unknown_keys(src, {"type", "path", "limit", "expect_units", "expect_treated"}, "source");
        else
            reject_unknown_keys(src, {"type", "path", "limit"}, "source");
        out.path = resolve(get_as<std::string>(src, "path", "source"), base_dir);
        if (src.contains("limit")) out.limit = get_count(src, "limit", "source");
        if (src.contains("expect_units")) out.expect_units = get_count(src, "expect_units", "source");
        if (src.contains("expect_treated")) out.expect_treated = get_count(src, "expect_treated", "source");
    } else if (type == "errors") {
        out.kind = SourceKind::Errors;
        reject_unknown_keys(src, {"type", "files"}, "source");
        const auto& files = src.at("files");
        if (!files.is_object() || files.empty())
            throw ValidationError("source.files must map metric names to CSV paths");
        for (const auto& [metric, path] : files.items()) {
            if (!path.is_string()) throw ValidationError("source.files." + metric + " must be a path");
            try {
                out.error_files[parse_metric(metric)] = resolve(path.get<std::string>(), base_dir);
            } catch (const LookupError& e) {
                throw ValidationError(std::string("source.files: ") + e.what());
            }
        }
    } else {
        throw ValidationError("source.type must be one of synthetic, ihdp, outcomes, errors (got '" + type + "')");
    }
    return out;
}

}  // namespace

std::string_view to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::Synthetic: return "synthetic";
        case SourceKind::Ihdp: return "ihdp";
        case SourceKind::Outcomes: return "outcomes";
        case SourceKind::Errors: return "errors";
    }
    return "?";
}

std::vector<EstimatorSpec> BenchmarkConfig::default_estimators() {
    return {
        {"diff_in_means", EstimatorKind::DiffInMeans, {}},
        {"s_learner_linear", EstimatorKind::SLearnerLinear, {}},
        {"knn_matching", EstimatorKind::KnnMatching, {{"k", 1.0}}},
    };
}

BenchmarkConfig parse_config(const nlohmann::json& doc, const std::string& base_dir) {
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    reject_unknown_keys(doc, {"source", "metrics", "estimators", "alpha", "output_dir", "scale", "root_pehe"},
                        "config");
    if (!doc.contains("source")) throw ValidationError("config: missing 'source'");

    BenchmarkConfig cfg;
    cfg.source = parse_source(doc.at("source"), base_dir);

    if (doc.contains("metrics")) {
        const auto& list = doc.at("metrics");
        if (!list.is_array()) throw ValidationError("metrics must be an array");
        cfg.metrics.clear();
        std::set<Metric> seen;
        for (const auto& m : list) {
            if (!m.is_string()) throw ValidationError("metrics entries must be strings");
            Metric metric{};
            try {
                metric = parse_metric(m.get<std::string>());
            } catch (const LookupError& e) {
                throw ValidationError(std::string("metrics: ") + e.what());
            }
            if (seen.insert(metric).second) cfg.metrics.push_back(metric);
        }
    } else if (cfg.source.kind == SourceKind::Errors) {
        cfg.metrics.clear();
        for (const auto& [metric, path] : cfg.source.error_files) cfg.metrics.push_back(metric);
    }
    if (cfg.metrics.empty()) throw ValidationError("at least one metric is required");

    if (doc.contains("estimators")) {
        const auto& list = doc.at("estimators");
        if (!list.is_array()) throw ValidationError("estimators must be an array");
        std::set<std::string> names;
        cfg.estimators.clear();
        for (const auto& e : list) {
            if (!e.is_object()) throw ValidationError("estimator entries must be objects");
            reject_unknown_keys(e, {"name", "kind", "hyperparams"}, "estimator");
            EstimatorSpec spec;
            spec.name = get_as<std::string>(e, "name", "estimator");
            try {
                spec.kind = parse_estimator_kind(get_as<std::string>(e, "kind", "estimator"));
            } catch (const LookupError& err) {
                throw ValidationError(std::string("estimator '") + spec.name + "': " + err.what());
            }
            if (e.contains("hyperparams")) {
                for (const auto& [key, value] : e.at("hyperparams").items()) {
                    if (!value.is_number()) throw ValidationError("estimator hyperparams must be numeric");
                    spec.hyperparams[key] = value.get<double>();
                }
            }
            if (spec.name.empty()) throw ValidationError("estimator name must be non-empty");
            if (!names.insert(spec.name).second)
                throw ValidationError("duplicate estimator name '" + spec.name + "'");
            cfg.estimators.push_back(std::move(spec));
        }
    }

    if (doc.contains("alpha")) cfg.alpha = get_as<double>(doc, "alpha", "config");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
    if (doc.contains("output_dir")) cfg.output_dir = resolve(get_as<std::string>(doc, "output_dir", "config"), base_dir);
    if (doc.contains("scale")) {
        try {
            cfg.scale = parse_scale(get_as<std::string>(doc, "scale", "config"));
        } catch (const LookupError& e) {
            throw ValidationError(std::string("scale: ") + e.what());
        }
    }
    if (doc.contains("root_pehe")) cfg.root_pehe = get_as<bool>(doc, "root_pehe", "config");
    return cfg;
}

BenchmarkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": invalid JSON: " + e.what());
    }
    return parse_config(doc, std::filesystem::path(path).parent_path().string());
}

void apply_env_overrides(BenchmarkConfig& config) {
    if (const char* out = std::getenv("CAUSALBENCH_OUTPUT_DIR"); out && *out) config.output_dir = out;
    if (const char* seed = std::getenv("CAUSALBENCH_SEED"); seed && *seed) {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(seed, &used);
            if (used != std::string_view(seed).size()) throw std::invalid_argument("trailing characters");
            config.source.synthetic.seed = value;
        } catch (const std::exception&) {
            throw ValidationError("CAUSALBENCH_SEED is not an unsigned integer: '" + std::string(seed) + "'");
        }
    }
}

nlohmann::json to_json(const BenchmarkConfig& config) {
    json src;
    src["type"] = std::string(to_string(config.source.kind));
    switch (config.source.kind) {
        case SourceKind::Synthetic: {
            const auto& s = config.source.synthetic;
            src["n_units"] = s.n_units;
            src["n_sims"] = s.n_sims;
            src["seed"] = s.seed;
            src["sigma_z0"] = s.sigma_z0;
            src["sigma_z1"] = s.sigma_z1;
            src["noiseless_truth"] = s.noiseless_truth;
            src["proxy_dim"] = s.proxy_dim;
            break;
        }
        case SourceKind::Ihdp:
        case SourceKind::Outcomes:
            src["path"] = config.source.path;
            if (config.source.limit) src["limit"] = *config.source.limit;
            if (config.source.expect_units) src["expect_units"] = *config.source.expect_units;
            if (config.source.expect_treated) src["expect_treated"] = *config.source.expect_treated;
            break;
        case SourceKind::Errors:
            for (const auto& [metric, path] : config.source.error_files)
                src["files"][std::string(to_string(metric))] = path;
            break;
    }
    json doc;
    doc["source"] = src;
    doc["metrics"] = json::array();
    for (auto m : config.metrics) doc["metrics"].push_back(std::string(to_string(m)));
    doc["estimators"] = json::array();
    for (const auto& e : config.estimators) {
        json entry{{"name", e.name}, {"kind", std::string(to_string(e.kind))}};
        if (!e.hyperparams.empty()) entry["hyperparams"] = e.hyperparams;
        doc["estimators"].push_back(entry);
    }
    doc["alpha"] = config.alpha;
    doc["output_dir"] = config.output_dir;
    doc["scale"] = std::string(to_string(config.scale));
    doc["root_pehe"] = config.root_pehe;
    return doc;
}

}  // namespace causalbench
