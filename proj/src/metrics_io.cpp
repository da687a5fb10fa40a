#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "causalbench/csv.hpp"
#include "causalbench/errors.hpp"
#include "causalbench/metrics.hpp"
#include "causalbench/numeric.hpp"

namespace causalbench {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// "x12" -> 12, anything else -> nullopt
std::optional<int> covariate_number(std::string_view name) {
    if (name.size() < 2 || name.front() != 'x') return std::nullopt;
    int n = 0;
    for (char c : name.substr(1)) {
        if (c < '0' || c > '9') return std::nullopt;
        n = n * 10 + (c - '0');
    }
    return n;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

}  // namespace

PotentialOutcomeTable read_outcome_csv(const std::string& path, long long sim_id) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) throw SchemaError(path + ": empty file, expected a header");
    const auto& header = rows.front().fields;

    std::map<std::string, std::size_t, std::less<>> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!col.emplace(header[i], i).second)
            throw SchemaError(path + ": duplicate column '" + header[i] + "'");
    }
    for (const char* required : {"unit", "t", "y0_true", "y1_true"}) {
        if (!col.contains(required))
            throw SchemaError(path + ": missing required column '" + std::string(required) + "'");
    }

    std::vector<std::pair<int, std::size_t>> covariate_cols;
    std::vector<std::string> model_order;
    std::map<std::string, std::pair<std::optional<std::size_t>, std::optional<std::size_t>>> model_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& name = header[i];
        if (name == "unit" || name == "t" || name == "y0_true" || name == "y1_true" ||
            name == "y_factual")
            continue;
        if (auto n = covariate_number(name)) {
            covariate_cols.emplace_back(*n, i);
            continue;
        }
        const bool is_y0 = ends_with(name, "_y0");
        const bool is_y1 = ends_with(name, "_y1");
        if (!is_y0 && !is_y1) throw SchemaError(path + ": unrecognised column '" + name + "'");
        const std::string model = name.substr(0, name.size() - 3);
        if (!model_cols.contains(model)) model_order.push_back(model);
        (is_y0 ? model_cols[model].first : model_cols[model].second) = i;
    }
    for (const auto& m : model_order) {
        if (!model_cols[m].first || !model_cols[m].second)
            throw SchemaError(path + ": model '" + m + "' needs both _y0 and _y1 columns");
    }
    std::sort(covariate_cols.begin(), covariate_cols.end());

    PotentialOutcomeTable table;
    table.sim_id = sim_id;
    for (const auto& m : model_order) table.models.push_back(ModelPrediction{m, {}, {}});

    const bool has_factual = col.contains("y_factual");
    std::optional<bool> t_present;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != header.size()) {
            throw ParseError(path, row.line,
                             "expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(row.fields.size()));
        }
        const auto num = [&](std::size_t c) {
            return csv::parse_double(row.fields[c], path, row.line, header[c]);
        };
        csv::parse_int(row.fields[col.at("unit")], path, row.line, "unit");
        const std::string& t_text = row.fields[col.at("t")];
        if (!t_present) t_present = !t_text.empty();
        if (*t_present != !t_text.empty())
            throw ParseError(path, row.line, "column 't' must be filled on all rows or none");
        if (*t_present) {
            const auto t = csv::parse_int(t_text, path, row.line, "t");
            if (t != 0 && t != 1) throw ParseError(path, row.line, "column 't' must be 0 or 1");
            table.t.push_back(static_cast<int>(t));
        }
        table.y0_true.push_back(num(col.at("y0_true")));
        table.y1_true.push_back(num(col.at("y1_true")));
        if (has_factual) table.y_factual.push_back(num(col.at("y_factual")));
        if (!covariate_cols.empty()) {
            std::vector<double> x;
            x.reserve(covariate_cols.size());
            for (const auto& [n, c] : covariate_cols) x.push_back(num(c));
            table.covariates.push_back(std::move(x));
        }
        for (auto& m : table.models) {
            m.y0_hat.push_back(num(*model_cols[m.name].first));
            m.y1_hat.push_back(num(*model_cols[m.name].second));
        }
    }
    try {
        table.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return table;
}

void write_outcome_csv(const PotentialOutcomeTable& table, const std::string& path) {
    table.validate();
    auto out = open_for_write(path);
    std::vector<std::string> header{"unit", "t", "y0_true", "y1_true"};
    if (!table.y_factual.empty()) header.emplace_back("y_factual");
    const std::size_t d = table.covariates.empty() ? 0 : table.covariates.front().size();
    for (std::size_t j = 0; j < d; ++j) header.push_back("x" + std::to_string(j + 1));
    for (const auto& m : table.models) {
        header.push_back(m.name + "_y0");
        header.push_back(m.name + "_y1");
    }
    out << csv::join(header) << '\n';
    for (std::size_t i = 0; i < table.n_units(); ++i) {
        std::vector<std::string> f;
        f.reserve(header.size());
        f.push_back(std::to_string(i));
        f.push_back(table.t.empty() ? std::string() : std::to_string(table.t[i]));
        f.push_back(format_double(table.y0_true[i]));
        f.push_back(format_double(table.y1_true[i]));
        if (!table.y_factual.empty()) f.push_back(format_double(table.y_factual[i]));
        for (std::size_t j = 0; j < d; ++j) f.push_back(format_double(table.covariates[i][j]));
        for (const auto& m : table.models) {
            f.push_back(format_double(m.y0_hat[i]));
            f.push_back(format_double(m.y1_hat[i]));
        }
        out << csv::join(f) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

ErrorCsvScan scan_error_csv(const std::string& path, Metric metric) {
    ErrorCsvScan scan;
    const auto diag = [&](std::string msg) { scan.diagnostics.push_back({path, std::move(msg)}); };

    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        diag("empty file, expected header 'sim,<model1>,<model2>,...'");
        return scan;
    }
    const auto& header = rows.front().fields;
    if (header.empty() || header.front() != "sim") {
        diag("first header column must be 'sim'");
        return scan;
    }
    std::vector<std::string> models(header.begin() + 1, header.end());
    if (models.size() < 2) diag("need at least 2 model columns, found " + std::to_string(models.size()));
    std::set<std::string> seen;
    for (const auto& m : models) {
        if (m.empty()) diag("empty model name in header");
        else if (!seen.insert(m).second) diag("duplicate model column '" + m + "'");
    }
    if (rows.size() < 2) diag("no simulation rows");

    std::vector<long long> sims;
    std::vector<double> values;
    std::set<long long> seen_sims;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string where = "line " + std::to_string(row.line);
        if (row.fields.size() != header.size()) {
            diag(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                 std::to_string(row.fields.size()));
            continue;
        }
        try {
            const auto sim = csv::parse_int(row.fields[0], path, row.line, "sim");
            if (!seen_sims.insert(sim).second) diag(where + ": duplicate sim id " + std::to_string(sim));
            sims.push_back(sim);
        } catch (const ParseError& e) {
            diag(e.what());
            sims.push_back(0);
        }
        for (std::size_t c = 1; c < header.size(); ++c) {
            try {
                const double v = csv::parse_double(row.fields[c], path, row.line, header[c]);
                if (v < 0.0) {
                    diag(where + " (sim " + row.fields[0] + "), column '" + header[c] +
                         "': negative error " + row.fields[c]);
                }
                values.push_back(v);
            } catch (const ParseError& e) {
                diag(e.what());
                values.push_back(0.0);
            }
        }
    }
    if (scan.diagnostics.empty()) {
        scan.matrix.emplace(metric, std::move(models), std::move(sims), std::move(values));
    }
    return scan;
}

ErrorMatrix read_error_csv(const std::string& path, Metric metric) {
    auto scan = scan_error_csv(path, metric);
    if (!scan.matrix) {
        std::string msg;
        for (const auto& d : scan.diagnostics) msg += (msg.empty() ? "" : "\n") + d.message;
        throw ValidationError(path + ": " + msg);
    }
    return std::move(*scan.matrix);
}

void write_error_csv(const ErrorMatrix& errors, const std::string& path) {
    auto out = open_for_write(path);
    std::vector<std::string> header{"sim"};
    header.insert(header.end(), errors.models().begin(), errors.models().end());
    out << csv::join(header) << '\n';
    for (std::size_t s = 0; s < errors.n_sims(); ++s) {
        std::vector<std::string> f{std::to_string(errors.sims()[s])};
        for (double v : errors.row(s)) f.push_back(format_double(v));
        out << csv::join(f) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

}  // namespace causalbench
