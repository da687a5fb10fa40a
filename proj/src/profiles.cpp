#include "causalbench/profiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "causalbench/errors.hpp"
#include "causalbench/numeric.hpp"

namespace causalbench {

RatioMatrix performance_ratios(const ErrorMatrix& errors) {
    RatioMatrix out{errors.models(), errors.sims(), {}};
    out.values.reserve(errors.values().size());
    for (std::size_t s = 0; s < errors.n_sims(); ++s) {
        const auto row = errors.row(s);
        const double best = *std::min_element(row.begin(), row.end());
        for (double a : row) {
            if (best > 0.0) {
                out.values.push_back(a / best);
            } else {
                // zero best: only exact zeros stay on the profile
                out.values.push_back(a == 0.0 ? 1.0 : kFailedRatio);
            }
        }
    }
    return out;
}

ProfileCurve profile_curve(const RatioMatrix& ratios, std::string_view model) {
    const auto it = std::find(ratios.models.begin(), ratios.models.end(), model);
    if (it == ratios.models.end()) throw LookupError("unknown model '" + std::string(model) + "'");
    const auto col = static_cast<std::size_t>(it - ratios.models.begin());

    std::vector<double> finite;
    finite.reserve(ratios.n_sims());
    for (std::size_t s = 0; s < ratios.n_sims(); ++s) {
        const double r = ratios.at(s, col);
        if (!is_failed(r)) finite.push_back(r);
    }
    std::sort(finite.begin(), finite.end());

    ProfileCurve curve{std::string(model), {}, ratios.n_sims()};
    const double n = static_cast<double>(ratios.n_sims());
    for (std::size_t i = 0; i < finite.size(); ++i) {
        if (i + 1 < finite.size() && finite[i + 1] == finite[i]) continue;
        curve.breakpoints.push_back({finite[i], static_cast<double>(i + 1) / n});
    }
    return curve;
}

std::vector<ProfileCurve> profile_curves(const RatioMatrix& ratios) {
    std::vector<ProfileCurve> curves;
    curves.reserve(ratios.n_models());
    for (const auto& m : ratios.models) curves.push_back(profile_curve(ratios, m));
    return curves;
}

double profile_value(const ProfileCurve& curve, double a) {
    if (!(a >= 1.0)) throw DomainError("profile argument must be >= 1");
    const auto it = std::upper_bound(curve.breakpoints.begin(), curve.breakpoints.end(), a,
                                     [](double v, const Breakpoint& b) { return v < b.ratio; });
    if (it == curve.breakpoints.begin()) return 0.0;
    return std::prev(it)->fraction;
}

std::string_view to_string(Scale scale) { return scale == Scale::Log10 ? "LOG10" : "LINEAR"; }

Scale parse_scale(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "LOG10" || upper == "LOG") return Scale::Log10;
    if (upper == "LINEAR") return Scale::Linear;
    throw LookupError("unknown scale '" + std::string(text) + "' (expected LINEAR or LOG10)");
}

std::string profiles_csv(std::span<const ProfileCurve> curves, Scale scale) {
    std::ostringstream out;
    out << (scale == Scale::Log10 ? "model,ratio,log10_ratio,fraction\n" : "model,ratio,fraction\n");
    for (const auto& c : curves) {
        for (const auto& b : c.breakpoints) {
            out << c.model << ',' << format_double(b.ratio) << ',';
            if (scale == Scale::Log10) out << format_double(std::log10(b.ratio)) << ',';
            out << format_double(b.fraction) << '\n';
        }
    }
    return out.str();
}

namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

void check_curves(std::span<const ProfileCurve> curves) {
    if (curves.empty()) throw ValidationError("no profile curves to export");
    for (const auto& c : curves) {
        if (c.n_sims != curves.front().n_sims)
            throw ValidationError("profile curves disagree on the number of simulations");
    }
}

}  // namespace

std::string profiles_svg(std::span<const ProfileCurve> curves, Scale scale, const SvgOptions& options) {
    check_curves(curves);

    double max_ratio = 1.0;
    for (const auto& c : curves) {
        if (!c.breakpoints.empty()) max_ratio = std::max(max_ratio, c.breakpoints.back().ratio);
    }
    const auto axis = [scale](double ratio) { return scale == Scale::Log10 ? std::log10(ratio) : ratio; };
    const double x_lo = axis(1.0);
    double x_hi = axis(max_ratio);
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;

    const double left = 70, right = 170, top = 40, bottom = 60;
    const double plot_w = options.width - left - right;
    const double plot_h = options.height - top - bottom;
    const auto px = [&](double ratio) { return left + (axis(ratio) - x_lo) / (x_hi - x_lo) * plot_w; };
    const auto py = [&](double fraction) { return top + (1.0 - fraction) * plot_h; };
    const auto fmt = [](double v) { return format_fixed(v, 2); };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
        << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << options.width << "\" height=\"" << options.height
        << "\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
            << escape_xml(options.title) << "</text>\n";
    }

    // axes and grid
    svg << "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
    svg << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h) << "\"/>\n";
    svg << "</g>\n<g id=\"ticks\" fill=\"black\">\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = x_lo + (x_hi - x_lo) * i / kTicks;
        const double x = left + plot_w * i / kTicks;
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top + plot_h) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + plot_h + 18)
            << "\" text-anchor=\"middle\">" << format_fixed(xv, 2) << "</text>\n";
        const double yv = static_cast<double>(i) / kTicks;
        const double y = py(yv);
        svg << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left)
            << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
            << format_fixed(yv, 1) << "</text>\n";
    }
    svg << "</g>\n";
    const std::string x_label = !options.x_label.empty()
                                    ? options.x_label
                                    : (scale == Scale::Log10 ? "log10(performance ratio)" : "performance ratio");
    svg << "<text x=\"" << fmt(left + plot_w / 2) << "\" y=\"" << fmt(options.height - 15.0)
        << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << fmt(top + plot_h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">fraction of simulations</text>\n";

    // curves
    svg << "<g id=\"curves\" fill=\"none\" stroke-width=\"2\">\n";
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        std::vector<std::pair<double, double>> pts;
        double level = 0.0;
        if (c.breakpoints.empty() || c.breakpoints.front().ratio > 1.0) pts.emplace_back(1.0, 0.0);
        for (const auto& b : c.breakpoints) {
            if (!pts.empty()) pts.emplace_back(b.ratio, level);
            pts.emplace_back(b.ratio, b.fraction);
            level = b.fraction;
        }
        const double end_ratio = scale == Scale::Log10 ? std::pow(10.0, x_hi) : x_hi;
        pts.emplace_back(end_ratio, level);

        svg << "<polyline data-model=\"" << escape_xml(c.model) << "\" stroke=\""
            << kPalette[ci % kPalette.size()] << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) svg << ' ';
            svg << fmt(px(pts[i].first)) << ',' << fmt(py(pts[i].second));
        }
        svg << "\"/>\n";
    }
    svg << "</g>\n";

    // legend
    svg << "<g id=\"legend\">\n";
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const double y = top + 10 + 20.0 * static_cast<double>(ci);
        const double x = left + plot_w + 15;
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 25) << "\" y2=\""
            << fmt(y) << "\" stroke=\"" << kPalette[ci % kPalette.size()] << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt(x + 32) << "\" y=\"" << fmt(y + 4) << "\">" << escape_xml(curves[ci].model)
            << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void export_profiles(std::span<const ProfileCurve> curves, Scale scale, const std::string& stem,
                     const SvgOptions& options) {
    check_curves(curves);
    const auto write = [](const std::string& path, const std::string& body) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path);
        out << body;
        if (!out) throw IoError("write failure on " + path);
    };
    write(stem + ".csv", profiles_csv(curves, scale));
    write(stem + ".svg", profiles_svg(curves, scale, options));
}

}  // namespace causalbench
