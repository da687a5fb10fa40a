#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causalbench/metrics.hpp"

namespace causalbench {

/// Sentinel for a model that cannot be expressed as a finite multiple of the
/// row best (positive error where the best model scored exactly 0). Behaves as
/// +infinity and is never counted by a profile.
inline constexpr double kFailedRatio = std::numeric_limits<double>::infinity();

inline bool is_failed(double ratio) noexcept { return ratio == kFailedRatio; }

/// Per-simulation performance ratios, same shape and ordering as the source
/// ErrorMatrix.
struct RatioMatrix {
    std::vector<std::string> models;
    std::vector<long long> sims;
    std::vector<double> values;  // row-major, >= 1 or kFailedRatio

    std::size_t n_sims() const noexcept { return sims.size(); }
    std::size_t n_models() const noexcept { return models.size(); }
    double at(std::size_t sim, std::size_t model) const { return values[sim * models.size() + model]; }
};

RatioMatrix performance_ratios(const ErrorMatrix& errors);

struct Breakpoint {
    double ratio;
    double fraction;
};

/// Right-continuous step function p(a) = |{s : r_s <= a}| / n_sims.
struct ProfileCurve {
    std::string model;
    std::vector<Breakpoint> breakpoints;  // strictly increasing ratio
    std::size_t n_sims = 0;
};

ProfileCurve profile_curve(const RatioMatrix& ratios, std::string_view model);
std::vector<ProfileCurve> profile_curves(const RatioMatrix& ratios);

/// Throws DomainError when a < 1.
double profile_value(const ProfileCurve& curve, double a);

enum class Scale { Linear, Log10 };

std::string_view to_string(Scale scale);
Scale parse_scale(std::string_view text);

/// Step-point table: `model,ratio[,log10_ratio],fraction`, one row per breakpoint.
std::string profiles_csv(std::span<const ProfileCurve> curves, Scale scale);

struct SvgOptions {
    std::string title;
    std::string x_label;  // empty selects a default per scale
    int width = 720;
    int height = 480;
};

/// Static SVG 1.1 document drawing each curve as an exact step polyline over
/// x in [1, max finite ratio].
std::string profiles_svg(std::span<const ProfileCurve> curves, Scale scale,
                         const SvgOptions& options = {});

/// Writes `<stem>.csv` and `<stem>.svg`. Curves must be non-empty and share n_sims.
void export_profiles(std::span<const ProfileCurve> curves, Scale scale, const std::string& stem,
                     const SvgOptions& options = {});

}  // namespace causalbench
