#pragma once

// Slow reference implementations used to cross-check the library.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

namespace causalbench::oracle {

using Float50 = boost::multiprecision::cpp_bin_float_50;
using Rational = boost::multiprecision::cpp_rational;

/// Chi-square upper tail Q(dof/2, x/2) from the lower-gamma power series
/// P(a, y) = y^a e^-y / Gamma(a+1) * sum_n y^n / ((a+1)...(a+n)), in 50 digits.
inline double chi_square_sf(double x, int dof) {
    if (x <= 0.0) return 1.0;
    const Float50 a = Float50(dof) / 2;
    const Float50 y = Float50(x) / 2;
    Float50 term = 1, sum = 1;
    for (int n = 1; n < 100000; ++n) {
        term *= y / (a + n);
        sum += term;
        if (term < sum * Float50("1e-45")) break;
    }
    const Float50 p = sum * exp(a * log(y) - y - boost::math::lgamma(a + 1));
    return static_cast<double>(Float50(1) - p);
}

/// |ATE error| and PEHE straight from the definitions, in 50 digits.
inline double ate_error(const std::vector<double>& y0, const std::vector<double>& y1, const std::vector<double>& y0_hat,
                        const std::vector<double>& y1_hat) {
    Float50 true_sum = 0, hat_sum = 0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        true_sum += Float50(y1[i]) - Float50(y0[i]);
        hat_sum += Float50(y1_hat[i]) - Float50(y0_hat[i]);
    }
    const Float50 n = static_cast<long long>(y0.size());
    return static_cast<double>(abs(hat_sum / n - true_sum / n));
}

inline double pehe(const std::vector<double>& y0, const std::vector<double>& y1, const std::vector<double>& y0_hat,
                   const std::vector<double>& y1_hat) {
    Float50 sum = 0;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        const Float50 d = (Float50(y1_hat[i]) - Float50(y0_hat[i])) - (Float50(y1[i]) - Float50(y0[i]));
        sum += d * d;
    }
    return static_cast<double>(sum / static_cast<long long>(y0.size()));
}

/// Friedman statistic with exact rational ranks. `values` is n x k row-major.
inline double friedman_statistic(const std::vector<double>& values, std::size_t n, std::size_t k) {
    std::vector<Rational> rank_sum(k, Rational(0));
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t j = 0; j < k; ++j) {
            const double v = values[s * k + j];
            long long less = 0, equal = 0;
            for (std::size_t l = 0; l < k; ++l) {
                if (values[s * k + l] < v) ++less;
                else if (values[s * k + l] == v) ++equal;
            }
            // positions less+1 .. less+equal, averaged
            rank_sum[j] += Rational(2 * less + equal + 1, 2);
        }
    }
    Rational sum_sq(0);
    const Rational nn(static_cast<long long>(n));
    const Rational kk(static_cast<long long>(k));
    for (const auto& r : rank_sum) {
        const Rational avg = r / nn;
        sum_sq += avg * avg;
    }
    const Rational f = Rational(12) * nn / (kk * (kk + 1)) * (sum_sq - kk * (kk + 1) * (kk + 1) / 4);
    return static_cast<double>(f);
}

/// Lexicographic 0-based pair list for k models.
inline std::vector<std::pair<int, int>> pairs(int k) {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) out.emplace_back(a, b);
    return out;
}

/// All subsets of hypotheses (as bit masks) that are closed under
/// transitivity, i.e. the pair sets of an equivalence relation.
inline std::vector<std::uint64_t> exhaustive_masks(int k) {
    const auto ps = pairs(k);
    const int m = static_cast<int>(ps.size());
    std::vector<std::vector<int>> id(k, std::vector<int>(k, -1));
    for (int h = 0; h < m; ++h) {
        id[ps[h].first][ps[h].second] = h;
        id[ps[h].second][ps[h].first] = h;
    }
    std::vector<std::uint64_t> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        bool closed = true;
        for (int a = 0; a < k && closed; ++a)
            for (int b = 0; b < k && closed; ++b)
                for (int c = 0; c < k && closed; ++c) {
                    if (a == b || b == c || a == c) continue;
                    if ((mask >> id[a][b] & 1) && (mask >> id[b][c] & 1) && !(mask >> id[a][c] & 1)) closed = false;
                }
        if (closed) out.push_back(mask);
    }
    return out;
}

/// min(1, max over exhaustive I containing i of |I| * min_{j in I} p_j).
inline std::vector<double> bergmann_hommel_apv(const std::vector<double>& p, const std::vector<std::uint64_t>& masks) {
    std::vector<double> apv(p.size(), 0.0);
    for (const auto mask : masks) {
        if (mask == 0) continue;
        double min_p = 1.0;
        int size = 0;
        for (std::size_t h = 0; h < p.size(); ++h)
            if (mask >> h & 1) {
                min_p = std::min(min_p, p[h]);
                ++size;
            }
        for (std::size_t h = 0; h < p.size(); ++h)
            if (mask >> h & 1) apv[h] = std::max(apv[h], size * min_p);
    }
    for (auto& a : apv) a = std::min(a, 1.0);
    return apv;
}

/// Holm step-down adjusted p-values.
inline std::vector<double> holm_apv(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<double> out(m);
    double running = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        running = std::max(running, std::min(1.0, static_cast<double>(m - r) * p[order[r]]));
        out[order[r]] = running;
    }
    return out;
}

inline std::vector<double> bonferroni_apv(const std::vector<double>& p) {
    std::vector<double> out;
    for (const double v : p) out.push_back(std::min(1.0, static_cast<double>(p.size()) * v));
    return out;
}

}  // namespace causalbench::oracle
