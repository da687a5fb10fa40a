#pragma once

#include <cmath>
#include <span>
#include <string>

namespace causalbench {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_mean(std::span<const double> xs) noexcept {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value() / static_cast<double>(xs.size());
}

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double x, int decimals);

}  // namespace causalbench
