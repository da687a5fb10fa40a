#include "causalbench/numeric.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace causalbench {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

std::string format_fixed(double x, int decimals) {
    std::array<char, 128> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                   std::chars_format::fixed, decimals);
    return std::string(buf.data(), end);
}

}  // namespace causalbench
