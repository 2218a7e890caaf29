#include "hsi/textio.hpp"

#include <array>
#include <cctype>
#include <cstdio>

#include "hsi/error.hpp"

namespace hsi {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), r.ptr);
}

std::string format_fixed(double v, int decimals) {
    std::array<char, 64> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.*f", decimals, v);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

double parse_double(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    double v{};
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc{} || r.ptr != t.data() + t.size())
        throw Error("expected a number for " + std::string(what) + ", got '" +
                    std::string(t) + "'");
    return v;
}

std::size_t parse_size(std::string_view text, std::string_view what) {
    const auto t = trim(text);
    std::size_t v{};
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc{} || r.ptr != t.data() + t.size())
        throw Error("expected a nonnegative integer for " + std::string(what) +
                    ", got '" + std::string(t) + "'");
    return v;
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n\v\f";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace hsi
