#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

namespace farmlens {

// Shortest round-trippable-enough rendering used in every CSV we emit.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// "# seed=7 preset=... version=farmlens/1" comment line heading every CSV.
inline void write_provenance(std::ostream& out, const std::map<std::string, std::string>& fields) {
    out << '#';
    for (const auto& [k, v] : fields) out << ' ' << k << '=' << v;
    out << '\n';
}

} // namespace farmlens
