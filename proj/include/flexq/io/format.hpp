#ifndef FLEXQ_IO_FORMAT_HPP
#define FLEXQ_IO_FORMAT_HPP

#include <cstdio>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace flexq::io {

/// 12 significant digits, trailing zeros kept ("0.200000000000").
inline std::string format_number(double x) {
    if (x == 0.0)
        x = 0.0; // drop negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.12g", x);
    return buf;
}

/// Fixed-point with a given number of decimals (SVG coordinates).
inline std::string format_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}

/// RFC 4180 field quoting.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_row(const std::vector<std::string> &fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            line += ',';
        line += csv_field(fields[i]);
    }
    line += "\r\n";
    return line;
}

/// Parses one RFC 4180 record (without its line terminator).
inline std::vector<std::string> parse_csv_record(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

} // namespace flexq::io

#endif
