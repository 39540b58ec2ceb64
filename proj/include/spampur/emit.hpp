#pragma once

// Record tables and their CSV / JSON serialization. Output is a pure function
// of the table, so reruns are byte-identical.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "spampur/error.hpp"

namespace spampur {

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> notes;   ///< written as "# ..." lines ahead of a CSV header
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) {
            throw Error("row has " + std::to_string(row.size()) + " cells, table has " +
                        std::to_string(columns.size()) + " columns");
        }
        rows.push_back(std::move(row));
    }
};

enum class Format { csv, json };

class IoError : public Error {
public:
    using Error::Error;
};

/// 12 significant digits, "inf" / "-inf" / "nan" for non-finite values.
inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

/// Fixed-point rendering with `decimals` places, as tables print their values.
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    if (std::string(buf).find_first_not_of("-0.") == std::string::npos && buf[0] == '-') {
        return buf + 1;
    }
    return buf;
}

/// Scientific rendering with `digits` mantissa decimals, e.g. 1.323e+09.
inline std::string format_sci(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits, v);
    return buf;
}

namespace detail {

inline std::string csv_field(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        return format_number(*d);
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    if (const auto* b = std::get_if<bool>(&c)) {
        return *b ? "true" : "false";
    }
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    return out + "\"";
}

inline std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(ch));
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out + "\"";
}

inline std::string json_value(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        // JSON has no non-finite numbers
        return std::isfinite(*d) ? format_number(*d) : "null";
    }
    if (const auto* i = std::get_if<long long>(&c)) {
        return std::to_string(*i);
    }
    if (const auto* b = std::get_if<bool>(&c)) {
        return *b ? "true" : "false";
    }
    return json_string(std::get<std::string>(c));
}

} // namespace detail

inline void write_csv(const Table& t, std::ostream& os) {
    for (const auto& note : t.notes) {
        os << "# " << note << '\n';
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << detail::csv_field(t.columns[i]);
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << detail::csv_field(row[i]);
        }
        os << '\n';
    }
}

/// Array of objects, keys in column order. Notes are not part of the JSON.
inline void write_json(const Table& t, std::ostream& os) {
    if (t.rows.empty()) {
        os << "[]\n";
        return;
    }
    os << "[\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << "  {";
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            os << (i ? ", " : "") << detail::json_string(t.columns[i]) << ": " << detail::json_value(t.rows[r][i]);
        }
        os << (r + 1 < t.rows.size() ? "},\n" : "}\n");
    }
    os << "]\n";
}

inline void emit(const Table& t, Format format, std::ostream& os) {
    if (format == Format::csv) {
        write_csv(t, os);
    } else {
        write_json(t, os);
    }
}

inline std::string emit_string(const Table& t, Format format) {
    std::ostringstream os;
    emit(t, format, os);
    return os.str();
}

/// Writes to `path` in binary mode (LF line endings on every platform).
inline void emit_file(const Table& t, Format format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    emit(t, format, out);
    out.flush();
    if (!out) {
        throw IoError("write to '" + path + "' failed");
    }
}

} // namespace spampur
