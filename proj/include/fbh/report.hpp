// Tabular reports serialised as RFC 4180 CSV or JSON.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fbh::report {

/// Empty (monostate) renders as an empty CSV field and JSON null.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Quotes a field when it contains a comma, quote, CR or LF; quotes are doubled.
inline std::string csv_escape(const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string to_text(const Cell& c)
{
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

inline nlohmann::ordered_json to_json(const Cell& c)
{
    struct Visitor {
        nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
        nlohmann::ordered_json operator()(bool b) const { return b; }
        nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
        nlohmann::ordered_json operator()(double d) const
        {
            // JSON has no literal for non-finite numbers.
            if (!std::isfinite(d)) return format_double(d);
            return d;
        }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns))
    {
        if (columns_.empty()) throw std::invalid_argument("Table: no columns");
    }

    void add_row(std::vector<Cell> row)
    {
        if (row.size() != columns_.size()) throw std::invalid_argument("Table: row width mismatch");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    /// Header line then one line per row, CRLF-terminated.
    void write_csv(std::ostream& os) const
    {
        auto line = [&](const auto& fields, auto render) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) os << ',';
                os << csv_escape(render(fields[i]));
            }
            os << "\r\n";
        };
        line(columns_, [](const std::string& s) { return s; });
        for (const auto& r : rows_) line(r, [](const Cell& c) { return to_text(c); });
    }

    /// {"columns": [...], "rows": [{column: value, ...}, ...]}
    nlohmann::ordered_json json() const
    {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& r : rows_) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = to_json(r[i]);
            rows.push_back(std::move(obj));
        }
        return {{"columns", columns_}, {"rows", std::move(rows)}};
    }

    void write_json(std::ostream& os) const { os << json().dump(2) << '\n'; }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

enum class Format { csv, json };

inline void write(const Table& t, Format f, std::ostream& os)
{
    if (f == Format::csv) t.write_csv(os);
    else t.write_json(os);
}

/// Checks that a JSON document has the shape produced by Table::json():
/// a string array of columns and rows whose keys are exactly those columns
/// in order, with scalar or null values.
inline bool matches_table_schema(const nlohmann::ordered_json& doc)
{
    if (!doc.is_object() || !doc.contains("columns") || !doc.contains("rows")) return false;
    const auto& cols = doc["columns"];
    if (!cols.is_array() || cols.empty()) return false;
    for (const auto& c : cols)
        if (!c.is_string()) return false;
    if (!doc["rows"].is_array()) return false;
    for (const auto& row : doc["rows"]) {
        if (!row.is_object() || row.size() != cols.size()) return false;
        std::size_t i = 0;
        for (auto it = row.begin(); it != row.end(); ++it, ++i) {
            if (it.key() != cols[i].get<std::string>()) return false;
            if (it.value().is_structured()) return false;
        }
    }
    return true;
}

} // namespace fbh::report
