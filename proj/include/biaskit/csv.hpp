#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "biaskit/dataset.hpp"
#include "biaskit/schema.hpp"

namespace biaskit {

/// CSV ingestion failure. Carries the 1-based line number and the column name
/// the failure was detected at; both also appear in what().
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& column,
               const std::string& detail)
        : std::runtime_error(file + ": line " + std::to_string(line) + ", column '" + column +
                             "': " + detail),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    const std::string& column() const { return column_; }

private:
    std::size_t line_;
    std::string column_;
};

namespace detail {

inline std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    fields.push_back(field);
    return fields;
}

inline std::optional<double> parse_finite_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace detail

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

inline Dataset load_csv(std::istream& in, const FeatureSchema& schema,
                        const std::string& source_name = "<stream>") {
    schema.validate();

    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source_name, 1, "<header>", "file is empty, header expected");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> header = detail::split_csv_record(line);

    // Position of every schema column in the file; file column order is free.
    std::vector<std::size_t> field_of_column(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& name = schema.columns[c].name;
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ParseError(source_name, 1, name, "column missing from header");
        }
        field_of_column[c] = static_cast<std::size_t>(it - header.begin());
    }

    Dataset ds;
    ds.schema = schema;
    const bool has_label = schema.label_column.has_value();

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::istream::traits_type::eof()) break;

        const std::vector<std::string> fields = detail::split_csv_record(line);
        if (fields.size() != header.size()) {
            // Name the first schema column whose value slot is affected.
            std::string column = header.empty() ? "<row>" : header.back();
            for (std::size_t c = 0; c < schema.columns.size(); ++c) {
                if (field_of_column[c] >= fields.size()) {
                    column = schema.columns[c].name;
                    break;
                }
            }
            throw ParseError(source_name, line_no, column,
                             "ragged row: expected " + std::to_string(header.size()) +
                                 " fields, found " + std::to_string(fields.size()));
        }

        std::vector<double> row;
        row.reserve(ds.feature_count());
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            const Column& col = schema.columns[c];
            const std::string& text = fields[field_of_column[c]];
            const bool is_label = has_label && col.name == *schema.label_column;

            if (col.kind == ColumnKind::continuous) {
                const auto value = detail::parse_finite_double(text);
                if (!value) {
                    throw ParseError(source_name, line_no, col.name,
                                     "cannot parse '" + text + "' as a finite number");
                }
                if (is_label) {
                    ds.labels.push_back(text);
                } else {
                    row.push_back(*value);
                }
            } else {
                const auto it = std::find(col.categories.begin(), col.categories.end(), text);
                if (it == col.categories.end()) {
                    throw ParseError(source_name, line_no, col.name,
                                     "category '" + text + "' not in schema");
                }
                if (is_label) {
                    ds.labels.push_back(text);
                } else {
                    row.push_back(static_cast<double>(it - col.categories.begin()));
                }
            }
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

inline Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path.string());
    }
    return load_csv(in, schema, path.string());
}

/// Writes all schema columns (label column included) in schema order.
/// Continuous cells use the shortest round-trip representation, so a reload
/// with the same schema reproduces the values exactly.
inline void save_csv(const Dataset& ds, std::ostream& out) {
    const auto features = ds.schema.feature_columns();
    for (std::size_t c = 0; c < ds.schema.columns.size(); ++c) {
        if (c > 0) out << ',';
        out << ds.schema.columns[c].name;
    }
    out << '\n';

    for (std::size_t r = 0; r < ds.size(); ++r) {
        std::size_t f = 0;
        for (std::size_t c = 0; c < ds.schema.columns.size(); ++c) {
            if (c > 0) out << ',';
            const Column& col = ds.schema.columns[c];
            if (ds.schema.label_column && col.name == *ds.schema.label_column) {
                out << ds.labels.at(r);
                continue;
            }
            const double v = ds.rows[r][f++];
            if (col.kind == ColumnKind::continuous) {
                out << format_double(v);
            } else {
                out << col.categories.at(static_cast<std::size_t>(v));
            }
        }
        out << '\n';
    }
}

inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path.string());
    }
    save_csv(ds, out);
}

/// One-column CSV, rows aligned with the dataset the weights refer to.
inline void write_weights_csv(const std::vector<double>& weights, std::ostream& out) {
    out << "weight\n";
    for (double w : weights) out << format_double(w) << '\n';
}

inline void write_weights_csv(const std::vector<double>& weights,
                              const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open file for writing: " + path.string());
    }
    write_weights_csv(weights, out);
}

}  // namespace biaskit
