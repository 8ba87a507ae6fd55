#pragma once

// Tabular datasets and their CSV form: header row, comma separator, LF line endings,
// numbers at 17 significant digits so a write/read cycle is bit-exact.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bkc/numerics.hpp"

namespace bkc::io {

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> r) {
        if (r.size() != columns.size()) throw std::invalid_argument("table row width does not match header");
        rows.push_back(std::move(r));
    }
    void add_numbers(const std::vector<double>& r) {
        std::vector<std::string> cells;
        cells.reserve(r.size());
        for (double v : r) cells.push_back(format_number(v));
        add_row(std::move(cells));
    }
    double number(std::size_t row, std::size_t col) const { return parse_number(rows.at(row).at(col)); }
    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("no column '" + name + "'");
    }
};

inline std::string to_csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].find_first_of(",\n\"") != std::string::npos)
                throw std::invalid_argument("csv cell contains a separator: '" + cells[i] + "'");
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(t.columns);
    for (const auto& r : t.rows) line(r);
    return out;
}

inline Table from_csv(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (header) {
            t.columns = std::move(cells);
            header = false;
        } else {
            t.add_row(std::move(cells));
        }
    }
    if (header) throw std::invalid_argument("csv: missing header row");
    return t;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Quadrature labels in basis order (x1..xN, p1..pN).
inline std::vector<std::string> quadrature_labels(int n) {
    std::vector<std::string> out;
    for (const char* q : {"x", "p"})
        for (int j = 1; j <= n; ++j) out.push_back(q + std::to_string(j));
    return out;
}

// Complex matrix as a table: first column is the row label, then one _re/_im pair per column.
inline Table complex_matrix_table(const CMat& m, const std::vector<std::string>& row_labels,
                                  const std::vector<std::string>& col_labels) {
    if (row_labels.size() != static_cast<std::size_t>(m.rows()) ||
        col_labels.size() != static_cast<std::size_t>(m.cols()))
        throw std::invalid_argument("complex_matrix_table: label count mismatch");
    Table t;
    t.columns.push_back("row");
    for (const auto& c : col_labels) {
        t.columns.push_back(c + "_re");
        t.columns.push_back(c + "_im");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> r{row_labels[static_cast<std::size_t>(i)]};
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            r.push_back(format_number(m(i, j).real()));
            r.push_back(format_number(m(i, j).imag()));
        }
        t.add_row(std::move(r));
    }
    return t;
}

inline Table real_matrix_table(const RMat& m, const std::vector<std::string>& row_labels,
                               const std::vector<std::string>& col_labels) {
    if (row_labels.size() != static_cast<std::size_t>(m.rows()) ||
        col_labels.size() != static_cast<std::size_t>(m.cols()))
        throw std::invalid_argument("real_matrix_table: label count mismatch");
    Table t;
    t.columns.push_back("row");
    t.columns.insert(t.columns.end(), col_labels.begin(), col_labels.end());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> r{row_labels[static_cast<std::size_t>(i)]};
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(format_number(m(i, j)));
        t.add_row(std::move(r));
    }
    return t;
}

// Inverse of complex_matrix_table.
inline CMat complex_matrix_from_table(const Table& t) {
    if (t.columns.empty() || (t.columns.size() - 1) % 2 != 0)
        throw std::invalid_argument("complex table needs a label column and _re/_im pairs");
    const auto cols = static_cast<Eigen::Index>((t.columns.size() - 1) / 2);
    CMat m(static_cast<Eigen::Index>(t.rows.size()), cols);
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const auto c = static_cast<std::size_t>(1 + 2 * j);
            m(static_cast<Eigen::Index>(i), j) = cd(t.number(i, c), t.number(i, c + 1));
        }
    return m;
}

} // namespace bkc::io
