#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace spinbath {

// Comma-separated table with one header row. Values are written with 17 significant digits so a
// re-parse reproduces every double exactly; missing values are written as NaN.
class OutputTable {
public:
    explicit OutputTable(std::vector<std::string> header, bool first_column_increasing = false)
        : header_(std::move(header)), increasing_(first_column_increasing) {
        if (header_.empty()) throw std::invalid_argument("OutputTable: empty header");
    }

    void add_row(std::vector<double> row) {
        if (row.size() != header_.size()) throw std::invalid_argument("OutputTable: row width differs from header");
        if (increasing_ && !rows_.empty() && !(row[0] > rows_.back()[0]))
            throw std::invalid_argument("OutputTable: first column must increase strictly");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<double>>& rows() const { return rows_; }

    void write(std::ostream& os) const {
        for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
        os << '\n';
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format(row[i]);
            os << '\n';
        }
    }

    static std::string format(double v) {
        if (std::isnan(v)) return "NaN";
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
        return std::string(buf, res.ptr);
    }

    static double parse(const std::string& s) {
        if (s == "NaN" || s == "nan") return std::nan("");
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            throw std::invalid_argument("OutputTable: cannot parse '" + s + "'");
        return v;
    }

    static OutputTable read(std::istream& is) {
        std::string line;
        if (!std::getline(is, line)) throw std::invalid_argument("OutputTable: missing header");
        OutputTable t(split(line));
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::vector<double> row;
            for (const auto& cell : split(line)) row.push_back(parse(cell));
            t.add_row(std::move(row));
        }
        return t;
    }

private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
    bool increasing_;
};

}  // namespace spinbath
