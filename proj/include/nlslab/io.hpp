#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "nlslab/errors.hpp"
#include "vendor/json.hpp"

namespace nlslab {

/// Canonical number formatting for artifacts: 17 significant digits,
/// '.' decimal separator, locale independent.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Comma-separated table with a mandatory header row and LF line endings,
/// written byte-identically for identical inputs.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw config_error("cannot open for writing: " + path);
        columns_ = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_)
            throw config_error("csv row width does not match header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void row_numbers(const std::vector<double>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (double v : cells) s.push_back(format_number(v));
        row(s);
    }

  private:
    std::ofstream out_;
    std::size_t columns_;
};

inline void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace nlslab
