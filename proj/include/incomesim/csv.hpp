#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace incomesim {

// Thrown for anything wrong with input files or their contents.
// Messages carry the path and, where known, the 1-based line number.
class data_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace csv {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

struct table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // raw cells
    std::vector<long> line_numbers;              // source line of each row
};

inline table read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error(path + ": cannot open file");
    table t;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (lineno == 1 || t.header.empty()) {
            t.header = cells;
        } else {
            t.rows.push_back(cells);
            t.line_numbers.push_back(lineno);
        }
    }
    return t;
}

inline double parse_double(const std::string& cell, const std::string& path, long lineno) {
    try {
        size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw data_error(path + ":" + std::to_string(lineno) + ": malformed number '" + cell + "'");
    }
}

inline long parse_int(const std::string& cell, const std::string& path, long lineno) {
    try {
        size_t pos = 0;
        long v = std::stol(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw data_error(path + ":" + std::to_string(lineno) + ": malformed integer '" + cell + "'");
    }
}

// Fixed numeric formatting so identical inputs give byte-identical outputs.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class writer {
  public:
    explicit writer(const std::string& path) : out_(path) {
        if (!out_) throw data_error(path + ": cannot open for writing");
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    void close() { out_.close(); }

  private:
    std::ofstream out_;
};

}  // namespace csv
}  // namespace incomesim
