#include "incomesim/pid.hpp"

#include "incomesim/csv.hpp"

namespace incomesim {

const char* units_name(income_units u) {
    switch (u) {
        case income_units::dimensionless: return "dimensionless";
        case income_units::current_dollars: return "current-dollars";
        case income_units::rescaled: return "rescaled";
    }
    return "?";
}

const char* normalization_name(normalization n) {
    switch (n) {
        case normalization::raw: return "raw";
        case normalization::per_person: return "per-person";
        case normalization::per_person_per_unit_income: return "per-person-per-unit-income";
    }
    return "?";
}

void binned_pid::validate() const {
    for (size_t i = 0; i < bins.size(); ++i) {
        const auto& b = bins[i];
        if (b.count < 0.0) throw data_error("binned pid: negative count in bin " + std::to_string(i));
        if (b.open()) {
            if (i + 1 != bins.size())
                throw data_error("binned pid: open bin must be the last bin");
            continue;
        }
        if (b.zero_mass()) {
            if (i != 0) throw data_error("binned pid: zero-width bin only allowed first");
            continue;
        }
        if (!(*b.upper > b.lower))
            throw data_error("binned pid: bin " + std::to_string(i) + " has upper <= lower");
        if (i > 0 && !bins[i - 1].zero_mass()) {
            const auto& prev = bins[i - 1];
            if (prev.open() || b.lower < *prev.upper)
                throw data_error("binned pid: bins overlap or are out of order at bin " +
                                 std::to_string(i));
        }
    }
}

double binned_pid::total_count() const {
    double t = 0.0;
    for (const auto& b : bins) t += b.count;
    return t;
}

binned_pid load_binned(const std::string& path, income_units units) {
    auto t = csv::read_file(path);
    if (t.header != std::vector<std::string>{"lower", "upper", "count", "mean_income"})
        throw data_error(path + ": header does not match pid.csv schema");
    binned_pid pid;
    pid.units = units;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        auto cells = t.rows[r];
        long ln = t.line_numbers[r];
        if (cells.size() == 3) cells.push_back("");  // absent trailing mean
        if (cells.size() != 4)
            throw data_error(path + ":" + std::to_string(ln) + ": expected 4 fields");
        income_bin b;
        b.lower = csv::parse_double(cells[0], path, ln);
        if (!cells[1].empty()) b.upper = csv::parse_double(cells[1], path, ln);
        b.count = csv::parse_double(cells[2], path, ln);
        if (b.count < 0.0) throw data_error(path + ":" + std::to_string(ln) + ": negative count");
        if (!cells[3].empty()) b.mean_income = csv::parse_double(cells[3], path, ln);
        pid.bins.push_back(b);
    }
    try {
        pid.validate();
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
    return pid;
}

void save_binned(const binned_pid& pid, const std::string& path) {
    csv::writer w(path);
    w.row({"lower", "upper", "count", "mean_income"});
    for (const auto& b : pid.bins)
        w.row({csv::fmt(b.lower), b.upper ? csv::fmt(*b.upper) : "", csv::fmt(b.count),
               b.mean_income ? csv::fmt(*b.mean_income) : ""});
}

}  // namespace incomesim
