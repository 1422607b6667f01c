#include "incomesim/economy.hpp"

#include <stdexcept>

#include "incomesim/csv.hpp"

namespace incomesim::economy {

const char* kind_name(factor_kind k) {
    switch (k) {
        case factor_kind::nominal_total: return "nom_total";
        case factor_kind::real_total: return "real_total";
        case factor_kind::nominal_per_capita: return "nom_pc";
        case factor_kind::real_per_capita: return "real_pc";
        case factor_kind::nominal_per_capita_16: return "nom_pc16";
        case factor_kind::real_per_capita_16: return "real_pc16";
    }
    return "?";
}

factor_kind nominal_counterpart(factor_kind k) {
    switch (k) {
        case factor_kind::real_total: return factor_kind::nominal_total;
        case factor_kind::real_per_capita: return factor_kind::nominal_per_capita;
        case factor_kind::real_per_capita_16: return factor_kind::nominal_per_capita_16;
        default: return k;
    }
}

growth_series::growth_series(std::vector<growth_row> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw data_error("growth series: no rows");
    for (size_t i = 0; i < rows_.size(); ++i) {
        if (i > 0 && rows_[i].year != rows_[i - 1].year + 1)
            throw data_error("growth series: gap at " + std::to_string(rows_[i - 1].year + 1));
        for (double f : rows_[i].factors)
            if (!(f > 0.0))
                throw data_error("growth series: non-positive factor in year " +
                                 std::to_string(rows_[i].year));
    }
}

const growth_row& growth_series::row(int year) const {
    if (!contains(year))
        throw std::out_of_range("growth series: year " + std::to_string(year) + " out of range " +
                                std::to_string(first_year()) + ".." + std::to_string(last_year()));
    return rows_[static_cast<size_t>(year - first_year())];
}

growth_series load_growth_series(const std::string& path) {
    auto t = csv::read_file(path);
    const std::vector<std::string> expect = {"year",    "nom_total", "real_total", "nom_pc",
                                             "real_pc", "nom_pc16",  "real_pc16"};
    if (t.header != expect) throw data_error(path + ": header does not match gdp.csv schema");
    if (t.rows.empty()) throw data_error(path + ": no rows");
    std::vector<growth_row> rows;
    rows.reserve(t.rows.size());
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& cells = t.rows[r];
        long ln = t.line_numbers[r];
        if (cells.size() != 7)
            throw data_error(path + ":" + std::to_string(ln) + ": expected 7 fields, got " +
                             std::to_string(cells.size()));
        growth_row row;
        row.year = static_cast<int>(csv::parse_int(cells[0], path, ln));
        for (int c = 0; c < 6; ++c) {
            double f = csv::parse_double(cells[static_cast<size_t>(c) + 1], path, ln);
            if (!(f > 0.0))
                throw data_error(path + ":" + std::to_string(ln) + ": non-positive factor " +
                                 cells[static_cast<size_t>(c) + 1]);
            row.factors[static_cast<size_t>(c)] = f;
        }
        if (!rows.empty() && row.year != rows.back().year + 1)
            throw data_error(path + ":" + std::to_string(ln) + ": gap at " +
                             std::to_string(rows.back().year + 1));
        rows.push_back(row);
    }
    return growth_series(std::move(rows));
}

void save_growth_series(const growth_series& s, const std::string& path) {
    csv::writer w(path);
    w.row({"year", "nom_total", "real_total", "nom_pc", "real_pc", "nom_pc16", "real_pc16"});
    for (const auto& r : s.rows()) {
        std::vector<std::string> cells{std::to_string(r.year)};
        for (double f : r.factors) cells.push_back(csv::fmt(f));
        w.row(cells);
    }
}

double cumulative_factor(const growth_series& s, factor_kind kind, int first_row_year,
                         int last_row_year) {
    if (first_row_year > last_row_year)
        throw std::invalid_argument("cumulative_factor: first_row_year > last_row_year");
    if (!s.contains(first_row_year) || !s.contains(last_row_year))
        throw std::out_of_range("cumulative_factor: range " + std::to_string(first_row_year) +
                                ".." + std::to_string(last_row_year) + " not covered by series " +
                                std::to_string(s.first_year()) + ".." +
                                std::to_string(s.last_year()));
    long double p = 1.0L;
    for (int y = first_row_year; y <= last_row_year; ++y) p *= s.row(y).factor(kind);
    return static_cast<double>(p);
}

double deflator_factor(const growth_series& s, deflator_scope scope, int first_row_year,
                       int last_row_year) {
    factor_kind nom, real;
    switch (scope) {
        case deflator_scope::total:
            nom = factor_kind::nominal_total;
            real = factor_kind::real_total;
            break;
        case deflator_scope::per_capita:
            nom = factor_kind::nominal_per_capita;
            real = factor_kind::real_per_capita;
            break;
        default:
            nom = factor_kind::nominal_per_capita_16;
            real = factor_kind::real_per_capita_16;
            break;
    }
    return cumulative_factor(s, nom, first_row_year, last_row_year) /
           cumulative_factor(s, real, first_row_year, last_row_year);
}

growth_series extend_series(const growth_series& s, double growth_rate, int until_year,
                            double deflator_rate) {
    if (growth_rate <= -1.0) throw std::invalid_argument("extend_series: growth_rate <= -1");
    auto rows = s.rows();
    double real = 1.0 + growth_rate;
    double nom = real * (1.0 + deflator_rate);
    for (int y = s.last_year() + 1; y <= until_year; ++y)
        rows.push_back(growth_row{y, {nom, real, nom, real, nom, real}});
    return growth_series(std::move(rows));
}

}  // namespace incomesim::economy
