#pragma once

#include <array>
#include <string>
#include <vector>

namespace incomesim::economy {

/// The six growth-factor variants of the annual GDP table. Each row stores
/// year-over-year ratios (year y relative to year y-1), so the product of
/// rows a+1..b is the total growth between years a and b.
enum class factor_kind {
    nominal_total,
    real_total,
    nominal_per_capita,
    real_per_capita,
    nominal_per_capita_16,
    real_per_capita_16,
};

constexpr std::array<factor_kind, 6> all_kinds = {
    factor_kind::nominal_total,        factor_kind::real_total,
    factor_kind::nominal_per_capita,   factor_kind::real_per_capita,
    factor_kind::nominal_per_capita_16, factor_kind::real_per_capita_16,
};

const char* kind_name(factor_kind k);

/// Scope selector for deflator_factor.
enum class deflator_scope { total, per_capita, per_capita_16 };

/// The nominal column that pairs with a real driver column (identity for
/// nominal kinds); used for dollar scaling.
factor_kind nominal_counterpart(factor_kind k);

struct growth_row {
    int year;
    std::array<double, 6> factors;  // indexed by factor_kind

    double factor(factor_kind k) const { return factors[static_cast<size_t>(k)]; }
};

/// Annual growth-factor series. Years strictly consecutive, all factors
/// positive. Immutable after load; concurrent reads are safe.
class growth_series {
  public:
    explicit growth_series(std::vector<growth_row> rows);

    int first_year() const { return rows_.front().year; }
    int last_year() const { return rows_.back().year; }
    size_t size() const { return rows_.size(); }
    const std::vector<growth_row>& rows() const { return rows_; }

    bool contains(int year) const { return year >= first_year() && year <= last_year(); }
    const growth_row& row(int year) const;

  private:
    std::vector<growth_row> rows_;
};

/// Reads the `gdp.csv` schema:
///   year,nom_total,real_total,nom_pc,real_pc,nom_pc16,real_pc16
growth_series load_growth_series(const std::string& path);

void save_growth_series(const growth_series& s, const std::string& path);

/// Product of the selected factors for rows first_row_year..last_row_year
/// inclusive. Row y expresses year y relative to year y-1, so this is the
/// total growth between years first_row_year-1 and last_row_year.
/// Accumulated in extended precision.
double cumulative_factor(const growth_series& s, factor_kind kind, int first_row_year,
                         int last_row_year);

/// cumulative(nominal)/cumulative(real) over the same rows, for the chosen scope.
double deflator_factor(const growth_series& s, deflator_scope scope, int first_row_year,
                       int last_row_year);

/// Returns a copy of `s` extended to `until_year` with constant factors:
/// all real columns = 1+growth_rate, nominal columns = (1+growth_rate)*(1+deflator_rate).
growth_series extend_series(const growth_series& s, double growth_rate, int until_year,
                            double deflator_rate = 0.0);

}  // namespace incomesim::economy
