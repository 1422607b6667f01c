#pragma once

#include <optional>
#include <string>
#include <vector>

namespace incomesim {

enum class income_units { dimensionless, current_dollars, rescaled };

const char* units_name(income_units u);

enum class normalization { raw, per_person, per_person_per_unit_income };

const char* normalization_name(normalization n);

/// One income bin. `upper` empty means the open-ended top bin. A zero-width
/// [0,0] bin is permitted only as the first bin and carries the people with
/// exactly zero income.
struct income_bin {
    double lower = 0.0;
    std::optional<double> upper;
    double count = 0.0;
    std::optional<double> mean_income;

    bool open() const { return !upper.has_value(); }
    bool zero_mass() const { return upper.has_value() && *upper == lower && lower == 0.0; }
    double width() const { return open() ? 0.0 : *upper - lower; }
    double center() const { return (lower + *upper) / 2.0; }
};

/// Income-bin table shared by the synthetic and empirical paths.
/// Bins ordered, non-overlapping; at most one open bin and only as the last.
struct binned_pid {
    std::vector<income_bin> bins;
    income_units units = income_units::current_dollars;
    normalization norm = normalization::raw;  // in-memory only, not serialized

    void validate() const;  // throws data_error on invariant violations
    double total_count() const;
    bool has_open() const { return !bins.empty() && bins.back().open(); }
};

/// Reads/writes the `pid.csv` schema: lower,upper,count,mean_income
/// (open upper and missing mean serialized as empty fields).
binned_pid load_binned(const std::string& path,
                       income_units units = income_units::current_dollars);
void save_binned(const binned_pid& pid, const std::string& path);

}  // namespace incomesim
