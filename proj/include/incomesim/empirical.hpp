#pragma once

#include <optional>
#include <string>
#include <vector>

#include "incomesim/pid.hpp"

namespace incomesim::empirical {

struct density_point {
    double income;   // effective bin income
    double density;  // persons per income unit
    double width;    // source bin width
};

/// Per-income population density derived from a binned table.
struct density_pid {
    std::vector<density_point> points;
    normalization norm = normalization::raw;
    income_units units = income_units::current_dollars;

    void validate() const;
};

enum class bin_income_mode { center, reported_mean, offset_corrected };
enum class open_bin_policy { drop, error };

/// Average offset of reported bin means from bin centers, in bin widths.
inline constexpr double mean_offset = -0.12;

/// Effective income coordinate of a closed bin under the chosen mode.
/// offset_corrected: center + mean_offset*width. Throws on an open bin and
/// on reported_mean without a recorded mean.
double effective_bin_income(const income_bin& bin, bin_income_mode mode);

/// count/width per bin at the effective bin income. The open bin is dropped
/// or rejected per policy; a leading [0,0] zero-mass bin carries no density
/// and is dropped from the points (its count still participates in any
/// per-person normalization done on the binned table).
density_pid to_density(const binned_pid& pid, open_bin_policy open_bin = open_bin_policy::drop,
                       bin_income_mode mode = bin_income_mode::center);

/// Counts divided by the total count (all bins, including zero-mass and open).
/// Rejects, via the normalization tag, a table that is already per-person.
binned_pid per_person(const binned_pid& pid);

/// Income axis divided by `factor`, densities multiplied by it: mass
/// conserving. Both overloads tag the result as rescaled units.
binned_pid rescale_income(const binned_pid& pid, double factor);
density_pid rescale_income(const density_pid& d, double factor);

enum class interp_mode { automatic, linear, log_log };

/// Density of a curve at income x by interpolation between points;
/// std::nullopt outside the curve's support. `automatic` uses log-log when
/// every participating value is positive, linear otherwise.
std::optional<double> density_at(const density_pid& curve, double x,
                                 interp_mode mode = interp_mode::automatic);

struct collapse_result {
    double sup;  // max |difference| over the union grid in the common support
    double l2;   // root mean square difference over the same grid
};

/// Distance between per-person density curves after interpolation onto the
/// union grid restricted to the common support; for more than two curves the
/// maximum over pairs. Symmetric in the arguments.
collapse_result collapse_distance(const std::vector<density_pid>& curves,
                                  interp_mode mode = interp_mode::automatic);

void save_density(const density_pid& d, const std::string& path);

}  // namespace incomesim::empirical
