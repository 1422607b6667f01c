#pragma once

#include <string>
#include <variant>
#include <vector>

#include "incomesim/empirical.hpp"
#include "incomesim/pid.hpp"
#include "incomesim/synthesis.hpp"

namespace incomesim::inequality {

/// Cumulative population share X vs cumulative income share Y, incomes
/// ascending; starts at (0,0), ends at (1,1), convex.
struct lorenz_curve {
    struct point {
        double x;
        double y;
    };
    std::vector<point> points;

    void validate() const;
};

/// Estimator conventions. A tail whose density falls as x^-(s+1) (standard
/// index s) is reported as k = s under `standard` and as k = s - 1 under
/// `paper`; the two differ by exactly one everywhere.
enum class convention { paper, standard };

const char* convention_name(convention c);

struct pareto_fit {
    double k;
    double x_m;
    convention conv;
};

struct open_bin_pareto {
    double k;  // standard-convention index of the tail density; must be > 1
    int sub_quantiles = 10;
};
struct open_bin_reported_mean {};
struct open_bin_drop {};
using open_bin_mode = std::variant<open_bin_pareto, open_bin_reported_mean, open_bin_drop>;

/// Lorenz curve of a binned table. Per-bin income mass = count * effective
/// bin income; an open bin under the pareto mode gets mass count*k*x_m/(k-1)
/// spread over `sub_quantiles` equal-population slices with exact
/// conditional means. Drop mode removes the open bin and renormalizes (a
/// warning, reported through `dropped_open`). Non-monotone effective bin
/// incomes are an error.
struct lorenz_result {
    lorenz_curve curve;
    bool dropped_open = false;
};
lorenz_result lorenz_from_bins(const binned_pid& pid, empirical::bin_income_mode income_mode,
                               const open_bin_mode& open_mode);

/// Gi = 1 - sum (X_i - X_{i-1}) (Y_{i-1} + Y_i).
double gini_trapezoid(const lorenz_curve& c);

struct exact_gini {
    double value;
    bool all_zero;  // every income was zero: value 0 by convention
};

/// Gini of a discrete weighted income list (exact Lorenz vertices).
exact_gini gini_exact(const std::vector<std::pair<double, double>>& income_weight);
exact_gini gini_exact(const synthesis::synthetic_population& pop);

/// Prepends a [0,0] zero-width bin holding `zero_count` people (merges into
/// an existing leading zero bin).
binned_pid with_zero_income_mass(const binned_pid& pid, double zero_count);

/// Pareto index from a tail threshold and the mean income above it.
/// paper: x_m/(x_av - x_m); standard: x_av/(x_av - x_m).
double pareto_k_from_mean(double x_m, double x_av, convention conv);

/// Pareto index from the least-squares slope s of log(density) vs
/// log(income): paper k = -s - 2, standard k = -s - 1.
double pareto_k_from_regression(const std::vector<empirical::density_point>& points,
                                convention conv);
double pareto_k_from_regression(const empirical::density_pid& density, double threshold,
                                convention conv);

/// Closed-form Gini of a pure Pareto law with standard index k: 1/(2k-1).
double pareto_gini_oracle(double k);

struct age_group_index {
    int age_lo;
    int age_hi;
    double k;  // paper-convention tail index (quoted as a negative slope
               // magnitude minus two; stored positive)
};

/// Measured tail indices by age group; k declines with age, so older groups
/// carry thicker tails.
const std::vector<age_group_index>& age_group_pareto_indices();

void save_lorenz(const lorenz_curve& c, const std::string& path);

}  // namespace incomesim::inequality
