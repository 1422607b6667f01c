#pragma once

#include <map>
#include <string>
#include <vector>

#include "incomesim/demography.hpp"
#include "incomesim/economy.hpp"
#include "incomesim/pid.hpp"
#include "incomesim/trajectory.hpp"

namespace incomesim::calibrate {

struct grid_spec {
    double lo;
    double hi;
    double step;

    std::vector<double> values() const;  // lo, lo+step, ... <= hi (+tolerance)
};

struct misfit_point {
    double alpha0;
    double tcr0;
    double misfit;
};

struct fit_result {
    trajectory::model_params best;
    double best_misfit;
    std::vector<misfit_point> surface;  // full grid, alpha-major order
};

/// Exhaustive grid search over (alpha0, tcr0). For each candidate the model
/// population for every observation year is binned into the observation's
/// own bins and compared as per-person density, restricted to bins whose
/// effective income lies below the candidate's mp(year) (the model's
/// validity zone); misfit is the sum of squared density differences over
/// years. Ties break toward smaller alpha0, then smaller tcr0.
/// Observations must be dimensionless; dollar tables need fit_scale first.
fit_result fit_model(const trajectory::model_params& base, grid_spec alpha_grid,
                     grid_spec tcr_grid, const std::map<int, binned_pid>& observations,
                     const economy::growth_series& series,
                     const demography::pyramid_set& pyramids);

/// Least-squares scalar mapping predicted band means onto observed ones:
/// sum(p*o)/sum(p*p) over bands present in both (keyed by band bounds).
double fit_scale(const std::vector<std::pair<std::pair<double, double>, double>>& predicted,
                 const std::vector<std::pair<std::pair<double, double>, double>>& observed);

void save_misfit_surface(const std::vector<misfit_point>& surface, const std::string& path);

}  // namespace incomesim::calibrate
