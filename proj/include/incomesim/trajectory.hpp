#pragma once

#include <vector>

#include "incomesim/economy.hpp"

namespace incomesim::trajectory {

enum class pareto_convention { paper, standard };

/// Calibration constants of the income model. The defaults are the 1960
/// calibration; presets for the 1950 and 1967 start years are provided.
///
/// `k` is the Pareto tail index in the chosen convention: under `standard`
/// the tail density falls as x^-(k+1), under `paper` as x^-(k+2) (one less
/// than the standard index, the form used by the historical calibration).
struct model_params {
    int t0 = 1960;            // start calendar year of the model
    double alpha0 = 0.087;    // dissipation coefficient per year (rate at L'=1)
    double tcr0 = 26.5;       // critical work experience at t0, years
    double mp0 = 0.43;        // dimensionless Pareto threshold at t0
    int grid_min = 2;         // smallest capability/means rank
    int grid_max = 30;        // largest rank; S' = i/grid_max, L' = j/grid_max
    double reference_age = 64.0;   // A_r: age where the top state reaches...
    double reference_level = 0.72; // ...fraction M_r of its value at tcr
    double k = 1.35;               // Pareto tail index
    pareto_convention convention = pareto_convention::paper;
    double tail_factor = 1.33;     // diagnostic target for the tail income excess
    economy::factor_kind driver = economy::factor_kind::real_per_capita_16;
    int work_start_age = 15;
    int age_min = 16;
    int age_max = 75;

    int n_ranks() const { return grid_max - grid_min + 1; }
    int n_states() const { return n_ranks() * n_ranks(); }
    double rank_norm(int r) const { return static_cast<double>(r) / grid_max; }

    /// Standard-convention density index used wherever the Pareto law itself
    /// is evaluated (quantiles, tail means).
    double k_standard() const { return convention == pareto_convention::paper ? k + 1.0 : k; }

    void validate() const;
};

model_params preset_1950();  // tcr0 = 23.5, alpha0 = 0.097
model_params preset_1960();  // tcr0 = 26.5, alpha0 = 0.087
model_params preset_1967();  // tcr0 = 32.0, alpha0 = 0.071

/// One of the 841 income states: capability rank i and means rank j.
struct state_index {
    int i;
    int j;
};

/// Time-dependent model quantities per calendar year y >= t0.
/// growth(y) is the cumulative real-driver factor between t0 and y (rows
/// t0+1..y of the series), 1 at t0; lambda = sigma = sqrt(growth);
/// tcr(y) = tcr0*lambda(y); mp(y) = mp0*growth(y). nominal_growth tracks the
/// paired nominal column for dollar scaling.
class calendar_context {
  public:
    calendar_context(int t0, std::vector<double> growth, std::vector<double> nominal);

    int t0() const { return t0_; }
    int last_year() const { return t0_ + static_cast<int>(growth_.size()) - 1; }
    bool covers(int year) const { return year >= t0_ && year <= last_year(); }

    double growth(int year) const { return growth_[index(year)]; }
    double nominal_growth(int year) const { return nominal_[index(year)]; }
    double lambda_min(int year) const;
    double sigma_min(int year) const { return lambda_min(year); }

  private:
    size_t index(int year) const;
    int t0_;
    std::vector<double> growth_;
    std::vector<double> nominal_;
};

calendar_context build_context(const model_params& p, const economy::growth_series& s,
                               int last_year);

double tcr_at(const model_params& p, const calendar_context& ctx, int year);
double mp_at(const model_params& p, const calendar_context& ctx, int year);

/// Decay coefficient alpha1(year): the top state decaying from tcr(year) to
/// experience A_r - work_start_age ends at fraction M_r of its value at tcr.
/// Closed form -lambda(year)*ln(M_r)/((A_r - work_start_age) - tcr(year)).
/// Throws when the decay window is empty.
double alpha1_at(const model_params& p, const calendar_context& ctx, int year);

/// Dimensionless income of `state` at the given work experience for a cohort
/// that starts work (experience 0, age = work_start_age) in `start_year`.
/// Integrated year by year with coefficients held constant within each
/// calendar year and the exact exponential step applied per year; the growth
/// phase hands over to decay the first time experience reaches tcr of the
/// current calendar year, splitting that year exactly at the crossing.
/// Cohorts starting before t0 are integrated from t0 with zero income.
double income_at(const model_params& p, const calendar_context& ctx, state_index state,
                 int start_year, double experience);

/// Two-piece mean-income shape used as a comparison oracle:
/// 1-exp(-ag*t) up to tcr, then exponential decay with rate ad.
double reference_mean_curve(double t, double alpha_g = 0.085, double alpha_d = 0.06,
                            double tcr = 39.0);

}  // namespace incomesim::trajectory
