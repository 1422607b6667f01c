#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "incomesim/demography.hpp"
#include "incomesim/economy.hpp"
#include "incomesim/pid.hpp"
#include "incomesim/trajectory.hpp"

namespace incomesim::synthesis {

struct population_entry {
    int age;
    int i;  // capability rank
    int j;  // means rank
    double weight;
    double income;
    bool in_tail;
};

/// All modelled incomes of one calendar year: one entry per (age, state),
/// ordered by (age, i, j); weight = pyramid(age)/841, identical within an age.
struct synthetic_population {
    int year = 0;
    int work_start_age = 15;
    std::vector<population_entry> entries;

    double total_weight() const;
    double experience_of(const population_entry& e) const { return e.age - work_start_age; }
};

struct sim_options {
    /// Initialize cohorts alive at t0 with the closed-form constant-coefficient
    /// trajectory at their then-current experience instead of zero income.
    /// Equivalent to an infinite unit-growth pre-history; removes the cold-start
    /// transient of the first ~60 simulated years.
    bool steady_state_init = false;
};

/// Year-stepping engine over all cohorts. Holds the per-cohort 841-state
/// vectors in the kernel block layout and advances them one calendar year at
/// a time; querying years in ascending order is incremental.
class simulator {
  public:
    simulator(const trajectory::model_params& p, trajectory::calendar_context ctx,
              sim_options opt = {});
    simulator(const trajectory::model_params& p, const economy::growth_series& s, int last_year,
              sim_options opt = {});
    ~simulator();
    simulator(simulator&&) noexcept;
    simulator& operator=(simulator&&) noexcept;

    const trajectory::model_params& params() const { return params_; }
    const trajectory::calendar_context& context() const { return ctx_; }

    /// Incomes for all (age, state) pairs of `year`; weights from the year's
    /// pyramid. Years must be queried in non-decreasing order.
    synthetic_population simulate_year(const demography::pyramid_set& pyramids, int year);
    synthetic_population simulate_year(const demography::age_pyramid& pyramid, int year);

  private:
    struct impl;
    trajectory::model_params params_;
    trajectory::calendar_context ctx_;
    sim_options opt_;
    std::unique_ptr<impl> impl_;
};

/// One-shot form of the operation; builds a transient engine.
synthetic_population simulate_year(const trajectory::model_params& p,
                                   const trajectory::calendar_context& ctx,
                                   const demography::pyramid_set& pyramids, int year,
                                   sim_options opt = {});

/// Entries with age_lo <= age <= age_hi, for age-group distributions.
synthetic_population filter_ages(const synthetic_population& pop, int age_lo, int age_hi);

struct tail_result {
    synthetic_population population;
    double extra_income_ratio = 1.0;  // weighted tail income after / before
    double threshold = 0.0;           // mp(year)
    bool empty_tail = false;
};

enum class tail_mode {
    quantile,       // replace tail incomes with deterministic Pareto quantiles
    forced_factor,  // multiply tail incomes by tail_factor instead
};

/// Replaces the incomes of all entries at or above mp(year) by deterministic
/// midpoint quantiles of the Pareto law with minimum mp(year) and the
/// standard density index from the params (paper-convention k is converted
/// to k+1). Rank order within the tail is preserved; ties in original income
/// are broken by (age, i, j) ascending. Tail population count is unchanged.
/// In forced_factor mode the tail keeps its shape and is scaled so total
/// tail income is exactly tail_factor times the pre-tail total.
tail_result attach_pareto_tail(const trajectory::model_params& p,
                               const trajectory::calendar_context& ctx,
                               synthetic_population pop,
                               tail_mode mode = tail_mode::quantile);

/// Deterministic quantile set used for the tail: the r-th heaviest of n
/// receives x_m * ((r - 0.5)/n)^(-1/k_standard), r = 1 heaviest.
std::vector<double> pareto_tail_quantiles(size_t n, double k_standard, double x_m);

/// Seeded inverse-CDF draws from the same tail law, descending. For
/// distribution tests only; the simulation path stays on the deterministic
/// quantiles.
std::vector<double> pareto_tail_sample(size_t n, double k_standard, double x_m, uint64_t seed);

struct dollar_anchor {
    int year;
    double dollars_per_unit;
};

struct scale_result {
    double dollars_per_unit;
    int year;
};

/// Dollars per dimensionless income unit for `year`, anchored at
/// `anchor.year`; proportional to the nominal per-capita column paired with
/// the model driver.
scale_result scale_factor(const trajectory::model_params& p, const economy::growth_series& s,
                          int year, dollar_anchor anchor);

/// Histogram of a population with incomes scaled by `scale`; contiguous bins
/// of the given width from zero, [lower, upper) membership, weighted counts,
/// per-bin weighted mean income. Total count equals total weight.
binned_pid to_binned(const synthetic_population& pop, double bin_width, double scale = 1.0,
                     income_units units = income_units::dimensionless);

struct band_stat {
    double exp_lo;
    double exp_hi;
    double weight;
    double mean;
    double median;       // weighted lower median
    double norm_mean;    // mean / peak-band mean
    double norm_median;  // median / peak-band median
};

/// Per-experience-band mean and weighted median income. Empty bands are
/// absent from the result; exactly one band has norm_mean == 1.
std::vector<band_stat> mean_median_by_experience(const synthetic_population& pop, int band_width);

struct portion_band {
    double exp_lo;
    double exp_hi;
    double share;
};

struct portion_result {
    double overall;
    std::vector<portion_band> bands;
};

/// Weighted share of entries with income >= threshold (strictly positive
/// incomes when threshold is zero), overall and per experience band.
portion_result portion_above(const synthetic_population& pop, double threshold,
                             int band_width = 10);

struct projection_inputs {
    economy::growth_series series;
    demography::pyramid_set pyramids;
};

/// Extends the series to `horizon_year` with constant factors (real
/// 1+growth_rate, nominal (1+growth_rate)*(1+deflator_rate)) and fills
/// missing pyramid years by carrying the latest pyramid forward (error when
/// carry_forward is off and a projected year has no pyramid).
projection_inputs project_forward(const economy::growth_series& s,
                                  const demography::pyramid_set& pyramids, double growth_rate,
                                  int horizon_year, double deflator_rate = 0.0,
                                  bool carry_forward = true);

}  // namespace incomesim::synthesis
