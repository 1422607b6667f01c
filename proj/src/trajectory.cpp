#include "incomesim/trajectory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace incomesim::trajectory {

void model_params::validate() const {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("model_params: alpha0 must be > 0");
    if (!(tcr0 > 0.0)) throw std::invalid_argument("model_params: tcr0 must be > 0");
    if (!(mp0 > 0.0 && mp0 < 1.0)) throw std::invalid_argument("model_params: mp0 must be in (0,1)");
    if (!(reference_level > 0.0 && reference_level <= 1.0))
        throw std::invalid_argument("model_params: reference_level must be in (0,1]");
    if (!(reference_age - work_start_age > tcr0))
        throw std::invalid_argument("model_params: reference age must exceed tcr0 + work_start_age");
    if (!(k > 1.0)) throw std::invalid_argument("model_params: k must be > 1");
    if (!(tail_factor > 0.0)) throw std::invalid_argument("model_params: tail_factor must be > 0");
    if (grid_min >= grid_max) throw std::invalid_argument("model_params: grid_min >= grid_max");
    if (grid_min < 1) throw std::invalid_argument("model_params: grid_min < 1");
    if (age_min <= work_start_age || age_max < age_min)
        throw std::invalid_argument("model_params: bad age range");
}

model_params preset_1950() {
    model_params p;
    p.t0 = 1950;
    p.alpha0 = 0.097;
    p.tcr0 = 23.5;
    return p;
}

model_params preset_1960() { return model_params{}; }

model_params preset_1967() {
    model_params p;
    p.t0 = 1967;
    p.alpha0 = 0.071;
    p.tcr0 = 32.0;
    return p;
}

calendar_context::calendar_context(int t0, std::vector<double> growth, std::vector<double> nominal)
    : t0_(t0), growth_(std::move(growth)), nominal_(std::move(nominal)) {
    if (growth_.empty() || growth_.size() != nominal_.size())
        throw std::invalid_argument("calendar_context: bad factor vectors");
}

size_t calendar_context::index(int year) const {
    if (!covers(year))
        throw std::out_of_range("calendar_context: year " + std::to_string(year) +
                                " outside " + std::to_string(t0_) + ".." +
                                std::to_string(last_year()));
    return static_cast<size_t>(year - t0_);
}

double calendar_context::lambda_min(int year) const { return std::sqrt(growth(year)); }

calendar_context build_context(const model_params& p, const economy::growth_series& s,
                               int last_year) {
    p.validate();
    if (last_year < p.t0) throw std::invalid_argument("build_context: last_year < t0");
    if (!s.contains(p.t0) || !s.contains(last_year))
        throw std::out_of_range("build_context: years " + std::to_string(p.t0) + ".." +
                                std::to_string(last_year) + " not covered by series");
    std::vector<double> growth{1.0}, nominal{1.0};
    const auto nom_kind = economy::nominal_counterpart(p.driver);
    for (int y = p.t0 + 1; y <= last_year; ++y) {
        growth.push_back(growth.back() * s.row(y).factor(p.driver));
        nominal.push_back(nominal.back() * s.row(y).factor(nom_kind));
    }
    return calendar_context(p.t0, std::move(growth), std::move(nominal));
}

double tcr_at(const model_params& p, const calendar_context& ctx, int year) {
    return p.tcr0 * ctx.lambda_min(year);
}

double mp_at(const model_params& p, const calendar_context& ctx, int year) {
    return p.mp0 * ctx.growth(year);
}

double alpha1_at(const model_params& p, const calendar_context& ctx, int year) {
    const double window = (p.reference_age - p.work_start_age) - tcr_at(p, ctx, year);
    if (!(window > 0.0))
        throw std::domain_error("alpha1_at: decay window empty at year " + std::to_string(year) +
                                " (tcr has reached the reference age)");
    return -ctx.lambda_min(year) * std::log(p.reference_level) / window;
}

double income_at(const model_params& p, const calendar_context& ctx, state_index state,
                 int start_year, double experience) {
    if (experience < 0.0) throw std::invalid_argument("income_at: negative experience");
    if (start_year < ctx.t0())
        throw std::invalid_argument("income_at: start_year before model start " +
                                    std::to_string(ctx.t0()));
    if (state.i < p.grid_min || state.i > p.grid_max || state.j < p.grid_min ||
        state.j > p.grid_max)
        throw std::out_of_range("income_at: state rank outside grid");
    if (experience == 0.0) return 0.0;

    const double sp = p.rank_norm(state.i);
    const double lp = p.rank_norm(state.j);
    const double sl = sp * lp;

    double m = 0.0;
    bool switched = false;
    for (int step = 0;; ++step) {
        const double t = static_cast<double>(step);
        const double dt = std::min(1.0, experience - t);
        if (dt <= 0.0) break;
        const int year = start_year + step;
        if (!ctx.covers(year))
            throw std::out_of_range("income_at: context ends before experience " +
                                    std::to_string(experience) + " is reached");
        const double lambda = ctx.lambda_min(year);
        const double cum = ctx.growth(year);
        const double tcr = tcr_at(p, ctx, year);

        double d1 = 0.0;
        if (!switched) {
            if (t + dt <= tcr)
                d1 = dt;
            else if (t < tcr)
                d1 = tcr - t;
        }
        const double d2 = dt - d1;
        if (d1 > 0.0) {
            const double a = cum * sl;
            const double rate = p.alpha0 / (lambda * lp);
            const double e = std::exp(-(rate * d1));
            m = std::fma(m - a, e, a);
        }
        if (d2 > 0.0) {
            const double rate = alpha1_at(p, ctx, year) / (lambda * lp);
            m *= std::exp(-(rate * d2));
            switched = true;
        }
    }
    return m;
}

double reference_mean_curve(double t, double alpha_g, double alpha_d, double tcr) {
    if (t < 0.0) throw std::invalid_argument("reference_mean_curve: t < 0");
    const double peak = 1.0 - std::exp(-alpha_g * tcr);
    if (t <= tcr) return 1.0 - std::exp(-alpha_g * t);
    return peak * std::exp(-alpha_d * (t - tcr));
}

}  // namespace incomesim::trajectory
