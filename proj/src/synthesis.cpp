#include "incomesim/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "incomesim/kernels.hpp"

namespace incomesim::synthesis {

using trajectory::alpha1_at;
using trajectory::calendar_context;
using trajectory::model_params;
using trajectory::mp_at;
using trajectory::tcr_at;

double synthetic_population::total_weight() const {
    double w = 0.0;
    for (const auto& e : entries) w += e.weight;
    return w;
}

// ---------------------------------------------------------------------------
// stepping engine
// ---------------------------------------------------------------------------

namespace {
constexpr size_t stride = kernels::block_stride;
}

struct simulator::impl {
    size_t blocks;               // one per means rank j
    std::vector<double> sl;      // blocks * 32, S'_i * L'_j (pads zero)
    std::vector<double> lp;      // L'_j per block

    struct cohort {
        int start;                // calendar year of experience 0
        bool switched = false;    // has entered the decay phase
        std::vector<double> m;    // kernel block layout
    };
    std::map<int, cohort> cohorts;
    bool started = false;
    int advanced_through = 0;  // all cohorts stepped through this calendar year

    std::vector<double> e_blocks;  // scratch exp tables

    void step_growth(const model_params& p, const calendar_context& ctx, std::vector<double>& m,
                     int year, double dt) {
        const double lambda = ctx.lambda_min(year);
        const double cum = ctx.growth(year);
        for (size_t b = 0; b < blocks; ++b) {
            const double rate = p.alpha0 / (lambda * lp[b]);
            e_blocks[b] = std::exp(-(rate * dt));
        }
        kernels::active().growth_step(m.data(), sl.data(), cum, e_blocks.data(), blocks);
    }

    void step_decay(const model_params& p, const calendar_context& ctx, std::vector<double>& m,
                    int year, double dt) {
        const double lambda = ctx.lambda_min(year);
        const double a1 = alpha1_at(p, ctx, year);
        for (size_t b = 0; b < blocks; ++b) {
            const double rate = a1 / (lambda * lp[b]);
            e_blocks[b] = std::exp(-(rate * dt));
        }
        kernels::active().decay_step(m.data(), e_blocks.data(), blocks);
    }

    // Advance one cohort through calendar year `year` (experience t -> t+1).
    void step_cohort(const model_params& p, const calendar_context& ctx, cohort& c, int year) {
        const double t = static_cast<double>(year - c.start);
        const double tcr = tcr_at(p, ctx, year);
        if (!c.switched) {
            if (t + 1.0 <= tcr) {
                step_growth(p, ctx, c.m, year, 1.0);
                return;
            }
            if (t < tcr) {
                const double d1 = tcr - t;
                step_growth(p, ctx, c.m, year, d1);
                step_decay(p, ctx, c.m, year, 1.0 - d1);
                c.switched = true;
                return;
            }
            c.switched = true;
        }
        step_decay(p, ctx, c.m, year, 1.0);
    }

    // Closed-form state of a cohort at experience e0 under frozen t0
    // coefficients (lambda = sigma = 1, tcr = tcr0): the infinite
    // unit-growth pre-history.
    void steady_state_fill(const model_params& p, cohort& c, double e0) {
        const double rd =
            -std::log(p.reference_level) / ((p.reference_age - p.work_start_age) - p.tcr0);
        for (size_t b = 0; b < blocks; ++b) {
            const double rate = p.alpha0 / lp[b];
            const double grow_time = std::min(e0, p.tcr0);
            const double approach = 1.0 - std::exp(-(rate * grow_time));
            const double decay = e0 > p.tcr0 ? std::exp(-(rd / lp[b]) * (e0 - p.tcr0)) : 1.0;
            for (size_t k = 0; k < stride; ++k)
                c.m[b * stride + k] = sl[b * stride + k] * approach * decay;
        }
        c.switched = e0 >= p.tcr0;
    }
};

simulator::simulator(const model_params& p, calendar_context ctx, sim_options opt)
    : params_(p), ctx_(std::move(ctx)), opt_(opt), impl_(std::make_unique<impl>()) {
    params_.validate();
    const size_t ranks = static_cast<size_t>(params_.n_ranks());
    if (ranks > stride)
        throw std::invalid_argument("simulator: rank grid larger than the kernel block layout (" +
                                    std::to_string(stride) + ")");
    impl_->blocks = ranks;
    impl_->sl.assign(ranks * stride, 0.0);
    impl_->lp.resize(ranks);
    impl_->e_blocks.resize(ranks);
    for (size_t b = 0; b < ranks; ++b) {
        const int j = params_.grid_min + static_cast<int>(b);
        impl_->lp[b] = params_.rank_norm(j);
        for (size_t k = 0; k < ranks; ++k) {
            const int i = params_.grid_min + static_cast<int>(k);
            impl_->sl[b * stride + k] = params_.rank_norm(i) * params_.rank_norm(j);
        }
    }
}

simulator::simulator(const model_params& p, const economy::growth_series& s, int last_year,
                     sim_options opt)
    : simulator(p, trajectory::build_context(p, s, last_year), opt) {}

simulator::~simulator() = default;
simulator::simulator(simulator&&) noexcept = default;
simulator& simulator::operator=(simulator&&) noexcept = default;

synthetic_population simulator::simulate_year(const demography::pyramid_set& pyramids, int year) {
    auto it = pyramids.find(year);
    if (it == pyramids.end())
        throw std::out_of_range("simulate_year: no pyramid for year " + std::to_string(year));
    return simulate_year(it->second, year);
}

synthetic_population simulator::simulate_year(const demography::age_pyramid& pyramid, int year) {
    const auto& p = params_;
    auto& im = *impl_;
    if (year < ctx_.t0())
        throw std::invalid_argument("simulate_year: year before model start");
    if (!ctx_.covers(year)) throw std::out_of_range("simulate_year: context too short");

    const int oldest_start = year - (p.age_max - p.work_start_age);
    const int newest_start = year - (p.age_min - p.work_start_age);

    if (!im.started) {
        // Catch-up: integrate every needed cohort from its (clipped) start.
        for (int s = oldest_start; s <= newest_start; ++s) {
            impl::cohort c;
            c.start = s;
            c.m.assign(im.blocks * stride, 0.0);
            const int begin = std::max(s, ctx_.t0());
            if (s < ctx_.t0() && opt_.steady_state_init)
                im.steady_state_fill(p, c, static_cast<double>(ctx_.t0() - s));
            for (int y = begin; y < year; ++y) im.step_cohort(p, ctx_, c, y);
            im.cohorts.emplace(s, std::move(c));
        }
        im.started = true;
        im.advanced_through = year - 1;
    } else if (year - 1 > im.advanced_through) {
        for (int y = im.advanced_through + 1; y < year; ++y) {
            if (im.cohorts.find(y) == im.cohorts.end()) {
                impl::cohort c;
                c.start = y;
                c.m.assign(im.blocks * stride, 0.0);
                im.cohorts.emplace(y, std::move(c));
            }
            for (auto& [s, c] : im.cohorts)
                // step only cohorts whose value can still be read (the step
                // through year y produces the experience y+1-s income)
                if (s <= y && y - s < p.age_max - p.work_start_age)
                    im.step_cohort(p, ctx_, c, y);
        }
        im.advanced_through = year - 1;
        im.cohorts.erase(im.cohorts.begin(), im.cohorts.lower_bound(oldest_start));
    } else if (year - 1 < im.advanced_through) {
        throw std::logic_error("simulator: years must be queried in non-decreasing order");
    }
    // Cohorts younger than any modelled age appear as they enter the range.
    for (int s = oldest_start; s <= newest_start; ++s) {
        if (im.cohorts.find(s) == im.cohorts.end()) {
            impl::cohort c;
            c.start = s;
            c.m.assign(im.blocks * stride, 0.0);
            const int begin = std::max(s, ctx_.t0());
            if (s < ctx_.t0() && opt_.steady_state_init)
                im.steady_state_fill(p, c, static_cast<double>(ctx_.t0() - s));
            for (int y = begin; y < year; ++y) im.step_cohort(p, ctx_, c, y);
            im.cohorts.emplace(s, std::move(c));
        }
    }

    synthetic_population pop;
    pop.year = year;
    pop.work_start_age = p.work_start_age;
    pop.entries.reserve(static_cast<size_t>(p.age_max - p.age_min + 1) *
                        static_cast<size_t>(p.n_states()));
    const double inv_states = 1.0 / p.n_states();
    for (int a = p.age_min; a <= p.age_max; ++a) {
        const int s = year - (a - p.work_start_age);
        const auto& c = im.cohorts.at(s);
        const double w = pyramid.population(a) * inv_states;
        for (int i = p.grid_min; i <= p.grid_max; ++i) {
            const size_t slot = static_cast<size_t>(i - p.grid_min);
            for (int j = p.grid_min; j <= p.grid_max; ++j) {
                const size_t b = static_cast<size_t>(j - p.grid_min);
                pop.entries.push_back(
                    population_entry{a, i, j, w, c.m[b * stride + slot], false});
            }
        }
    }
    return pop;
}

synthetic_population simulate_year(const model_params& p, const calendar_context& ctx,
                                   const demography::pyramid_set& pyramids, int year,
                                   sim_options opt) {
    simulator sim(p, ctx, opt);
    return sim.simulate_year(pyramids, year);
}

synthetic_population filter_ages(const synthetic_population& pop, int age_lo, int age_hi) {
    if (age_lo > age_hi) throw std::invalid_argument("filter_ages: empty age range");
    synthetic_population out;
    out.year = pop.year;
    out.work_start_age = pop.work_start_age;
    for (const auto& e : pop.entries)
        if (e.age >= age_lo && e.age <= age_hi) out.entries.push_back(e);
    return out;
}

// ---------------------------------------------------------------------------
// Pareto tail
// ---------------------------------------------------------------------------

std::vector<double> pareto_tail_quantiles(size_t n, double k_standard, double x_m) {
    if (!(k_standard > 0.0)) throw std::invalid_argument("pareto_tail_quantiles: k <= 0");
    std::vector<double> q(n);
    const double inv_k = -1.0 / k_standard;
    for (size_t r = 0; r < n; ++r)
        q[r] = x_m * std::pow((static_cast<double>(r) + 0.5) / static_cast<double>(n), inv_k);
    return q;  // descending: q[0] is the heaviest
}

std::vector<double> pareto_tail_sample(size_t n, double k_standard, double x_m, uint64_t seed) {
    if (!(k_standard > 0.0)) throw std::invalid_argument("pareto_tail_sample: k <= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> q(n);
    const double inv_k = -1.0 / k_standard;
    for (auto& v : q) v = x_m * std::pow(1.0 - u(rng), inv_k);
    std::sort(q.begin(), q.end(), std::greater<>());
    return q;
}

tail_result attach_pareto_tail(const model_params& p, const calendar_context& ctx,
                               synthetic_population pop, tail_mode mode) {
    tail_result res;
    res.threshold = mp_at(p, ctx, pop.year);

    std::vector<size_t> tail;
    for (size_t idx = 0; idx < pop.entries.size(); ++idx)
        if (pop.entries[idx].income >= res.threshold) tail.push_back(idx);

    if (tail.empty()) {
        res.empty_tail = true;
        res.extra_income_ratio = 1.0;
        res.population = std::move(pop);
        return res;
    }
    if (mode == tail_mode::forced_factor) {
        for (size_t idx : tail) {
            auto& e = pop.entries[idx];
            e.income *= p.tail_factor;
            e.in_tail = true;
        }
        res.extra_income_ratio = p.tail_factor;
        res.population = std::move(pop);
        return res;
    }
    // Heaviest first; ties keep (age, i, j) ascending entry order.
    std::stable_sort(tail.begin(), tail.end(), [&](size_t a, size_t b) {
        return pop.entries[a].income > pop.entries[b].income;
    });
    const auto q = pareto_tail_quantiles(tail.size(), p.k_standard(), res.threshold);
    double before = 0.0, after = 0.0;
    for (size_t r = 0; r < tail.size(); ++r) {
        auto& e = pop.entries[tail[r]];
        before += e.weight * e.income;
        after += e.weight * q[r];
        e.income = q[r];
        e.in_tail = true;
    }
    res.extra_income_ratio = after / before;
    res.population = std::move(pop);
    return res;
}

// ---------------------------------------------------------------------------
// aggregation
// ---------------------------------------------------------------------------

scale_result scale_factor(const model_params& p, const economy::growth_series& s, int year,
                          dollar_anchor anchor) {
    if (!s.contains(year) || !s.contains(anchor.year))
        throw std::out_of_range("scale_factor: year range not covered by series");
    const auto nom = economy::nominal_counterpart(p.driver);
    double v = anchor.dollars_per_unit;
    if (year > anchor.year)
        v *= economy::cumulative_factor(s, nom, anchor.year + 1, year);
    else if (year < anchor.year)
        v /= economy::cumulative_factor(s, nom, year + 1, anchor.year);
    return scale_result{v, year};
}

binned_pid to_binned(const synthetic_population& pop, double bin_width, double scale,
                     income_units units) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("to_binned: non-positive bin width");
    if (!(scale > 0.0)) throw std::invalid_argument("to_binned: non-positive scale");
    double max_f = -1.0;
    for (const auto& e : pop.entries)
        max_f = std::max(max_f, std::floor(e.income * scale / bin_width));
    if (max_f > 50e6)
        throw std::invalid_argument("to_binned: bin width too small for the income range");
    const long max_idx = static_cast<long>(max_f);
    binned_pid pid;
    pid.units = units;
    if (max_idx < 0) return pid;
    std::vector<double> counts(static_cast<size_t>(max_idx) + 1, 0.0);
    std::vector<double> mass(static_cast<size_t>(max_idx) + 1, 0.0);
    for (const auto& e : pop.entries) {
        const double x = e.income * scale;
        const auto idx = static_cast<size_t>(std::floor(x / bin_width));
        counts[idx] += e.weight;
        mass[idx] += e.weight * x;
    }
    for (size_t idx = 0; idx < counts.size(); ++idx) {
        income_bin b;
        b.lower = static_cast<double>(idx) * bin_width;
        b.upper = static_cast<double>(idx + 1) * bin_width;
        b.count = counts[idx];
        if (counts[idx] > 0.0) b.mean_income = mass[idx] / counts[idx];
        pid.bins.push_back(b);
    }
    return pid;
}

std::vector<band_stat> mean_median_by_experience(const synthetic_population& pop, int band_width) {
    if (band_width < 1) throw std::invalid_argument("mean_median_by_experience: bad band width");
    struct acc {
        double w = 0.0, wx = 0.0;
        std::vector<std::pair<double, double>> xs;  // (income, weight)
    };
    std::map<int, acc> bands;
    for (const auto& e : pop.entries) {
        const int exp = e.age - pop.work_start_age;
        auto& a = bands[exp / band_width];
        a.w += e.weight;
        a.wx += e.weight * e.income;
        a.xs.emplace_back(e.income, e.weight);
    }
    std::vector<band_stat> out;
    for (auto& [b, a] : bands) {
        if (a.w <= 0.0) continue;  // weightless band: absent, not zero
        band_stat st;
        st.exp_lo = b * band_width;
        st.exp_hi = (b + 1) * band_width;
        st.weight = a.w;
        st.mean = a.wx / a.w;
        std::sort(a.xs.begin(), a.xs.end());
        double cum = 0.0;
        st.median = a.xs.back().first;
        for (const auto& [x, w] : a.xs) {
            cum += w;
            if (cum >= a.w / 2.0) {
                st.median = x;
                break;
            }
        }
        out.push_back(st);
    }
    double peak_mean = 0.0, peak_median = 0.0;
    for (const auto& st : out) {
        peak_mean = std::max(peak_mean, st.mean);
        peak_median = std::max(peak_median, st.median);
    }
    for (auto& st : out) {
        st.norm_mean = peak_mean > 0.0 ? st.mean / peak_mean : 0.0;
        st.norm_median = peak_median > 0.0 ? st.median / peak_median : 0.0;
    }
    return out;
}

portion_result portion_above(const synthetic_population& pop, double threshold, int band_width) {
    if (band_width < 1) throw std::invalid_argument("portion_above: bad band width");
    auto above = [&](double income) {
        return threshold == 0.0 ? income > 0.0 : income >= threshold;
    };
    std::map<int, std::pair<double, double>> bands;  // band -> (above, total)
    double tot = 0.0, hit = 0.0;
    for (const auto& e : pop.entries) {
        const int exp = e.age - pop.work_start_age;
        auto& [a, t] = bands[exp / band_width];
        t += e.weight;
        tot += e.weight;
        if (above(e.income)) {
            a += e.weight;
            hit += e.weight;
        }
    }
    portion_result res;
    res.overall = tot > 0.0 ? hit / tot : 0.0;
    for (const auto& [b, at] : bands)
        res.bands.push_back(portion_band{static_cast<double>(b * band_width),
                                         static_cast<double>((b + 1) * band_width),
                                         at.second > 0.0 ? at.first / at.second : 0.0});
    return res;
}

projection_inputs project_forward(const economy::growth_series& s,
                                  const demography::pyramid_set& pyramids, double growth_rate,
                                  int horizon_year, double deflator_rate, bool carry_forward) {
    projection_inputs out{economy::extend_series(s, growth_rate, horizon_year, deflator_rate),
                          pyramids};
    if (pyramids.empty()) throw std::invalid_argument("project_forward: no pyramids");
    for (int y = pyramids.rbegin()->first + 1; y <= horizon_year; ++y) {
        if (out.pyramids.find(y) != out.pyramids.end()) continue;
        if (!carry_forward)
            throw std::out_of_range("project_forward: missing pyramid for projected year " +
                                    std::to_string(y));
        const auto& last = out.pyramids.rbegin()->second;
        out.pyramids.emplace(y, demography::age_pyramid(y, last.first_age(), last.counts()));
    }
    return out;
}

}  // namespace incomesim::synthesis
