#include "incomesim/calibrate.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "incomesim/csv.hpp"
#include "incomesim/empirical.hpp"
#include "incomesim/synthesis.hpp"

namespace incomesim::calibrate {

std::vector<double> grid_spec::values() const {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid_spec: degenerate grid");
    std::vector<double> v;
    // index-based so long grids do not accumulate rounding; tolerant top edge
    for (size_t i = 0;; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        if (x > hi + step * 1e-9) break;
        v.push_back(x);
    }
    return v;
}

namespace {

// Per-person density of `pop` over exactly the observation's bins. The
// normalizing total is assembled bin by bin in the observation's own order
// so a population that produced the observation reproduces its densities
// bit for bit. Placement binary-searches the closed-bin edges.
std::vector<double> model_density_on(const binned_pid& obs,
                                     const synthesis::synthetic_population& pop) {
    const size_t n = obs.bins.size();
    std::vector<double> lowers;          // closed bins only
    std::vector<size_t> closed_index;
    std::optional<size_t> zero_idx, open_idx;
    for (size_t i = 0; i < n; ++i) {
        const auto& b = obs.bins[i];
        if (b.zero_mass()) {
            zero_idx = i;
        } else if (b.open()) {
            open_idx = i;
        } else {
            lowers.push_back(b.lower);
            closed_index.push_back(i);
        }
    }
    std::vector<double> counts(n, 0.0);
    double outside = 0.0;
    for (const auto& e : pop.entries) {
        const double x = e.income;
        if (zero_idx && x == 0.0) {
            counts[*zero_idx] += e.weight;
            continue;
        }
        // last closed bin whose lower edge is <= x
        auto it = std::upper_bound(lowers.begin(), lowers.end(), x);
        if (it != lowers.begin()) {
            const size_t i = closed_index[static_cast<size_t>(it - lowers.begin()) - 1];
            if (x < *obs.bins[i].upper) {
                counts[i] += e.weight;
                continue;
            }
        }
        if (open_idx && x >= obs.bins[*open_idx].lower) {
            counts[*open_idx] += e.weight;
            continue;
        }
        outside += e.weight;
    }
    double total = 0.0;
    for (double c : counts) total += c;
    total += outside;
    std::vector<double> d(n, 0.0);
    if (!(total > 0.0)) return d;
    for (size_t i = 0; i < n; ++i) {
        const double w = obs.bins[i].width();
        d[i] = w > 0.0 ? counts[i] / total / w : 0.0;
    }
    return d;
}

}  // namespace

fit_result fit_model(const trajectory::model_params& base, grid_spec alpha_grid,
                     grid_spec tcr_grid, const std::map<int, binned_pid>& observations,
                     const economy::growth_series& series,
                     const demography::pyramid_set& pyramids) {
    if (observations.empty()) throw std::invalid_argument("fit_model: no observations");
    for (const auto& [year, obs] : observations) {
        if (obs.units != income_units::dimensionless)
            throw std::invalid_argument(
                "fit_model: observation for " + std::to_string(year) +
                " is not dimensionless; apply fit_scale first");
        if (pyramids.find(year) == pyramids.end())
            throw std::invalid_argument("fit_model: no pyramid for observation year " +
                                        std::to_string(year));
    }
    const int last_year = observations.rbegin()->first;
    if (!series.contains(last_year))
        throw std::invalid_argument("fit_model: series does not cover observation years");

    const auto alphas = alpha_grid.values();
    const auto tcrs = tcr_grid.values();

    std::vector<misfit_point> surface(alphas.size() * tcrs.size());
    auto evaluate = [&](size_t flat) {
        const double a = alphas[flat / tcrs.size()];
        const double t = tcrs[flat % tcrs.size()];
        trajectory::model_params p = base;
        p.alpha0 = a;
        p.tcr0 = t;
        synthesis::simulator sim(p, series, last_year);
        double misfit = 0.0;
        for (const auto& [year, obs] : observations) {
            const auto pop = sim.simulate_year(pyramids, year);
            const auto model_d = model_density_on(obs, pop);
            const double obs_total = obs.total_count();
            const double mp = trajectory::mp_at(p, sim.context(), year);
            for (size_t i = 0; i < obs.bins.size(); ++i) {
                const auto& b = obs.bins[i];
                if (b.open() || b.zero_mass() || !(b.width() > 0.0)) continue;
                if (empirical::effective_bin_income(b, empirical::bin_income_mode::center) >= mp)
                    continue;  // Pareto zone excluded from the misfit
                const double obs_d = b.count / obs_total / b.width();
                const double diff = model_d[i] - obs_d;
                misfit += diff * diff;
            }
        }
        surface[flat] = misfit_point{a, t, misfit};
    };

    // Grid points are independent; results land in their own slots and the
    // minimum is taken by index afterwards, so the outcome does not depend
    // on evaluation order.
    const size_t total = surface.size();
    const size_t workers =
        std::min<size_t>(total, std::max(1u, std::thread::hardware_concurrency()));
    if (workers > 1) {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        std::mutex error_mutex;
        std::exception_ptr error;
        for (size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t flat = next.fetch_add(1); flat < total; flat = next.fetch_add(1)) {
                    try {
                        evaluate(flat);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error) error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
    } else {
        for (size_t flat = 0; flat < total; ++flat) evaluate(flat);
    }

    fit_result res;
    res.surface = std::move(surface);
    res.best_misfit = res.surface.front().misfit;
    size_t best_flat = 0;
    for (size_t flat = 1; flat < total; ++flat) {
        if (res.surface[flat].misfit < res.best_misfit) {
            res.best_misfit = res.surface[flat].misfit;
            best_flat = flat;
        }
    }
    res.best = base;
    res.best.alpha0 = res.surface[best_flat].alpha0;
    res.best.tcr0 = res.surface[best_flat].tcr0;
    return res;
}

double fit_scale(const std::vector<std::pair<std::pair<double, double>, double>>& predicted,
                 const std::vector<std::pair<std::pair<double, double>, double>>& observed) {
    double pp = 0.0, po = 0.0;
    size_t common = 0;
    for (const auto& [band, pv] : predicted) {
        for (const auto& [oband, ov] : observed) {
            if (band == oband) {
                pp += pv * pv;
                po += pv * ov;
                ++common;
                break;
            }
        }
    }
    if (common == 0) throw std::invalid_argument("fit_scale: no common bands");
    if (!(pp > 0.0)) throw std::invalid_argument("fit_scale: predicted values all zero");
    return po / pp;
}

void save_misfit_surface(const std::vector<misfit_point>& surface, const std::string& path) {
    csv::writer w(path);
    w.row({"alpha0", "tcr0", "misfit"});
    for (const auto& m : surface)
        w.row({csv::fmt(m.alpha0), csv::fmt(m.tcr0), csv::fmt(m.misfit)});
}

}  // namespace incomesim::calibrate
