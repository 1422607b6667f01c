#include "incomesim/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "incomesim/csv.hpp"

namespace incomesim::empirical {

void density_pid::validate() const {
    for (size_t i = 0; i < points.size(); ++i) {
        if (points[i].density < 0.0) throw data_error("density pid: negative density");
        if (i > 0 && !(points[i].income > points[i - 1].income))
            throw data_error("density pid: income coordinates not strictly increasing");
    }
}

double effective_bin_income(const income_bin& bin, bin_income_mode mode) {
    if (bin.open()) throw std::invalid_argument("effective_bin_income: open bin");
    switch (mode) {
        case bin_income_mode::center:
            return bin.center();
        case bin_income_mode::reported_mean:
            if (!bin.mean_income)
                throw std::invalid_argument("effective_bin_income: no reported mean");
            return *bin.mean_income;
        case bin_income_mode::offset_corrected:
            return bin.center() + mean_offset * bin.width();
    }
    throw std::logic_error("effective_bin_income: bad mode");
}

density_pid to_density(const binned_pid& pid, open_bin_policy open_bin, bin_income_mode mode) {
    pid.validate();
    density_pid out;
    out.units = pid.units;
    out.norm = pid.norm;
    for (const auto& b : pid.bins) {
        if (b.zero_mass()) continue;  // zero-income mass carries no density
        if (b.open()) {
            if (open_bin == open_bin_policy::error)
                throw data_error("to_density: open-ended bin present");
            continue;
        }
        if (!(b.width() > 0.0)) throw data_error("to_density: zero-width bin");
        out.points.push_back(
            density_point{effective_bin_income(b, mode), b.count / b.width(), b.width()});
    }
    out.validate();
    return out;
}

binned_pid per_person(const binned_pid& pid) {
    if (pid.norm != normalization::raw)
        throw std::invalid_argument("per_person: table is already per-person normalized");
    const double total = pid.total_count();
    if (!(total > 0.0)) throw std::invalid_argument("per_person: empty table");
    binned_pid out = pid;
    out.norm = normalization::per_person;
    for (auto& b : out.bins) b.count /= total;  // bin means are incomes: unchanged
    return out;
}

binned_pid rescale_income(const binned_pid& pid, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("rescale_income: non-positive factor");
    binned_pid out = pid;
    out.units = income_units::rescaled;
    for (auto& b : out.bins) {
        b.lower /= factor;
        if (b.upper) *b.upper /= factor;
        if (b.mean_income) *b.mean_income /= factor;
    }
    return out;
}

density_pid rescale_income(const density_pid& d, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("rescale_income: non-positive factor");
    density_pid out = d;
    out.units = income_units::rescaled;
    if (out.norm == normalization::per_person) out.norm = normalization::per_person_per_unit_income;
    for (auto& p : out.points) {
        p.income /= factor;
        p.width /= factor;
        p.density *= factor;  // mass per bin unchanged
    }
    return out;
}

namespace {

bool all_positive(const density_pid& c) {
    for (const auto& p : c.points)
        if (!(p.income > 0.0 && p.density > 0.0)) return false;
    return true;
}

}  // namespace

std::optional<double> density_at(const density_pid& curve, double x, interp_mode mode) {
    const auto& pts = curve.points;
    if (pts.size() < 2 || x < pts.front().income || x > pts.back().income) return std::nullopt;
    const bool log_space =
        mode == interp_mode::log_log || (mode == interp_mode::automatic && all_positive(curve));
    if (log_space && !(x > 0.0)) return std::nullopt;
    auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const density_point& p, double v) { return p.income < v; });
    if (hi == pts.begin()) return pts.front().density;
    auto lo = hi - 1;
    if (hi == pts.end()) return pts.back().density;
    if (log_space && lo->density > 0.0 && hi->density > 0.0 && lo->income > 0.0) {
        const double t = (std::log(x) - std::log(lo->income)) /
                         (std::log(hi->income) - std::log(lo->income));
        return std::exp(std::log(lo->density) * (1.0 - t) + std::log(hi->density) * t);
    }
    const double t = (x - lo->income) / (hi->income - lo->income);
    return lo->density * (1.0 - t) + hi->density * t;
}

collapse_result collapse_distance(const std::vector<density_pid>& curves, interp_mode mode) {
    if (curves.size() < 2)
        throw std::invalid_argument("collapse_distance: need at least two curves");
    double lo = 0.0, hi = 0.0;
    std::set<double> grid;
    for (size_t c = 0; c < curves.size(); ++c) {
        if (curves[c].points.size() < 2)
            throw std::invalid_argument("collapse_distance: curve with fewer than two points");
        const double clo = curves[c].points.front().income;
        const double chi = curves[c].points.back().income;
        lo = c == 0 ? clo : std::max(lo, clo);
        hi = c == 0 ? chi : std::min(hi, chi);
        for (const auto& p : curves[c].points) grid.insert(p.income);
    }
    if (!(lo < hi)) throw std::invalid_argument("collapse_distance: disjoint supports");

    interp_mode eff = mode;
    if (mode == interp_mode::automatic) {
        eff = interp_mode::log_log;
        for (const auto& c : curves)
            if (!all_positive(c)) eff = interp_mode::linear;
    }

    double sup = 0.0, sq = 0.0;
    size_t n = 0;
    for (double x : grid) {
        if (x < lo || x > hi) continue;
        for (size_t a = 0; a < curves.size(); ++a) {
            const auto va = density_at(curves[a], x, eff);
            if (!va) continue;
            for (size_t b = a + 1; b < curves.size(); ++b) {
                const auto vb = density_at(curves[b], x, eff);
                if (!vb) continue;
                const double d = std::abs(*va - *vb);
                sup = std::max(sup, d);
                sq += d * d;
                ++n;
            }
        }
    }
    return collapse_result{sup, n ? std::sqrt(sq / static_cast<double>(n)) : 0.0};
}

void save_density(const density_pid& d, const std::string& path) {
    csv::writer w(path);
    w.row({"income", "density", "width"});
    for (const auto& p : d.points) w.row({csv::fmt(p.income), csv::fmt(p.density), csv::fmt(p.width)});
}

}  // namespace incomesim::empirical
