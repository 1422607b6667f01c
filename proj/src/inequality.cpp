#include "incomesim/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "incomesim/csv.hpp"

namespace incomesim::inequality {

const char* convention_name(convention c) {
    return c == convention::paper ? "paper" : "standard";
}

void lorenz_curve::validate() const {
    if (points.size() < 2) throw data_error("lorenz curve: fewer than two points");
    if (points.front().x != 0.0 || points.front().y != 0.0)
        throw data_error("lorenz curve: must start at (0,0)");
    const double eps = 1e-9;
    if (std::abs(points.back().x - 1.0) > eps || std::abs(points.back().y - 1.0) > eps)
        throw data_error("lorenz curve: must end at (1,1)");
    for (size_t i = 1; i < points.size(); ++i) {
        if (points[i].x < points[i - 1].x - eps || points[i].y < points[i - 1].y - eps)
            throw data_error("lorenz curve: not non-decreasing");
        if (points[i].y > points[i].x + eps)
            throw data_error("lorenz curve: above the equality line (incomes not ascending?)");
    }
}

namespace {

// (population, income) slices in ascending income order build the curve.
lorenz_curve curve_from_slices(const std::vector<std::pair<double, double>>& slices) {
    double w_tot = 0.0, m_tot = 0.0;
    for (const auto& [w, x] : slices) {
        w_tot += w;
        m_tot += w * x;
    }
    if (!(w_tot > 0.0)) throw std::invalid_argument("lorenz: zero total population");
    lorenz_curve c;
    c.points.push_back({0.0, 0.0});
    double cw = 0.0, cm = 0.0;
    for (const auto& [w, x] : slices) {
        cw += w;
        cm += w * x;
        c.points.push_back({cw / w_tot, m_tot > 0.0 ? cm / m_tot : cw / w_tot});
    }
    // land exactly on (1,1) regardless of summation rounding
    c.points.back() = {1.0, 1.0};
    return c;
}

}  // namespace

lorenz_result lorenz_from_bins(const binned_pid& pid, empirical::bin_income_mode income_mode,
                               const open_bin_mode& open_mode) {
    pid.validate();
    if (pid.bins.empty()) throw std::invalid_argument("lorenz_from_bins: empty table");
    lorenz_result res;
    std::vector<std::pair<double, double>> slices;  // (count, income)
    double prev_income = -1.0;
    for (const auto& b : pid.bins) {
        if (b.zero_mass()) {
            slices.emplace_back(b.count, 0.0);
            prev_income = 0.0;
            continue;
        }
        if (!b.open()) {
            const double inc = empirical::effective_bin_income(b, income_mode);
            if (inc <= prev_income)
                throw data_error("lorenz_from_bins: effective bin incomes not increasing "
                                 "(corrupted input)");
            prev_income = inc;
            slices.emplace_back(b.count, inc);
            continue;
        }
        // open bin
        if (std::holds_alternative<open_bin_drop>(open_mode)) {
            res.dropped_open = true;
            continue;
        }
        if (std::holds_alternative<open_bin_reported_mean>(open_mode)) {
            if (!b.mean_income)
                throw std::invalid_argument("lorenz_from_bins: open bin has no reported mean");
            if (*b.mean_income <= prev_income)
                throw data_error("lorenz_from_bins: open-bin mean below the last closed bin");
            slices.emplace_back(b.count, *b.mean_income);
            continue;
        }
        const auto& par = std::get<open_bin_pareto>(open_mode);
        if (!(par.k > 1.0))
            throw std::invalid_argument("lorenz_from_bins: pareto open bin requires k > 1");
        const int n = std::max(1, par.sub_quantiles);
        const double x_m = b.lower;
        const double ex = 1.0 - 1.0 / par.k;
        // slice s covers quantiles [s/n, (s+1)/n) of the tail law; its total
        // income is x_m*k/(k-1)*((1-q0)^(1-1/k) - (1-q1)^(1-1/k)).
        for (int s = 0; s < n; ++s) {
            const double q0 = static_cast<double>(s) / n;
            const double q1 = static_cast<double>(s + 1) / n;
            const double mass = x_m * par.k / (par.k - 1.0) *
                                (std::pow(1.0 - q0, ex) - std::pow(1.0 - q1, ex));
            slices.emplace_back(b.count / n, mass * n);
        }
    }
    res.curve = curve_from_slices(slices);
    res.curve.validate();
    return res;
}

double gini_trapezoid(const lorenz_curve& c) {
    c.validate();
    double g = 1.0;
    for (size_t i = 1; i < c.points.size(); ++i)
        g -= (c.points[i].x - c.points[i - 1].x) * (c.points[i].y + c.points[i - 1].y);
    return g;
}

exact_gini gini_exact(const std::vector<std::pair<double, double>>& income_weight) {
    double w_tot = 0.0, m_tot = 0.0;
    for (const auto& [x, w] : income_weight) {
        if (x < 0.0) throw std::invalid_argument("gini_exact: negative income");
        if (w < 0.0) throw std::invalid_argument("gini_exact: negative weight");
        w_tot += w;
        m_tot += w * x;
    }
    if (!(w_tot > 0.0)) throw std::invalid_argument("gini_exact: zero total weight");
    if (m_tot == 0.0) return {0.0, true};
    auto sorted = income_weight;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front().first == sorted.back().first) return {0.0, false};  // exact equality
    double g = 1.0, cw = 0.0, cm = 0.0;
    double px = 0.0, py = 0.0;
    for (const auto& [x, w] : sorted) {
        if (w == 0.0) continue;
        cw += w;
        cm += w * x;
        const double nx = cw / w_tot, ny = cm / m_tot;
        g -= (nx - px) * (ny + py);
        px = nx;
        py = ny;
    }
    g -= (1.0 - px) * (1.0 + py);  // close any residual gap from rounding
    return {g, false};
}

exact_gini gini_exact(const synthesis::synthetic_population& pop) {
    std::vector<std::pair<double, double>> xw;
    xw.reserve(pop.entries.size());
    for (const auto& e : pop.entries) xw.emplace_back(e.income, e.weight);
    return gini_exact(xw);
}

binned_pid with_zero_income_mass(const binned_pid& pid, double zero_count) {
    if (zero_count < 0.0) throw std::invalid_argument("with_zero_income_mass: negative count");
    binned_pid out = pid;
    if (!out.bins.empty() && out.bins.front().zero_mass()) {
        out.bins.front().count += zero_count;
        return out;
    }
    income_bin z;
    z.lower = 0.0;
    z.upper = 0.0;
    z.count = zero_count;
    out.bins.insert(out.bins.begin(), z);
    out.validate();
    return out;
}

double pareto_k_from_mean(double x_m, double x_av, convention conv) {
    if (!(x_m > 0.0) || !(x_av > x_m))
        throw std::invalid_argument("pareto_k_from_mean: requires x_av > x_m > 0");
    const double paper_k = x_m / (x_av - x_m);
    return conv == convention::paper ? paper_k : paper_k + 1.0;
}

double pareto_k_from_regression(const std::vector<empirical::density_point>& points,
                                convention conv) {
    if (points.size() < 3)
        throw std::invalid_argument("pareto_k_from_regression: need at least 3 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        if (!(p.income > 0.0) || !(p.density > 0.0))
            throw std::invalid_argument("pareto_k_from_regression: non-positive point");
        const double lx = std::log(p.income), ly = std::log(p.density);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(points.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return conv == convention::paper ? -slope - 2.0 : -slope - 1.0;
}

double pareto_k_from_regression(const empirical::density_pid& density, double threshold,
                                convention conv) {
    std::vector<empirical::density_point> pts;
    for (const auto& p : density.points)
        if (p.income >= threshold) pts.push_back(p);
    return pareto_k_from_regression(pts, conv);
}

double pareto_gini_oracle(double k) {
    if (!(k > 1.0)) throw std::invalid_argument("pareto_gini_oracle: k must be > 1");
    return 1.0 / (2.0 * k - 1.0);
}

const std::vector<age_group_index>& age_group_pareto_indices() {
    static const std::vector<age_group_index> table = {
        {25, 34, 1.91},
        {35, 44, 1.48},
        {45, 54, 1.38},
        {55, 64, 1.14},
    };
    return table;
}

void save_lorenz(const lorenz_curve& c, const std::string& path) {
    csv::writer w(path);
    w.row({"x", "y"});
    for (const auto& p : c.points) w.row({csv::fmt(p.x), csv::fmt(p.y)});
}

}  // namespace incomesim::inequality
