#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>

#include "incomesim/csv.hpp"
#include "incomesim/inequality.hpp"

using namespace incomesim;
using namespace incomesim::inequality;
using empirical::bin_income_mode;

namespace {

income_bin closed(double lo, double hi, double count) {
    income_bin b;
    b.lower = lo;
    b.upper = hi;
    b.count = count;
    return b;
}

// brute-force pairwise-difference Gini: sum |xi-xj| wi wj / (2 W^2 mu)
double pairwise_gini(const std::vector<std::pair<double, double>>& xw) {
    double w = 0.0, m = 0.0;
    for (auto& [x, wt] : xw) {
        w += wt;
        m += wt * x;
    }
    const double mu = m / w;
    if (mu == 0.0) return 0.0;
    double s = 0.0;
    for (auto& [xa, wa] : xw)
        for (auto& [xb, wb] : xw) s += wa * wb * std::abs(xa - xb);
    return s / (2.0 * w * w * mu);
}

// pure Pareto population as a log-spaced binned table with analytic bin means
binned_pid pareto_binned(double k, double x_m, size_t n_bins, double top) {
    binned_pid pid;
    const double n = 1e7;
    auto cdf = [&](double x) { return 1.0 - std::pow(x_m / x, k); };
    for (size_t i = 0; i < n_bins; ++i) {
        const double lo = x_m * std::pow(top / x_m, static_cast<double>(i) / n_bins);
        const double hi = x_m * std::pow(top / x_m, static_cast<double>(i + 1) / n_bins);
        auto b = closed(lo, hi, n * (cdf(hi) - cdf(lo)));
        const double mass = k * std::pow(x_m, k) / (k - 1.0) *
                            (std::pow(lo, 1.0 - k) - std::pow(hi, 1.0 - k));
        b.mean_income = mass / (std::pow(x_m / lo, k) - std::pow(x_m / hi, k));
        pid.bins.push_back(b);
    }
    income_bin open;
    open.lower = top;
    open.count = n * std::pow(x_m / top, k);
    pid.bins.push_back(open);
    return pid;
}

}  // namespace

TEST_CASE("single bin gives the equality curve") {
    binned_pid pid;
    pid.bins = {closed(0, 10, 42.0)};
    auto lor = lorenz_from_bins(pid, bin_income_mode::center, open_bin_drop{});
    REQUIRE(lor.curve.points.size() == 2);
    CHECK(gini_trapezoid(lor.curve) == 0.0);
}

TEST_CASE("two equal bins put a quarter of income behind half the people") {
    binned_pid pid;
    pid.bins = {closed(5, 15, 6.0), closed(25, 35, 6.0)};  // effective incomes 10 and 30
    auto lor = lorenz_from_bins(pid, bin_income_mode::center, open_bin_drop{});
    REQUIRE(lor.curve.points.size() == 3);
    CHECK(lor.curve.points[1].x == doctest::Approx(0.5));
    CHECK(lor.curve.points[1].y == doctest::Approx(0.25));
}

TEST_CASE("open-bin handling") {
    binned_pid pid;
    pid.bins = {closed(0, 100000, 90.0)};
    income_bin open;
    open.lower = 100000.0;
    open.count = 10.0;
    pid.bins.push_back(open);

    SUBCASE("pareto extension carries the analytic tail mean") {
        auto lor = lorenz_from_bins(pid, bin_income_mode::center, open_bin_pareto{1.31});
        // total tail income = count * k x_m/(k-1) = 10 * 422580.6...
        const double tail_mean = 1.31 / 0.31 * 100000.0;
        CHECK(tail_mean == doctest::Approx(422580.645).epsilon(1e-6));
        const double total = 90.0 * 50000.0 + 10.0 * tail_mean;
        CHECK(lor.curve.points[1].y == doctest::Approx(90.0 * 50000.0 / total).epsilon(1e-12));
        // ten sub-quantile vertices inside the tail
        CHECK(lor.curve.points.size() == 12);
        CHECK_FALSE(lor.dropped_open);
    }
    SUBCASE("reported mean") {
        pid.bins.back().mean_income = 176068.0;
        auto lor = lorenz_from_bins(pid, bin_income_mode::center, open_bin_reported_mean{});
        const double total = 90.0 * 50000.0 + 10.0 * 176068.0;
        CHECK(lor.curve.points[1].y == doctest::Approx(90.0 * 50000.0 / total).epsilon(1e-12));
    }
    SUBCASE("drop renormalizes with a warning flag") {
        auto lor = lorenz_from_bins(pid, bin_income_mode::center, open_bin_drop{});
        CHECK(lor.dropped_open);
        CHECK(gini_trapezoid(lor.curve) == 0.0);  // one bin left: equality
    }
    SUBCASE("pareto mode needs k above one") {
        CHECK_THROWS_AS(lorenz_from_bins(pid, bin_income_mode::center, open_bin_pareto{0.9}),
                        std::invalid_argument);
    }
}

TEST_CASE("non-monotone effective incomes are rejected") {
    binned_pid pid;
    pid.bins = {closed(0, 100, 5.0), closed(100, 200, 5.0)};
    pid.bins[0].mean_income = 90.0;
    pid.bins[1].mean_income = 80.0;  // corrupted: mean below the previous bin
    CHECK_THROWS_AS(lorenz_from_bins(pid, bin_income_mode::reported_mean, open_bin_drop{}),
                    data_error);
}

TEST_CASE("trapezoid rule on hand-made curves") {
    lorenz_curve eq;
    eq.points = {{0, 0}, {1, 1}};
    CHECK(gini_trapezoid(eq) == 0.0);

    lorenz_curve c;
    c.points = {{0, 0}, {0.5, 0.2}, {1, 1}};
    CHECK(gini_trapezoid(c) == doctest::Approx(0.3).epsilon(1e-12));

    lorenz_curve extreme;
    extreme.points = {{0, 0}, {1.0 - 1e-9, 0}, {1, 1}};
    CHECK(gini_trapezoid(extreme) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("exact weighted gini") {
    CHECK(gini_exact({{5.0, 1.0}, {5.0, 3.0}, {5.0, 2.0}}).value == doctest::Approx(0.0));
    CHECK(gini_exact({{0.0, 1.0}, {7.0, 1.0}}).value == doctest::Approx(0.5));
    CHECK(gini_exact({{1.0, 1.0}, {2.0, 1.0}, {3.0, 1.0}, {4.0, 1.0}}).value ==
          doctest::Approx(0.25));
    auto z = gini_exact({{0.0, 2.0}, {0.0, 1.0}});
    CHECK(z.value == 0.0);
    CHECK(z.all_zero);
    CHECK_THROWS_AS(gini_exact({{1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("exact gini matches the pairwise oracle on random instances") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> ux(0.0, 100.0), uw(0.1, 5.0);
    std::uniform_int_distribution<int> un(2, 50);
    for (int rep = 0; rep < 300; ++rep) {
        std::vector<std::pair<double, double>> xw;
        const int n = un(rng);
        for (int i = 0; i < n; ++i) xw.emplace_back(ux(rng), uw(rng));
        CHECK(gini_exact(xw).value == doctest::Approx(pairwise_gini(xw)).epsilon(1e-12));
    }
}

TEST_CASE("scale and population invariance") {
    std::vector<std::pair<double, double>> xw = {{1, 1}, {4, 2}, {9, 0.5}, {16, 3}};
    const double g = gini_exact(xw).value;
    auto scaled = xw;
    for (auto& [x, w] : scaled) x *= 7.25;
    CHECK(gini_exact(scaled).value == doctest::Approx(g).epsilon(1e-14));
    auto heavier = xw;
    for (auto& [x, w] : heavier) w *= 3.5;
    CHECK(gini_exact(heavier).value == doctest::Approx(g).epsilon(1e-14));

    // the binned path is invariant too when edges, means, and counts scale
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uw(1.0, 50.0), uc(0.5, 20.0);
    for (int rep = 0; rep < 20; ++rep) {
        binned_pid pid, wider;
        double edge = 0.0, c = 4.0;
        for (int i = 0; i < 8; ++i) {
            const double next = edge + uw(rng);
            pid.bins.push_back(closed(edge, next, uc(rng)));
            wider.bins.push_back(closed(edge * c, next * c, pid.bins.back().count * 2.0));
            edge = next;
        }
        const double a = gini_trapezoid(
            lorenz_from_bins(pid, bin_income_mode::center, open_bin_drop{}).curve);
        const double b = gini_trapezoid(
            lorenz_from_bins(wider, bin_income_mode::center, open_bin_drop{}).curve);
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
    }
}

TEST_CASE("trapezoid over the exact vertices equals the exact gini") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 10.0), uw(0.5, 2.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<std::pair<double, double>> xw;
        for (int i = 0; i < 20; ++i) xw.emplace_back(ux(rng), uw(rng));
        std::sort(xw.begin(), xw.end());
        double W = 0.0, M = 0.0;
        for (auto& [x, w] : xw) {
            W += w;
            M += w * x;
        }
        lorenz_curve c;
        c.points.push_back({0.0, 0.0});
        double cw = 0.0, cm = 0.0;
        for (auto& [x, w] : xw) {
            cw += w;
            cm += w * x;
            c.points.push_back({cw / W, cm / M});
        }
        c.points.back() = {1.0, 1.0};
        CHECK(gini_trapezoid(c) == doctest::Approx(gini_exact(xw).value).epsilon(1e-12));
    }
}

TEST_CASE("zero-income mass") {
    binned_pid pid;
    pid.bins = {closed(10, 30, 10.0)};  // everyone at 20
    auto same = with_zero_income_mass(pid, 0.0);
    CHECK(same.bins.size() == 2);
    CHECK(same.bins.front().count == 0.0);

    auto half = with_zero_income_mass(pid, 10.0);
    auto lor = lorenz_from_bins(half, bin_income_mode::center, open_bin_drop{});
    CHECK(gini_trapezoid(lor.curve) == doctest::Approx(0.5).epsilon(1e-12));

    // gini is non-decreasing in the zero mass
    double prev = -1.0;
    for (double z : {0.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
        auto g = gini_trapezoid(
            lorenz_from_bins(with_zero_income_mass(pid, z), bin_income_mode::center,
                             open_bin_drop{})
                .curve);
        CHECK(g >= prev);
        prev = g;
    }
    // merging into an existing zero bin
    auto twice = with_zero_income_mass(with_zero_income_mass(pid, 3.0), 4.0);
    CHECK(twice.bins.front().count == 7.0);
    CHECK(twice.bins.size() == 2);
}

TEST_CASE("tail index from the mean above a threshold") {
    CHECK(pareto_k_from_mean(100000.0, 176068.0, convention::paper) ==
          doctest::Approx(1.31).epsilon(0.005));
    CHECK(pareto_k_from_mean(250000.0, 470616.0, convention::paper) ==
          doctest::Approx(1.13).epsilon(0.005));
    // the standard identity: mean of a k-index tail is k x_m/(k-1)
    const double k = 2.0, x_m = 1.0;
    const double x_av = k * x_m / (k - 1.0);
    CHECK(pareto_k_from_mean(x_m, x_av, convention::standard) == doctest::Approx(2.0));
    CHECK(pareto_k_from_mean(x_m, x_av, convention::paper) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pareto_k_from_mean(10.0, 5.0, convention::paper), std::invalid_argument);
}

TEST_CASE("tail index from the density regression") {
    std::vector<empirical::density_point> pts;
    for (double x : {1.0, 2.0, 4.0, 8.0, 16.0})
        pts.push_back({x, 100.0 * std::pow(x, -3.36), 1.0});
    CHECK(pareto_k_from_regression(pts, convention::paper) == doctest::Approx(1.36).epsilon(1e-9));
    // exact density of a k = 1.35 standard tail has slope -(k+1)
    std::vector<empirical::density_point> tail;
    for (double x : {1.0, 3.0, 9.0, 27.0}) tail.push_back({x, std::pow(x, -2.35), 1.0});
    CHECK(pareto_k_from_regression(tail, convention::standard) ==
          doctest::Approx(1.35).epsilon(1e-9));
    std::vector<empirical::density_point> two = {{1.0, 1.0, 1.0}, {2.0, 0.5, 1.0}};
    CHECK_THROWS_AS(pareto_k_from_regression(two, convention::paper), std::invalid_argument);
}

TEST_CASE("closed-form pareto gini") {
    CHECK(pareto_gini_oracle(1.35) == doctest::Approx(0.5882).epsilon(1e-4));
    CHECK(pareto_gini_oracle(100.0) < 0.006);
    CHECK(pareto_gini_oracle(1.0 + 1e-9) > 0.999);
    CHECK_THROWS_AS(pareto_gini_oracle(1.0), std::invalid_argument);
}

TEST_CASE("binned pareto gini approaches the closed form") {
    for (double k : {1.35, 2.0}) {
        auto pid = pareto_binned(k, 1.0, 120, 1000.0);
        auto lor = lorenz_from_bins(pid, bin_income_mode::reported_mean, open_bin_pareto{k});
        CHECK(std::abs(gini_trapezoid(lor.curve) - pareto_gini_oracle(k)) < 0.01);
    }
}

TEST_CASE("paper-convention mean estimator returns one less than the planted index") {
    // deterministic midpoint-quantile sample from a standard index-k tail
    const double k = 2.0, x_m = 1.0;
    const size_t n = 200000;
    double sum = 0.0;
    for (size_t r = 0; r < n; ++r)
        sum += x_m * std::pow((r + 0.5) / n, -1.0 / k);
    const double x_av = sum / n;
    CHECK(pareto_k_from_mean(x_m, x_av, convention::standard) == doctest::Approx(2.0).epsilon(0.02));
    CHECK(pareto_k_from_mean(x_m, x_av, convention::paper) == doctest::Approx(1.0).epsilon(0.02));
}
