// Batch front end: wires CSV inputs to the model and emits plot-ready
// CSV/JSON. Exit status: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <regex>
#include <string>

#include "incomesim/calibrate.hpp"
#include "incomesim/csv.hpp"
#include "incomesim/demography.hpp"
#include "incomesim/economy.hpp"
#include "incomesim/empirical.hpp"
#include "incomesim/inequality.hpp"
#include "incomesim/kernels.hpp"
#include "incomesim/pid.hpp"
#include "incomesim/synthesis.hpp"
#include "incomesim/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace incomesim;

namespace {

// ---------------------------------------------------------------------------
// config file: flat `key = value`, keys mirror the model parameter names
// ---------------------------------------------------------------------------

economy::factor_kind parse_driver(const std::string& name) {
    for (auto k : economy::all_kinds)
        if (name == economy::kind_name(k)) return k;
    throw data_error("unknown driver kind '" + name + "'");
}

trajectory::model_params load_config(const std::string& path) {
    trajectory::model_params p;  // defaults: the 1960 preset
    std::ifstream in(path);
    if (!in) throw data_error(path + ": cannot open config");
    std::string line;
    long ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw data_error(path + ":" + std::to_string(ln) + ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "t0") p.t0 = std::stoi(val);
            else if (key == "alpha0") p.alpha0 = std::stod(val);
            else if (key == "tcr0") p.tcr0 = std::stod(val);
            else if (key == "mp0") p.mp0 = std::stod(val);
            else if (key == "grid_min") p.grid_min = std::stoi(val);
            else if (key == "grid_max") p.grid_max = std::stoi(val);
            else if (key == "reference_age") p.reference_age = std::stod(val);
            else if (key == "reference_level") p.reference_level = std::stod(val);
            else if (key == "k") p.k = std::stod(val);
            else if (key == "tail_factor") p.tail_factor = std::stod(val);
            else if (key == "work_start_age") p.work_start_age = std::stoi(val);
            else if (key == "age_min") p.age_min = std::stoi(val);
            else if (key == "age_max") p.age_max = std::stoi(val);
            else if (key == "driver_kind") p.driver = parse_driver(val);
            else if (key == "pareto_convention")
                p.convention = val == "standard" ? trajectory::pareto_convention::standard
                                                 : trajectory::pareto_convention::paper;
            else
                throw data_error(path + ":" + std::to_string(ln) + ": unknown key '" + key + "'");
        } catch (const data_error&) {
            throw;
        } catch (const std::exception&) {
            throw data_error(path + ":" + std::to_string(ln) + ": bad value for " + key);
        }
    }
    return p;
}

std::pair<int, int> parse_years(std::string s) {
    static const std::regex re(R"((\d+)(?:\.\.|:|-)(\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw data_error("bad year range '" + s + "'");
    const int a = std::stoi(m[1]), b = std::stoi(m[2]);
    if (a > b) throw data_error("bad year range '" + s + "': first year after last");
    return {a, b};
}

std::pair<double, double> parse_colon_pair(const std::string& s, const char* what) {
    auto pos = s.find(':');
    if (pos == std::string::npos) throw data_error(std::string("bad ") + what + " '" + s + "'");
    try {
        return {std::stod(s.substr(0, pos)), std::stod(s.substr(pos + 1))};
    } catch (const std::exception&) {
        throw data_error(std::string("bad ") + what + " '" + s + "'");
    }
}

calibrate::grid_spec parse_grid(const std::string& s, double default_step) {
    std::vector<double> v;
    size_t start = 0;
    while (true) {
        auto pos = s.find(':', start);
        try {
            v.push_back(std::stod(s.substr(start, pos - start)));
        } catch (const std::exception&) {
            throw data_error("grid must be LO:HI[:STEP], got '" + s + "'");
        }
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (v.size() == 2) v.push_back(default_step);
    if (v.size() != 3) throw data_error("grid must be LO:HI[:STEP], got '" + s + "'");
    return calibrate::grid_spec{v[0], v[1], v[2]};
}

void write_json(const ordered_json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error(path.string() + ": cannot open for writing");
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct simulate_args {
    std::string config, gdp, pyramid, years, anchor, project, out = ".";
    double bins = 0.0;  // 0: default per units (0.001 dimensionless, $2500)
    int band_width = 10;
    bool warm_start = false;
};

int run_simulate(const simulate_args& a) {
    trajectory::model_params params =
        a.config.empty() ? trajectory::preset_1960() : load_config(a.config);
    auto series = economy::load_growth_series(a.gdp);
    auto pyramids = demography::load_pyramids(a.pyramid);
    auto [y0, y1] = parse_years(a.years);
    if (!a.project.empty()) {
        auto [rate, until] = parse_colon_pair(a.project, "projection RATE:UNTIL");
        auto proj = synthesis::project_forward(series, pyramids, rate, static_cast<int>(until));
        series = std::move(proj.series);
        pyramids = std::move(proj.pyramids);
    }
    std::optional<synthesis::dollar_anchor> anchor;
    if (!a.anchor.empty()) {
        auto [ay, dollars] = parse_colon_pair(a.anchor, "anchor YEAR:DOLLARS");
        anchor = synthesis::dollar_anchor{static_cast<int>(ay), dollars};
    }
    synthesis::sim_options opt;
    opt.steady_state_init = a.warm_start;
    synthesis::simulator sim(params, series, y1, opt);
    fs::create_directories(a.out);
    for (int y = y0; y <= y1; ++y) {
        auto pop = sim.simulate_year(pyramids, y);
        auto tail = synthesis::attach_pareto_tail(params, sim.context(), std::move(pop));
        double scale = 1.0;
        if (anchor) scale = synthesis::scale_factor(params, series, y, *anchor).dollars_per_unit;
        const auto units =
            anchor ? income_units::current_dollars : income_units::dimensionless;
        const double width = a.bins > 0.0 ? a.bins : (anchor ? 2500.0 : 0.001);
        auto pid = synthesis::to_binned(tail.population, width, scale, units);
        save_binned(pid, (fs::path(a.out) / ("pid_" + std::to_string(y) + ".csv")).string());

        auto bands = synthesis::mean_median_by_experience(tail.population, a.band_width);
        csv::writer bw((fs::path(a.out) / ("bands_" + std::to_string(y) + ".csv")).string());
        bw.row({"band_lo", "band_hi", "mean", "median", "norm_mean", "norm_median"});
        for (const auto& b : bands)
            bw.row({csv::fmt(b.exp_lo), csv::fmt(b.exp_hi), csv::fmt(b.mean * scale),
                    csv::fmt(b.median * scale), csv::fmt(b.norm_mean), csv::fmt(b.norm_median)});

        ordered_json j;
        j["year"] = y;
        j["gini"] = inequality::gini_exact(tail.population).value;
        j["tail_share"] = synthesis::portion_above(tail.population, tail.threshold).overall;
        j["extra_income_ratio"] = tail.extra_income_ratio;
        j["tcr"] = trajectory::tcr_at(params, sim.context(), y);
        j["mp"] = trajectory::mp_at(params, sim.context(), y);
        j["scale"] = scale;
        write_json(j, fs::path(a.out) / ("summary_" + std::to_string(y) + ".json"));
    }
    return 0;
}

struct gini_args {
    std::string pid, open_bin = "drop", bin_income = "center", out = ".";
    double zero_count = 0.0;
};

int run_gini(const gini_args& a) {
    auto pid = load_binned(a.pid);
    if (a.zero_count > 0.0) pid = inequality::with_zero_income_mass(pid, a.zero_count);

    inequality::open_bin_mode mode = inequality::open_bin_drop{};
    std::optional<double> k;
    if (a.open_bin.rfind("pareto:", 0) == 0) {
        k = std::stod(a.open_bin.substr(7));
        mode = inequality::open_bin_pareto{*k};
    } else if (a.open_bin == "mean") {
        mode = inequality::open_bin_reported_mean{};
    } else if (a.open_bin != "drop") {
        throw data_error("unknown --open-bin mode '" + a.open_bin + "'");
    }
    empirical::bin_income_mode im = empirical::bin_income_mode::center;
    if (a.bin_income == "mean") im = empirical::bin_income_mode::reported_mean;
    else if (a.bin_income == "offset") im = empirical::bin_income_mode::offset_corrected;
    else if (a.bin_income != "center") throw data_error("unknown --bin-income mode");

    auto lor = inequality::lorenz_from_bins(pid, im, mode);
    if (lor.dropped_open)
        std::cerr << "warning: open-ended bin dropped and shares renormalized\n";
    fs::create_directories(a.out);
    inequality::save_lorenz(lor.curve, (fs::path(a.out) / "lorenz.csv").string());

    ordered_json j;
    j["gini"] = inequality::gini_trapezoid(lor.curve);
    j["convention"] = "standard";
    j["open_bin_mode"] = a.open_bin;
    if (k) {
        j["k"] = *k;
        j["x_m"] = pid.has_open() ? pid.bins.back().lower : 0.0;
    } else {
        j["k"] = nullptr;
        j["x_m"] = nullptr;
    }
    write_json(j, fs::path(a.out) / "gini.json");
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct normalize_args {
    std::string pid, out = ".";
    bool per_person = false, density = false;
    double rescale = 0.0, gpi = 0.0;
};

int run_normalize(const normalize_args& a) {
    auto pid = load_binned(a.pid);
    if (a.per_person) pid = empirical::per_person(pid);
    if (a.rescale > 0.0 && a.gpi > 0.0) throw data_error("--rescale and --gpi are exclusive");
    if (a.rescale > 0.0) pid = empirical::rescale_income(pid, a.rescale);
    if (a.gpi > 0.0) pid = empirical::rescale_income(pid, a.gpi);
    fs::create_directories(a.out);
    if (a.density) {
        auto d = empirical::to_density(pid);
        empirical::save_density(d, (fs::path(a.out) / "density.csv").string());
    } else {
        save_binned(pid, (fs::path(a.out) / "pid.csv").string());
    }
    return 0;
}

struct fit_args {
    std::string pid, method = "mean", conv = "paper", out = ".";
    double threshold = 0.0;
};

int run_pareto_fit(const fit_args& a) {
    auto pid = load_binned(a.pid);
    const auto conv =
        a.conv == "standard" ? inequality::convention::standard : inequality::convention::paper;
    ordered_json j;
    j["method"] = a.method;
    j["convention"] = inequality::convention_name(conv);
    j["x_m"] = a.threshold;
    if (a.method == "mean") {
        double w = 0.0, wx = 0.0;
        for (const auto& b : pid.bins) {
            if (b.lower < a.threshold || b.count <= 0.0) continue;
            double inc;
            if (b.mean_income) inc = *b.mean_income;
            else if (!b.open()) inc = b.center();
            else throw data_error("pareto-fit mean: open bin without reported mean");
            w += b.count;
            wx += b.count * inc;
        }
        if (!(w > 0.0)) throw data_error("pareto-fit: no bins above threshold");
        j["x_av"] = wx / w;
        j["k"] = inequality::pareto_k_from_mean(a.threshold, wx / w, conv);
    } else if (a.method == "regression") {
        auto d = empirical::to_density(pid);
        j["k"] = inequality::pareto_k_from_regression(d, a.threshold, conv);
    } else {
        throw data_error("unknown --method '" + a.method + "'");
    }
    fs::create_directories(a.out);
    write_json(j, fs::path(a.out) / "pareto_fit.json");
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct calibrate_args {
    std::string obs, gdp, pyramid, alpha, tcr, config, out = ".";
};

int run_calibrate(const calibrate_args& a) {
    trajectory::model_params base =
        a.config.empty() ? trajectory::preset_1960() : load_config(a.config);
    auto series = economy::load_growth_series(a.gdp);
    auto pyramids = demography::load_pyramids(a.pyramid);
    std::map<int, binned_pid> obs;
    static const std::regex year_re(R"((\d{4}))");
    for (const auto& entry : fs::directory_iterator(a.obs)) {
        if (entry.path().extension() != ".csv") continue;
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (!std::regex_search(name, m, year_re))
            throw data_error(name + ": observation file name must contain the year");
        obs.emplace(std::stoi(m[1]),
                    load_binned(entry.path().string(), income_units::dimensionless));
    }
    if (obs.empty()) throw data_error(a.obs + ": no observation csv files");
    auto res = calibrate::fit_model(base, parse_grid(a.alpha, 0.001), parse_grid(a.tcr, 0.5),
                                    obs, series, pyramids);
    fs::create_directories(a.out);
    calibrate::save_misfit_surface(res.surface, (fs::path(a.out) / "misfit.csv").string());
    ordered_json j;
    j["alpha0"] = res.best.alpha0;
    j["tcr0"] = res.best.tcr0;
    j["misfit"] = res.best_misfit;
    j["grid_points"] = res.surface.size();
    write_json(j, fs::path(a.out) / "calibrate.json");
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic income-distribution model and empirical toolkit"};
    app.require_subcommand(1);

    simulate_args sa;
    auto* sim = app.add_subcommand("simulate", "simulate income distributions for a year range");
    sim->add_option("--config", sa.config, "model config file (key = value)");
    sim->add_option("--gdp", sa.gdp, "growth-factor csv")->required();
    sim->add_option("--pyramid", sa.pyramid, "age pyramid csv")->required();
    sim->add_option("--years", sa.years, "year range A..B")->required();
    sim->add_option("--bins", sa.bins,
                    "bin width in output units (default 0.001 dimensionless, $2500 with an anchor)");
    sim->add_option("--anchor", sa.anchor, "dollar scale anchor YEAR:DOLLARS");
    sim->add_option("--project", sa.project, "extend the series: RATE:UNTIL");
    sim->add_option("--band-width", sa.band_width, "experience band width");
    sim->add_flag("--warm-start", sa.warm_start, "steady-state cohort initialization at t0");
    sim->add_option("--out", sa.out, "output directory");

    gini_args ga;
    auto* gin = app.add_subcommand("gini", "Lorenz curve and Gini coefficient of a binned table");
    gin->add_option("--pid", ga.pid, "binned pid csv")->required();
    gin->add_option("--zero-count", ga.zero_count, "people added at exactly zero income");
    gin->add_option("--open-bin", ga.open_bin, "pareto:K | mean | drop");
    gin->add_option("--bin-income", ga.bin_income, "center | mean | offset");
    gin->add_option("--out", ga.out, "output directory");

    normalize_args na;
    auto* nor = app.add_subcommand("normalize", "normalize and convert a binned table");
    nor->add_option("--pid", na.pid, "binned pid csv")->required();
    nor->add_flag("--per-person", na.per_person, "divide counts by the total");
    nor->add_option("--rescale", na.rescale, "divide incomes by FACTOR")
        ->check(CLI::PositiveNumber);
    nor->add_option("--gpi", na.gpi, "divide incomes by gross personal income TOTAL")
        ->check(CLI::PositiveNumber);
    nor->add_flag("--density", na.density, "emit density.csv instead of pid.csv");
    nor->add_option("--out", na.out, "output directory");

    fit_args fa;
    auto* fit = app.add_subcommand("pareto-fit", "estimate the Pareto tail index");
    fit->add_option("--pid", fa.pid, "binned pid csv")->required();
    fit->add_option("--threshold", fa.threshold, "tail threshold x_m")->required();
    fit->add_option("--method", fa.method, "mean | regression");
    fit->add_option("--convention", fa.conv, "paper | standard");
    fit->add_option("--out", fa.out, "output directory");

    calibrate_args ca;
    auto* cal = app.add_subcommand("calibrate", "grid-search alpha0 and tcr0 against observations");
    cal->add_option("--obs", ca.obs, "directory of dimensionless pid_YYYY.csv files")->required();
    cal->add_option("--gdp", ca.gdp, "growth-factor csv")->required();
    cal->add_option("--pyramid", ca.pyramid, "age pyramid csv")->required();
    cal->add_option("--alpha", ca.alpha, "alpha0 grid LO:HI[:STEP], default step 0.001")
        ->required();
    cal->add_option("--tcr", ca.tcr, "tcr0 grid LO:HI[:STEP], default step 0.5")->required();
    cal->add_option("--config", ca.config, "base model config");
    cal->add_option("--out", ca.out, "output directory");

    auto* ker = app.add_subcommand("kernels", "report the active arithmetic kernel backend");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 1;
    }

    try {
        if (sim->parsed()) return run_simulate(sa);
        if (gin->parsed()) return run_gini(ga);
        if (nor->parsed()) return run_normalize(na);
        if (fit->parsed()) return run_pareto_fit(fa);
        if (cal->parsed()) return run_calibrate(ca);
        if (ker->parsed()) {
            size_t n = 0;
            const auto* b = kernels::supported_backends(&n);
            std::cout << "active: " << kernels::active().name << "\nsupported:";
            for (size_t i = 0; i < n; ++i) std::cout << ' ' << b[i].name;
            std::cout << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
