#include "incomesim/demography.hpp"

#include <numeric>
#include <stdexcept>

#include "incomesim/csv.hpp"

namespace incomesim::demography {

age_pyramid::age_pyramid(int year, int first_age, std::vector<double> counts)
    : year_(year), first_age_(first_age), counts_(std::move(counts)) {
    if (counts_.empty()) throw data_error("age pyramid: no ages");
    for (size_t i = 0; i < counts_.size(); ++i)
        if (counts_[i] < 0.0)
            throw data_error("age pyramid: negative population at age " +
                             std::to_string(first_age_ + static_cast<int>(i)));
}

double age_pyramid::population(int age) const {
    if (age < first_age() || age > last_age())
        throw std::out_of_range("age pyramid " + std::to_string(year_) + ": age " +
                                std::to_string(age) + " outside " + std::to_string(first_age()) +
                                ".." + std::to_string(last_age()));
    return counts_[static_cast<size_t>(age - first_age_)];
}

double age_pyramid::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0.0);
}

pyramid_set load_pyramids(const std::string& path) {
    auto t = csv::read_file(path);
    if (t.header != std::vector<std::string>{"year", "age", "population"})
        throw data_error(path + ": header does not match pyramid.csv schema");
    // (year -> (first_age, counts)); rows for a year must be contiguous ascending ages
    std::map<int, std::pair<int, std::vector<double>>> acc;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& cells = t.rows[r];
        long ln = t.line_numbers[r];
        if (cells.size() != 3)
            throw data_error(path + ":" + std::to_string(ln) + ": expected 3 fields");
        int year = static_cast<int>(csv::parse_int(cells[0], path, ln));
        int age = static_cast<int>(csv::parse_int(cells[1], path, ln));
        double pop = csv::parse_double(cells[2], path, ln);
        if (pop < 0.0)
            throw data_error(path + ":" + std::to_string(ln) + ": negative population");
        auto it = acc.find(year);
        if (it == acc.end()) {
            acc.emplace(year, std::make_pair(age, std::vector<double>{pop}));
        } else {
            int expect = it->second.first + static_cast<int>(it->second.second.size());
            if (age != expect)
                throw data_error(path + ":" + std::to_string(ln) + ": gap at " +
                                 std::to_string(expect) + " for year " + std::to_string(year));
            it->second.second.push_back(pop);
        }
    }
    pyramid_set out;
    for (auto& [year, fa] : acc)
        out.emplace(year, age_pyramid(year, fa.first, std::move(fa.second)));
    return out;
}

void save_pyramids(const pyramid_set& p, const std::string& path) {
    csv::writer w(path);
    w.row({"year", "age", "population"});
    for (const auto& [year, pyr] : p)
        for (int a = pyr.first_age(); a <= pyr.last_age(); ++a)
            w.row({std::to_string(year), std::to_string(a), csv::fmt(pyr.population(a))});
}

age_pyramid synthetic_pyramid(int year, uniform_shape s, int first_age, int last_age) {
    if (s.level < 0.0) throw std::invalid_argument("synthetic_pyramid: negative level");
    return age_pyramid(year, first_age,
                       std::vector<double>(static_cast<size_t>(last_age - first_age + 1), s.level));
}

age_pyramid synthetic_pyramid(int year, linear_shape s, int first_age, int last_age) {
    std::vector<double> counts;
    for (int a = first_age; a <= last_age; ++a) {
        double c = s.base + s.slope * (a - first_age);
        if (c < 0.0)
            throw std::invalid_argument("synthetic_pyramid: negative count at age " +
                                        std::to_string(a));
        counts.push_back(c);
    }
    return age_pyramid(year, first_age, std::move(counts));
}

}  // namespace incomesim::demography
