#pragma once

#include <map>
#include <string>
#include <vector>

namespace incomesim::demography {

/// Per-year counts of people by single year of age, contiguous age range.
/// Populations are real-valued so per-state weights divide exactly.
class age_pyramid {
  public:
    age_pyramid(int year, int first_age, std::vector<double> counts);

    int year() const { return year_; }
    int first_age() const { return first_age_; }
    int last_age() const { return first_age_ + static_cast<int>(counts_.size()) - 1; }
    double population(int age) const;
    double total() const;
    const std::vector<double>& counts() const { return counts_; }

  private:
    int year_;
    int first_age_;
    std::vector<double> counts_;
};

using pyramid_set = std::map<int, age_pyramid>;

/// Reads the `pyramid.csv` schema: year,age,population (one row per pair).
pyramid_set load_pyramids(const std::string& path);

void save_pyramids(const pyramid_set& p, const std::string& path);

struct uniform_shape {
    double level;
};
struct linear_shape {
    double base;   // count at the first modelled age
    double slope;  // change per year of age
};

age_pyramid synthetic_pyramid(int year, uniform_shape s, int first_age = 16, int last_age = 75);
age_pyramid synthetic_pyramid(int year, linear_shape s, int first_age = 16, int last_age = 75);

}  // namespace incomesim::demography
