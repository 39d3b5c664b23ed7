#pragma once

#include <string>
#include <vector>

namespace rb {

// Averaged fidelity-decay data from one RB experiment: one row per sequence
// length m with the sample mean survival over K sequences and its standard
// error (sample std / sqrt(K)).
struct DecaySeries {
    std::vector<double> m;
    std::vector<double> f_mean;
    std::vector<double> f_stderr;
    int k = 0;
    std::string meta;  // JSON echo of the generating plan, if any
};

std::string to_csv(const DecaySeries& s);
DecaySeries series_from_csv(const std::string& csv);

}  // namespace rb
