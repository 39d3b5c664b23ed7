#pragma once

#include <cmath>
#include <span>

namespace rb {

// Pairwise summation; parallel and serial runs reduce in the same order, so
// results are reproducible to the last bit.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanStderr mean_and_stderr(std::span<const double> v) {
    MeanStderr out;
    const double n = static_cast<double>(v.size());
    if (v.empty()) return out;
    out.mean = pairwise_sum(v) / n;
    if (v.size() < 2) return out;
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

}  // namespace rb
