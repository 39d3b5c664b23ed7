#pragma once

#include <cstdint>
#include <vector>

#include "rb/noise.hpp"
#include "rb/ptm.hpp"
#include "rb/series.hpp"

namespace rb {

// Parameters of the twirled qutrit error channel's upper block:
//   diag(1, alpha, alpha, alpha) with a55 at the third-level population
//   entry and a51 feeding it from the identity component.
// Ground-state survival follows
//   F(m) = alpha^m / 2 + 1/3 + a55^m / 6 + (a51 / (3 sqrt 2)) sum_{j<m} a55^j
//        = C1 alpha^m + C2 a55^m + C3
// with C1 = 1/2, C2 = 1/6 - D, C3 = 1/3 + D, D = a51/(3 sqrt2 (1 - a55)).
// Unital noise has a51 = 0, so the survival decays to C3 = 1/3.
struct LeakageFdmParams {
    double alpha = 1.0;
    double a55 = 1.0;
    double a51 = 0.0;

    double d_term() const;
    double c1() const { return 0.5; }
    double c2() const;
    double c3() const;
};

double leakage_fdm(long m, const LeakageFdmParams& p);

// Twirl a trace-preserving qutrit channel over the 48-element extended group
// and read off (alpha, a55, a51). Throws if the twirl leaves off-block mass
// above 1e-8.
LeakageFdmParams extract_block_params(const Ptm& qutrit_error);

// Ground-state RB over the extended qutrit group under leakage noise.
DecaySeries run_leakage_rb(const NoiseModelConfig& noise, int k,
                           const std::vector<int>& m_grid, std::uint64_t seed,
                           int threads = 1);

}  // namespace rb
