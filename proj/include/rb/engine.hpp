#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rb/noise.hpp"
#include "rb/series.hpp"

namespace rb {

enum class Protocol { srb, irb };

struct InterleavedSpec {
    int gate = 16;  // Clifford index of the gate under test
    NoiseModelConfig noise;
};

// m-grid {1, 2, 4, ...} up to m_max.
std::vector<int> default_m_grid(int m_max);

struct ExperimentPlan {
    Protocol protocol = Protocol::srb;
    int k = 10000;
    std::vector<int> m_grid = default_m_grid(4096);
    // Unset: exact expectation values. Set: binomial sampling per sequence.
    std::optional<long> shots;
    NoiseModelConfig noise;
    std::optional<InterleavedSpec> interleaved;
    std::uint64_t seed = 0;

    void validate() const;
};

// Standard RB: per (m, k) draw uniform group elements, append the inverting
// gate from the exact group table, compose noisy channels (error after ideal
// gate, the inversion gate included), and average ground-state survival over
// the K sequences. Qutrit noise kinds run over the 48-element extended group.
// Parallel and serial runs produce identical bytes: sequence k of length m is
// seeded by (seed, m, k) and results reduce pairwise in index order.
DecaySeries run_srb(const ExperimentPlan& plan, int threads = 1);

// Interleaved RB: reference run plus a run with the gate of interest (and
// its own noise) inserted after every random Clifford.
std::pair<DecaySeries, DecaySeries> run_irb(const ExperimentPlan& plan,
                                            int threads = 1);

// r_int estimate from the two fitted depolarizing parameters; may be
// negative and is reported unclamped.
double irb_estimate_r(double alpha_ref, double alpha_interleaved, int dim = 2);

}  // namespace rb
