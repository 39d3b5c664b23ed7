#pragma once

#include <cstdint>

#include "rb/ptm.hpp"

namespace rb {

enum class DiamondMethod { sdp, brute_force };

struct DiamondResult {
    double value = 0.0;
    DiamondMethod method = DiamondMethod::sdp;
    // sdp: barrier duality bound on the optimality gap (distance units);
    // brute_force: improvement of the local refinement over the coarse grid.
    double certificate_gap = 0.0;
    bool converged = true;
    int iterations = 0;
};

// Diamond-norm distance ||a - b||_diamond between two trace-preserving
// channels of equal dimension.
//
// sdp: the two-block semidefinite characterization on the difference map's
// Choi matrix, solved by a dense log-barrier method (the 2d^2 x 2d^2 block
// matrix is 8x8 for qubits). The reported value is a feasible lower bound
// within certificate_gap of the optimum; iterations counts Newton steps.
//
// brute_force: maximize the output trace norm over pure states of the
// doubled system (6 real angles for d = 2), low-discrepancy coarse scan plus
// Nelder-Mead refinement from the best starts.
DiamondResult diamond_distance(const Ptm& a, const Ptm& b,
                               DiamondMethod method = DiamondMethod::sdp,
                               int coarse_points = 4096);

// Diamond distance between the average of L random unitary channels of
// error rate r and the depolarizing channel of the average's own error rate.
double averaged_channel_distance(int l_channels, double r, std::uint64_t seed);

}  // namespace rb
