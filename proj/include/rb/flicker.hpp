#pragma once

#include <cstdint>
#include <vector>

#include "rb/series.hpp"
#include "rb/rng.hpp"

namespace rb {

// Two-state +/-1 telegraph signal: exponential inter-arrival times at the
// given switching rate.
struct RtnSignal {
    double rate = 0.0;
    int initial_state = 1;
    std::vector<double> switch_times;  // sorted, within [0, duration)
};

// 1/f noise as a sum of RTN signals with switching rates drawn log-uniformly
// (density proportional to 1/f) between the cutoffs. xi holds
// A' sum_k s_k(t) sampled at the midpoint of each dt interval.
struct FlickerProcess {
    double a_prime = 0.0;
    double dt = 1.0;
    long n_steps = 0;
    double f_min = 0.0;
    double f_max = 0.0;
    std::vector<RtnSignal> signals;
    std::vector<double> xi;
};

double flicker_f_min(long n_steps, double dt);  // 1/(10 N dt)
double flicker_f_max(double dt);                // 1/(2 dt)

FlickerProcess sample_flicker(double a_prime, double dt, long n_steps,
                              int n_signals, Rng& rng);

// Single RTN track sampled at interval midpoints (test and PSD support).
std::vector<double> sample_rtn_track(double rate, double dt, long n_steps,
                                     Rng& rng);

// Periodogram averaged over realizations; power at f_k = k/(N dt) for
// k = 1..N/2 with N truncated to a power of two.
struct PsdEstimate {
    std::vector<double> freq;
    std::vector<double> power;
};
PsdEstimate average_periodogram(const std::vector<std::vector<double>>& tracks,
                                double dt);

// --- Ramsey --------------------------------------------------------------

struct RamseyConfig {
    double a_prime = 0.0;
    long n_steps = 4000;
    int ensemble = 2000;
    int n_signals = 50;
    double dt = 1.0;
    double gate_time = 20.0;
    std::uint64_t seed = 0;
};

struct RamseyResult {
    std::vector<double> time;
    std::vector<double> coherence;  // sigma(t) = 2 |rho_12(t)|
    bool crossed = false;           // sigma reached 1/e within the duration
    double t2_crossing = 0.0;       // lower bound when !crossed
    double t2_gaussian = 0.0;       // from fit sigma = exp(-(t/T)^2)
    double t2_exponential = 0.0;    // from fit sigma = exp(-t/T)
    double gaussian_rms = 0.0;
    double exponential_rms = 0.0;
    double gate_fidelity = 0.0;     // (2 + sigma(t_g))/3
};

RamseyResult ramsey(const RamseyConfig& cfg, int threads = 1);

// --- RB under 1/f phase noise ---------------------------------------------

// One experiment concatenates the subsequences C1,Y1, C1,C2,Y2, ... over a
// single continuous noise stream; the qubit is re-prepared at each segment
// boundary. Pulses are 20-point Gaussians of area +/- pi/2; pi rotations are
// two pulses, the identity an idle slot of one gate time.
struct FlickerRbConfig {
    double a_prime = 0.0;
    int k = 2500;                // independent experiments (streams)
    std::vector<int> m_grid;     // default: powers of two up to 4096
    // Idle-gate decay variant: identity gates, prepared and measured along
    // +x (phase noise leaves the ground state untouched).
    bool identity_gates = false;
    int pulse_points = 20;
    int n_signals = 50;
    double dt = 1.0;
    std::uint64_t seed = 0;
};

DecaySeries run_flicker_rb(const FlickerRbConfig& cfg, int threads = 1);

// Depolarizing parameter of the twirled phase error exp(-i 2 pi phi Z).
double correlated_depolarizing_alpha(double phi);

// Quasi-static amplitude calibration: choose A' so the Clifford-averaged
// error rate of the twirled per-gate phase noise is near target_r, using
// pilot samples of the process at the experiment's own cutoffs.
double calibrate_flicker_amplitude(double target_r, int m_max,
                                   std::uint64_t seed);

// Refine the quasi-static estimate with one pilot RB fit (r scales as A'^2
// in the weak-noise regime); lands the fitted error rate within ~10% of
// target.
double calibrate_flicker_amplitude_rb(double target_r,
                                      const std::vector<int>& m_grid,
                                      std::uint64_t seed, int threads = 1,
                                      int pilot_k = 24);

// Choose A' so the Ramsey identity-gate error 1 - F_g = (1 - sigma(t_g))/3
// hits the target; quasi-static estimate refined by one pilot ensemble.
double calibrate_flicker_amplitude_ramsey(double target_gate_error,
                                          long n_steps, std::uint64_t seed,
                                          int threads = 1);

}  // namespace rb
