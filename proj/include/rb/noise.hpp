#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rb/clifford.hpp"
#include "rb/ptm.hpp"
#include "rb/rng.hpp"

namespace rb {

// Per-gate error channel factories, each calibrated to a target average
// error rate r.
enum class NoiseKind {
    none,                    // ideal gates (zero-noise baseline)
    depolarizing,            // depolarizing of rate r on every gate
    gate_dependent_unitary,  // a different random unitary per Clifford
    fixed_unitary,           // one random unitary on all Cliffords
    generator_dependent,     // random unitary of strength r/1.875 per physical generator
    amplitude_damping,       // noisy generators from the N-step product maps
    gaussian_fast,           // V_j = U^(eps_j), r_j ~ Normal(r, r/4) clipped at 0
    slow_drift,              // U^eps with r_k ramping r/2 -> 3r/2 over sequences
    leakage_fixed,           // one random qutrit unitary on all gates
    leakage_random,          // a different random qutrit unitary per gate
};

const char* noise_kind_name(NoiseKind kind);
NoiseKind noise_kind_from_name(const std::string& name);

struct NoiseModelConfig {
    NoiseKind kind = NoiseKind::none;
    double r = 0.0;
    std::uint64_t seed = 0;
    // Trotter steps for the amplitude-damping product maps.
    long n_steps = 2000000;
};

// Ginibre pair with i.i.d. standard normal entries.
struct GinibreDraw {
    int size = 0;
    Eigen::MatrixXd s;
    Eigen::MatrixXd t;

    Eigen::MatrixXcd complex() const {
        return s + Complex(0.0, 1.0) * t;
    }
};
GinibreDraw ginibre_draw(int n, Rng& rng);

// H = (G + G^dag)/sqrt(tr[(G + G^dag)^2]) for a Ginibre draw G.
Eigen::MatrixXcd random_normalized_hermitian(int n, Rng& rng);

// exp(-i H eps) with eps calibrated so the average error rate equals r
// (within 1e-10 for qubits, closed form through the eigenvalue gap).
Ptm random_unitary_error(double r, Rng& rng);
Eigen::Matrix2cd random_unitary_error_matrix(double r, Rng& rng);

// Random CPTP map at error rate r: Kraus operators carved from an 8x8
// unitary, then mixed toward the identity channel to hit r exactly.
Ptm random_cptp(double r, Rng& rng);

// Noisy physical generators under amplitude damping of error r per gate
// time, indexed by Generator. The pi rotations are the squares of the
// corresponding pi/2 product maps; the identity is the damped idle.
std::array<Ptm, 7> amplitude_damping_generators(double r, long n_steps);

// Random qutrit unitary exp(-i H eps) with the qubit-block error rate
// calibrated to r within 1e-8.
Ptm leakage_unitary(double r, Rng& rng);

// Per-draw error channel source for the RB engine. Tables are built once
// from the model seed; per-sequence draws (gaussian_fast) consume the
// caller's sequence RNG so results do not depend on scheduling.
class NoiseModel {
  public:
    static NoiseModel build(const NoiseModelConfig& cfg, int total_sequences);

    NoiseKind kind() const { return cfg_.kind; }
    double target_r() const { return cfg_.r; }
    int dim() const { return dim_; }
    // Number of gates in the underlying group (24 qubit / 48 qutrit).
    int gate_count() const { return dim_ == 2 ? 24 : 48; }

    // Error channel for gate `gate` applied at position `time_step`
    // (1-based) of sequence `sequence` (0-based).
    Ptm error_for(int gate, int time_step, int sequence, Rng& seq_rng) const;

    // Exact average error rate of the as-built gate set; the reference value
    // for accuracy metrics.
    double true_average_error() const;

    const std::vector<Ptm>& gate_errors() const { return gate_errors_; }

  private:
    NoiseModelConfig cfg_;
    int dim_ = 2;
    int total_sequences_ = 1;
    std::vector<Ptm> gate_errors_;  // cached per-gate tables (kind dependent)
    // gaussian_fast / slow_drift base Hamiltonian spectral data
    Eigen::Matrix2cd eigvecs_;
    Eigen::Vector2d eigvals_;
    double true_r_ = 0.0;

    Ptm unitary_error_at_rate(double r_draw) const;
};

}  // namespace rb
