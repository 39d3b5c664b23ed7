#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace rb {

using Complex = std::complex<double>;

// Hermitian operator basis for dimension d, orthonormal under the
// Hilbert-Schmidt inner product: tr(B_i B_j) = delta_ij.
//   d=2: (I, X, Y, Z)/sqrt(2)
//   d=3: the nine-operator qutrit basis; elements 0..4 span the qubit block
//        plus third-level population, elements 5..8 couple the qubit block to
//        the third level.
const std::vector<Eigen::MatrixXcd>& operator_basis(int dim);

// Set of Kraus operators {K_i} on a d-dimensional system.
struct KrausSet {
    int dim = 0;
    std::vector<Eigen::MatrixXcd> operators;

    // Throws std::invalid_argument unless sum_i K_i^dag K_i = I within tol.
    void validate(double tol = 1e-10) const;
};

// Quantum channel in the Pauli transfer matrix representation: the real
// d^2 x d^2 matrix R_ij = tr(B_i E(B_j)) over the orthonormal basis above.
// Index 0 is the (normalized) identity element, so a trace-preserving channel
// has first row (1, 0, ..., 0). Channel composition is matrix product.
//
// Choi matrices are reconstructed as J = sum_ij E_ij (x) E(E_ij) with E_ij
// the matrix units (column-stacking convention, input factor first). CPTP
// inputs give J Hermitian, positive semidefinite and of trace d.
class Ptm {
  public:
    Ptm(int dim, Eigen::MatrixXd entries);

    static Ptm identity(int dim);
    // diag(1, alpha, ..., alpha); requires alpha in [-1/(d^2-1), 1].
    static Ptm depolarizing(int dim, double alpha);
    // Channel rho -> U rho U^dag. Requires U unitary within 1e-10.
    static Ptm from_unitary(const Eigen::MatrixXcd& u);
    // Channel rho -> sum_i K_i rho K_i^dag. Validates the Kraus set.
    static Ptm from_kraus(const KrausSet& ks);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    Eigen::MatrixXd& entries() { return entries_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& state) const;

    bool is_trace_preserving(double tol = 1e-9) const;
    Eigen::MatrixXcd choi() const;
    // Hermitian Choi, eigenvalues >= -tol, trace == d within tol scale.
    bool is_cptp(double tol = 1e-8) const;

  private:
    int dim_;
    Eigen::MatrixXd entries_;
};

// compose(a, b): channel "apply b first, then a"; entries a * b.
Ptm compose(const Ptm& a, const Ptm& b);

// Average gate fidelity f = (tr R + d) / (d^2 + d) of a trace-preserving
// channel, and the average error rate r = 1 - f.
double average_gate_fidelity(const Ptm& e);
double error_rate(const Ptm& e);

// Error rate of the qubit block of a qutrit channel: the upper-left 4x4 of
// the PTM fed through the d=2 fidelity formula. This is the leakage-model
// error-rate convention used throughout.
double qubit_block_error_rate(const Ptm& e);

// Group average (1/|G|) sum_U U^T e U.
Ptm twirl(const Ptm& e, const std::vector<Ptm>& group);

// --- state vectors -----------------------------------------------------

// Coefficients c_i = tr(B_i rho) of a density matrix in the orthonormal
// basis; survival probability of `prep` against measurement `meas` after
// channel s is meas^T s prep.
Eigen::VectorXd state_coefficients(const Eigen::MatrixXcd& rho);
Eigen::VectorXd ground_state(int dim);
// Qubit state from Bloch vector (x, y, z).
Eigen::VectorXd state_from_bloch(double x, double y, double z);
Eigen::Vector3d bloch_of(const Eigen::VectorXd& state);
double survival(const Eigen::VectorXd& meas, const Ptm& s,
                const Eigen::VectorXd& prep);

// apply with state validation (identity coefficient must equal 1/sqrt(d)).
Eigen::VectorXd apply_to_state(const Ptm& e, const Eigen::VectorXd& state);

// --- serialization ------------------------------------------------------

// Row-major CSV / JSON {dim, entries}; doubles are written shortest-round-trip
// so read(write(x)) is bit-exact for finite values.
std::string to_csv(const Ptm& p);
Ptm ptm_from_csv(int dim, const std::string& csv);
std::string to_json(const Ptm& p);
Ptm ptm_from_json(const std::string& json);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace rb
