#pragma once

// Test-only oracles, kept independent of the library code paths they check.
// Channel action is computed by direct operator conjugation on density
// matrices; random unitaries come from QR of Ginibre draws.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "rb/ptm.hpp"
#include "rb/rng.hpp"

namespace oracle {

using rb::Complex;

inline Eigen::MatrixXcd ginibre(int n, rb::Rng& rng) {
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = Complex(rng.normal(), rng.normal());
    return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phase fix.
inline Eigen::MatrixXcd haar_unitary(int n, rb::Rng& rng) {
    Eigen::MatrixXcd g = ginibre(n, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        Complex d = r(i, i);
        q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline Eigen::VectorXcd haar_state(int n, rb::Rng& rng) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = Complex(rng.normal(), rng.normal());
    return v / v.norm();
}

// rho -> sum_k K_k rho K_k^dag, computed directly.
inline Eigen::MatrixXcd conjugate(const std::vector<Eigen::MatrixXcd>& kraus,
                                  const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return out;
}

// Largest deviation between the PTM action and direct conjugation over a set
// of probe density matrices (pure states from a deterministic grid).
inline double conjugation_deviation(const rb::Ptm& ptm,
                                    const std::vector<Eigen::MatrixXcd>& kraus,
                                    rb::Rng& rng, int probes = 200) {
    const int d = ptm.dim();
    double worst = 0.0;
    for (int t = 0; t < probes; ++t) {
        Eigen::VectorXcd psi = haar_state(d, rng);
        Eigen::MatrixXcd rho = psi * psi.adjoint();
        Eigen::VectorXd in = rb::state_coefficients(rho);
        Eigen::VectorXd direct = rb::state_coefficients(conjugate(kraus, rho));
        worst = std::max(worst, (ptm.apply(in) - direct).cwiseAbs().maxCoeff());
    }
    return worst;
}

// Monte Carlo Haar average of |<psi|U|psi>|^2.
inline double haar_average_fidelity(const Eigen::MatrixXcd& u, rb::Rng& rng,
                                    long samples) {
    double acc = 0.0;
    const int d = static_cast<int>(u.rows());
    for (long i = 0; i < samples; ++i) {
        Eigen::VectorXcd psi = haar_state(d, rng);
        acc += std::norm(psi.dot(u * psi));
    }
    return acc / static_cast<double>(samples);
}

// Random CPTP channel as a Kraus set (Stinespring from a Haar unitary on a
// dilated space), for property tests that need generic channels.
inline std::vector<Eigen::MatrixXcd> random_kraus(int d, int n_env,
                                                  rb::Rng& rng) {
    Eigen::MatrixXcd u = haar_unitary(d * n_env, rng);
    std::vector<Eigen::MatrixXcd> ks;
    for (int e = 0; e < n_env; ++e) {
        Eigen::MatrixXcd k(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) k(i, j) = u(e * d + i, j);
        ks.push_back(k);
    }
    return ks;
}

}  // namespace oracle
