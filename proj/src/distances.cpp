#include "rb/distances.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rb/noise.hpp"
#include "rb/rng.hpp"

namespace rb {

namespace {

// --- brute force: max over pure inputs on the doubled system --------------

// Blocks of (id (x) Phi)(psi psi^dag) for the difference map, evaluated from
// the PTM difference. Output is Hermitian; the objective is its trace norm.
struct BruteObjective {
    int d;
    Eigen::MatrixXd delta;  // PTM difference
    const std::vector<Eigen::MatrixXcd>* basis;

    double eval(const Eigen::VectorXcd& psi) const {
        const int dd = d * d;
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dd, dd);
        Eigen::MatrixXcd block(d, d);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                // reference-system block (a, b) of psi psi^dag
                block.setZero();
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        block(i, j) = psi(a * d + i) * std::conj(psi(b * d + j));
                // push through the difference channel
                Eigen::MatrixXcd img = Eigen::MatrixXcd::Zero(d, d);
                for (int l = 0; l < dd; ++l) {
                    const Complex cl = ((*basis)[l] * block).trace();
                    if (cl == Complex(0, 0)) continue;
                    for (int k = 0; k < dd; ++k) {
                        const double w = delta(k, l);
                        if (w != 0.0) img += w * cl * (*basis)[k];
                    }
                }
                out.block(a * d, b * d, d, d) = img;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out);
        return es.eigenvalues().cwiseAbs().sum();
    }

    // Hypersphere angles (2 d^2 - 2 of them) -> unit vector in C^{d^2}.
    Eigen::VectorXcd state_from_angles(const Eigen::VectorXd& ang) const {
        const int n = d * d;
        Eigen::VectorXcd psi(n);
        double sines = 1.0;
        for (int i = 0; i < n; ++i) {
            double mag = sines;
            if (i + 1 < n) {
                mag *= std::cos(ang(i));
                sines *= std::sin(ang(i));
            }
            const double phase = i == 0 ? 0.0 : ang(n - 2 + i);
            psi(i) = mag * std::exp(Complex(0.0, phase));
        }
        return psi;
    }

    double eval_angles(const Eigen::VectorXd& ang) const {
        return eval(state_from_angles(ang));
    }
};

// Nelder-Mead maximization, standard coefficients.
double nelder_mead(const BruteObjective& obj, Eigen::VectorXd start,
                   int max_iter) {
    const int n = static_cast<int>(start.size());
    std::vector<Eigen::VectorXd> simplex(n + 1, start);
    std::vector<double> value(n + 1);
    for (int i = 1; i <= n; ++i) simplex[i](i - 1) += 0.15;
    for (int i = 0; i <= n; ++i) value[i] = obj.eval_angles(simplex[i]);

    for (int it = 0; it < max_iter; ++it) {
        // order descending (maximization)
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return value[a] > value[b]; });
        std::vector<Eigen::VectorXd> sx(n + 1);
        std::vector<double> sv(n + 1);
        for (int i = 0; i <= n; ++i) {
            sx[i] = simplex[idx[i]];
            sv[i] = value[idx[i]];
        }
        simplex = std::move(sx);
        value = std::move(sv);
        if (value[0] - value[n] < 1e-13) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += simplex[i];
        centroid /= n;

        const Eigen::VectorXd refl = centroid + (centroid - simplex[n]);
        const double f_refl = obj.eval_angles(refl);
        if (f_refl > value[0]) {
            const Eigen::VectorXd expand =
                centroid + 2.0 * (centroid - simplex[n]);
            const double f_exp = obj.eval_angles(expand);
            if (f_exp > f_refl) {
                simplex[n] = expand;
                value[n] = f_exp;
            } else {
                simplex[n] = refl;
                value[n] = f_refl;
            }
        } else if (f_refl > value[n - 1]) {
            simplex[n] = refl;
            value[n] = f_refl;
        } else {
            const Eigen::VectorXd contract =
                centroid + 0.5 * (simplex[n] - centroid);
            const double f_con = obj.eval_angles(contract);
            if (f_con > value[n]) {
                simplex[n] = contract;
                value[n] = f_con;
            } else {
                for (int i = 1; i <= n; ++i) {
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                    value[i] = obj.eval_angles(simplex[i]);
                }
            }
        }
    }
    return *std::max_element(value.begin(), value.end());
}

DiamondResult brute_force_diamond(const Ptm& a, const Ptm& b,
                                  int coarse_points) {
    const int d = a.dim();
    BruteObjective obj{d, a.entries() - b.entries(), &operator_basis(d)};
    const int n_ang = 2 * d * d - 2;

    // Kronecker sequence with sqrt-prime generators: deterministic,
    // low-discrepancy, dimensions pairwise incommensurate.
    static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                    23, 29, 31, 37, 41, 43, 47, 53};
    Eigen::VectorXd shift(n_ang);
    for (int i = 0; i < n_ang; ++i) {
        const double s = std::sqrt(primes[i % 16]);
        shift(i) = s - std::floor(s);
    }
    std::vector<std::pair<double, Eigen::VectorXd>> best;
    Eigen::VectorXd ang(n_ang);
    for (int p = 0; p < coarse_points; ++p) {
        for (int i = 0; i < n_ang; ++i) {
            const double u = std::fmod(shift(i) * (p + 1), 1.0);
            // magnitude angles live on [0, pi/2], phases on [0, 2 pi)
            ang(i) = i < d * d - 1 ? u * M_PI_2 : u * 2.0 * M_PI;
        }
        const double v = obj.eval_angles(ang);
        best.emplace_back(v, ang);
        std::push_heap(best.begin(), best.end(),
                       [](const auto& x, const auto& y) { return x.first > y.first; });
        if (best.size() > 6) {
            std::pop_heap(best.begin(), best.end(),
                          [](const auto& x, const auto& y) { return x.first > y.first; });
            best.pop_back();
        }
    }
    double coarse_best = 0.0;
    for (const auto& [v, _] : best) coarse_best = std::max(coarse_best, v);

    double refined = coarse_best;
    for (const auto& [v, start] : best)
        refined = std::max(refined, nelder_mead(obj, start, 400));

    DiamondResult res;
    res.method = DiamondMethod::brute_force;
    res.value = refined;
    res.certificate_gap = refined - coarse_best;
    return res;
}

// --- SDP: two-block barrier method ----------------------------------------

struct SdpProblem {
    int d;
    int n_big;                    // 2 d^2
    std::vector<Eigen::MatrixXcd> basis_mats;  // A_i
    Eigen::VectorXd cost;                      // c_i = d Re tr(J X)/d v_i
    Eigen::MatrixXcd m_const;

    Eigen::MatrixXcd assemble(const Eigen::VectorXd& v) const {
        Eigen::MatrixXcd m = m_const;
        for (size_t i = 0; i < basis_mats.size(); ++i) m += v(i) * basis_mats[i];
        return m;
    }
};

SdpProblem build_sdp(const Ptm& a, const Ptm& b) {
    const int d = a.dim();
    const int dd = d * d;
    SdpProblem prob;
    prob.d = d;
    prob.n_big = 2 * dd;

    // Choi matrix of the difference map, input factor first.
    const Eigen::MatrixXcd j = Ptm(d, a.entries()).choi() -
                               Ptm(d, b.entries()).choi();

    const int nb = 2 * dd;
    prob.m_const = Eigen::MatrixXcd::Zero(nb, nb);
    prob.m_const.topLeftCorner(dd, dd) =
        Eigen::MatrixXcd::Identity(dd, dd) / d;
    prob.m_const.bottomRightCorner(dd, dd) =
        Eigen::MatrixXcd::Identity(dd, dd) / d;

    std::vector<Eigen::MatrixXcd>& mats = prob.basis_mats;
    std::vector<double> costs;
    auto push = [&](const Eigen::MatrixXcd& m, double c) {
        mats.push_back(m);
        costs.push_back(c);
    };

    // density-matrix parameters for rho_0 (block row/col offset 0) and
    // rho_1 (offset dd), each embedded as rho (x) I_d
    for (int which = 0; which < 2; ++which) {
        const int off = which * dd;
        for (int i = 0; i < d - 1; ++i) {  // diagonal shifts, trace fixed
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * dd, 2 * dd);
            for (int y = 0; y < d; ++y) {
                m(off + i * d + y, off + i * d + y) = 1.0;
                m(off + (d - 1) * d + y, off + (d - 1) * d + y) = -1.0;
            }
            push(m, 0.0);
        }
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                Eigen::MatrixXcd re = Eigen::MatrixXcd::Zero(2 * dd, 2 * dd);
                Eigen::MatrixXcd im = Eigen::MatrixXcd::Zero(2 * dd, 2 * dd);
                for (int y = 0; y < d; ++y) {
                    re(off + p * d + y, off + q * d + y) = 1.0;
                    re(off + q * d + y, off + p * d + y) = 1.0;
                    im(off + p * d + y, off + q * d + y) = Complex(0, 1);
                    im(off + q * d + y, off + p * d + y) = Complex(0, -1);
                }
                push(re, 0.0);
                push(im, 0.0);
            }
        }
    }
    // X parameters: top-right block, Hermitian completion in the bottom-left
    for (int p = 0; p < dd; ++p) {
        for (int q = 0; q < dd; ++q) {
            Eigen::MatrixXcd re = Eigen::MatrixXcd::Zero(2 * dd, 2 * dd);
            re(p, dd + q) = 1.0;
            re(dd + q, p) = 1.0;
            // Re tr(J E_pq) = Re J_qp
            push(re, j(q, p).real());
            Eigen::MatrixXcd im = Eigen::MatrixXcd::Zero(2 * dd, 2 * dd);
            im(p, dd + q) = Complex(0, 1);
            im(dd + q, p) = Complex(0, -1);
            push(im, -j(q, p).imag());
        }
    }
    prob.cost = Eigen::Map<Eigen::VectorXd>(costs.data(), costs.size());
    return prob;
}

DiamondResult sdp_diamond(const Ptm& a, const Ptm& b) {
    const SdpProblem prob = build_sdp(a, b);
    const int nv = static_cast<int>(prob.basis_mats.size());
    const double nu = prob.n_big;  // barrier parameter of the PSD cone

    Eigen::VectorXd v = Eigen::VectorXd::Zero(nv);
    DiamondResult res;
    res.method = DiamondMethod::sdp;

    // maximize c.v  <=>  minimize -t c.v - log det M(v)
    // With this Choi normalization the block-SDP maximum is the diamond
    // norm itself: at the optimum X = (sqrt(rho0) (x) I) U (sqrt(rho1) (x) I)
    // and Re tr(J X) = max_rho ||(sqrt(rho) (x) I) J (sqrt(rho) (x) I)||_1,
    // confirmed against the brute-force route and the depolarizing closed
    // form.
    const double gap_target = 2.5e-7;
    double t = 1.0;
    int newton_steps = 0;
    std::vector<Eigen::MatrixXcd> w(nv);
    while (true) {
        for (int center = 0; center < 60; ++center) {
            const Eigen::MatrixXcd m = prob.assemble(v);
            Eigen::LLT<Eigen::MatrixXcd> llt(m);
            if (llt.info() != Eigen::Success)
                throw std::logic_error("diamond sdp: iterate left the cone");
            const Eigen::MatrixXcd minv = llt.solve(
                Eigen::MatrixXcd::Identity(prob.n_big, prob.n_big));

            Eigen::VectorXd grad(nv);
            for (int i = 0; i < nv; ++i) {
                w[i] = minv * prob.basis_mats[i];
                grad(i) = -t * prob.cost(i) - w[i].trace().real();
            }
            Eigen::MatrixXd hess(nv, nv);
            for (int i = 0; i < nv; ++i) {
                for (int k = i; k < nv; ++k) {
                    const double hik =
                        (w[i].array() * w[k].transpose().array()).sum().real();
                    hess(i, k) = hik;
                    hess(k, i) = hik;
                }
            }
            hess.diagonal().array() += 1e-13 * (1.0 + hess.trace());
            const Eigen::VectorXd step = hess.ldlt().solve(-grad);
            const double decrement = -grad.dot(step);
            ++newton_steps;
            if (decrement < 1e-11) break;

            // backtrack into the cone and over the barrier objective
            const double f0 =
                -t * prob.cost.dot(v) -
                2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
            double s = 1.0;
            for (int bt = 0; bt < 60; ++bt) {
                const Eigen::VectorXd cand = v + s * step;
                Eigen::LLT<Eigen::MatrixXcd> try_llt(prob.assemble(cand));
                if (try_llt.info() == Eigen::Success) {
                    const double f1 =
                        -t * prob.cost.dot(cand) -
                        2.0 * try_llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
                    if (f1 <= f0 + 0.25 * s * grad.dot(step)) {
                        v = cand;
                        break;
                    }
                }
                s *= 0.5;
            }
        }
        if (nu / t <= gap_target) break;
        t = std::min(t * 10.0, nu / gap_target);
    }

    res.value = prob.cost.dot(v);
    res.certificate_gap = nu / t;
    res.iterations = newton_steps;
    res.converged = true;
    return res;
}

}  // namespace

DiamondResult diamond_distance(const Ptm& a, const Ptm& b,
                               DiamondMethod method, int coarse_points) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("diamond_distance: dimension mismatch");
    if (!a.is_trace_preserving(1e-7) || !b.is_trace_preserving(1e-7))
        throw std::invalid_argument(
            "diamond_distance: channels must be trace preserving");
    if (method == DiamondMethod::brute_force)
        return brute_force_diamond(a, b, coarse_points);
    return sdp_diamond(a, b);
}

double averaged_channel_distance(int l_channels, double r,
                                 std::uint64_t seed) {
    if (l_channels < 1)
        throw std::invalid_argument("averaged_channel_distance: L < 1");
    Rng rng(seed);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < l_channels; ++i)
        acc += random_unitary_error(r, rng).entries();
    Ptm avg(2, acc / static_cast<double>(l_channels));
    const double r_avg = error_rate(avg);
    const Ptm dep = Ptm::depolarizing(2, 1.0 - 2.0 * r_avg);
    return diamond_distance(avg, dep).value;
}

}  // namespace rb
