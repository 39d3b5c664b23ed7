#include "rb/noise.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace rb {

namespace {

Eigen::Matrix4d matrix_power(Eigen::Matrix4d base, long n) {
    Eigen::Matrix4d acc = Eigen::Matrix4d::Identity();
    while (n > 0) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

// Per-step product map for the damped pi/2 rotations: amplitude damping over
// t_g/N composed with a rotation by pi/(2N). sign = +1 or -1.
Eigen::Matrix4d damped_x_step(double eta, double c, double s, int sign) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = eta;
    m(2, 2) = eta * c;
    m(2, 3) = -sign * eta * s;
    m(3, 0) = 1.0 - eta * eta;
    m(3, 2) = sign * eta * eta * s;
    m(3, 3) = eta * eta * c;
    return m;
}

Eigen::Matrix4d damped_y_step(double eta, double c, double s, int sign) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = eta * c;
    m(1, 3) = sign * eta * s;
    m(2, 2) = eta;
    m(3, 0) = 1.0 - eta * eta;
    m(3, 1) = -sign * eta * eta * s;
    m(3, 3) = eta * eta * c;
    return m;
}

double validate_rate(double r, double hi) {
    if (r < 0.0 || r >= hi)
        throw std::invalid_argument("noise: error rate out of range");
    return r;
}

}  // namespace

const char* noise_kind_name(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::none: return "none";
        case NoiseKind::depolarizing: return "depolarizing";
        case NoiseKind::gate_dependent_unitary: return "gate_dependent_unitary";
        case NoiseKind::fixed_unitary: return "fixed_unitary";
        case NoiseKind::generator_dependent: return "generator_dependent";
        case NoiseKind::amplitude_damping: return "amplitude_damping";
        case NoiseKind::gaussian_fast: return "gaussian_fast";
        case NoiseKind::slow_drift: return "slow_drift";
        case NoiseKind::leakage_fixed: return "leakage_fixed";
        case NoiseKind::leakage_random: return "leakage_random";
    }
    return "?";
}

NoiseKind noise_kind_from_name(const std::string& name) {
    for (NoiseKind k :
         {NoiseKind::none, NoiseKind::depolarizing,
          NoiseKind::gate_dependent_unitary, NoiseKind::fixed_unitary,
          NoiseKind::generator_dependent, NoiseKind::amplitude_damping,
          NoiseKind::gaussian_fast, NoiseKind::slow_drift,
          NoiseKind::leakage_fixed, NoiseKind::leakage_random}) {
        if (name == noise_kind_name(k)) return k;
    }
    throw std::invalid_argument("unknown noise kind '" + name + "'");
}

GinibreDraw ginibre_draw(int n, Rng& rng) {
    GinibreDraw g;
    g.size = n;
    g.s.resize(n, n);
    g.t.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g.s(i, j) = rng.normal();
            g.t(i, j) = rng.normal();
        }
    }
    return g;
}

Eigen::MatrixXcd random_normalized_hermitian(int n, Rng& rng) {
    const Eigen::MatrixXcd g = ginibre_draw(n, rng).complex();
    Eigen::MatrixXcd h = g + g.adjoint();
    h /= std::sqrt((h * h).trace().real());
    return h;
}

Eigen::Matrix2cd random_unitary_error_matrix(double r, Rng& rng) {
    validate_rate(r, 0.5);
    const Eigen::Matrix2cd h = random_normalized_hermitian(2, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
    const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    // Average error of exp(-i H eps) is (1 - cos(gap * eps))/3, so the
    // calibration inverts in closed form.
    const double eps = std::acos(1.0 - 3.0 * r) / gap;
    Eigen::Vector2cd phases;
    for (int i = 0; i < 2; ++i)
        phases(i) = std::exp(Complex(0.0, -eps * es.eigenvalues()(i)));
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
}

Ptm random_unitary_error(double r, Rng& rng) {
    return Ptm::from_unitary(random_unitary_error_matrix(r, rng));
}

Ptm random_cptp(double r, Rng& rng) {
    validate_rate(r, 0.5);
    // 8x8 unitary exp(-i H eps) from a non-normalized Hermitian; the Kraus
    // operators are the 2x2 row blocks of its first two columns, complete by
    // unitarity. eps is tuned so the carved channel has error rate r, the
    // same calibration used for the unitary model. Mixing toward the
    // identity instead would collapse the channel onto the depolarizing
    // line and lose the unitary/CPTP/damping distance ordering.
    const Eigen::MatrixXcd g = ginibre_draw(8, rng).complex();
    const Eigen::MatrixXcd h = g + g.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);

    auto channel = [&](double eps) {
        Eigen::VectorXcd phases(8);
        for (int i = 0; i < 8; ++i)
            phases(i) = std::exp(Complex(0.0, -eps * es.eigenvalues()(i)));
        const Eigen::MatrixXcd u = es.eigenvectors() * phases.asDiagonal() *
                                   es.eigenvectors().adjoint();
        KrausSet ks;
        ks.dim = 2;
        for (int block = 0; block < 4; ++block)
            ks.operators.push_back(u.block(2 * block, 0, 2, 2));
        return Ptm::from_kraus(ks);
    };

    double hi = 0.05;
    while (error_rate(channel(hi)) < r) {
        hi *= 2.0;
        if (hi > 1e3)
            throw std::logic_error("random_cptp: could not bracket the rate");
    }
    double lo = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (error_rate(channel(mid)) < r ? lo : hi) = mid;
        if (hi - lo < 1e-14 * (1.0 + hi)) break;
    }
    const Ptm out = channel(0.5 * (lo + hi));
    if (!out.is_cptp(1e-8))
        throw std::logic_error("random_cptp: construction is not CPTP");
    if (std::abs(error_rate(out) - r) > 1e-6)
        throw std::logic_error("random_cptp: calibration failed");
    return out;
}

std::array<Ptm, 7> amplitude_damping_generators(double r, long n_steps) {
    if (r < 0.0 || r >= 0.25)
        throw std::invalid_argument(
            "amplitude_damping_generators: need 0 <= r < 1/4");
    if (n_steps < 1)
        throw std::invalid_argument("amplitude_damping_generators: N < 1");
    const double eta_total = std::sqrt(4.0 - 6.0 * r) - 1.0;
    const double eta = std::pow(eta_total, 1.0 / static_cast<double>(n_steps));
    const double c = std::cos(M_PI / (2.0 * n_steps));
    const double s = std::sin(M_PI / (2.0 * n_steps));

    const Eigen::Matrix4d x_half = matrix_power(damped_x_step(eta, c, s, +1), n_steps);
    const Eigen::Matrix4d x_half_m = matrix_power(damped_x_step(eta, c, s, -1), n_steps);
    const Eigen::Matrix4d y_half = matrix_power(damped_y_step(eta, c, s, +1), n_steps);
    const Eigen::Matrix4d y_half_m = matrix_power(damped_y_step(eta, c, s, -1), n_steps);

    // Damped idle over one gate time; its error rate is exactly r.
    Eigen::Matrix4d idle = Eigen::Matrix4d::Zero();
    idle(0, 0) = 1.0;
    idle(1, 1) = eta_total;
    idle(2, 2) = eta_total;
    idle(3, 0) = 1.0 - eta_total * eta_total;
    idle(3, 3) = eta_total * eta_total;

    return {Ptm(2, idle),           Ptm(2, x_half),
            Ptm(2, x_half_m),       Ptm(2, y_half),
            Ptm(2, y_half_m),       Ptm(2, x_half * x_half),
            Ptm(2, y_half * y_half)};
}

namespace {

// Qubit-block error rate of exp(-i H eps) from the spectral data of H,
// without rebuilding the PTM: tr4 = sum_kl c_kl cos(eps (l_k - l_l)).
struct LeakageRateCurve {
    Eigen::Vector3d eigvals;
    Eigen::Matrix3d c;  // c_kl = sum_{i<4} |<v_k|B_i|v_l>|^2

    double rate(double eps) const {
        double tr4 = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                tr4 += c(k, l) * std::cos(eps * (eigvals(k) - eigvals(l)));
        return 1.0 - (tr4 + 2.0) / 6.0;
    }
};

}  // namespace

Ptm leakage_unitary(double r, Rng& rng) {
    validate_rate(r, 0.5);
    const Eigen::Matrix3cd h = random_normalized_hermitian(3, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);

    LeakageRateCurve curve;
    curve.eigvals = es.eigenvalues();
    const auto& basis = operator_basis(3);
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            double acc = 0.0;
            for (int i = 0; i < 4; ++i) {
                const Complex amp = es.eigenvectors().col(k).adjoint() *
                                    (basis[i] * es.eigenvectors().col(l));
                acc += std::norm(amp);
            }
            curve.c(k, l) = acc;
        }

    // Bracket the first upward crossing, then bisect. Rare draws are
    // non-monotone at large eps; doubling from a small bracket keeps the
    // root on the first branch.
    double hi = 0.1;
    while (curve.rate(hi) < r) {
        hi *= 2.0;
        if (hi > 1e4)
            throw std::invalid_argument("leakage_unitary: rate unreachable");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (curve.rate(mid) < r ? lo : hi) = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    const double eps = 0.5 * (lo + hi);

    Eigen::Vector3cd phases;
    for (int i = 0; i < 3; ++i)
        phases(i) = std::exp(Complex(0.0, -eps * es.eigenvalues()(i)));
    const Eigen::Matrix3cd w = es.eigenvectors() * phases.asDiagonal() *
                               es.eigenvectors().adjoint();
    Ptm out = Ptm::from_unitary(w);
    if (std::abs(qubit_block_error_rate(out) - r) > 1e-8)
        throw std::logic_error("leakage_unitary: calibration failed");
    return out;
}

NoiseModel NoiseModel::build(const NoiseModelConfig& cfg, int total_sequences) {
    NoiseModel m;
    m.cfg_ = cfg;
    m.total_sequences_ = std::max(total_sequences, 1);
    m.dim_ = (cfg.kind == NoiseKind::leakage_fixed ||
              cfg.kind == NoiseKind::leakage_random)
                 ? 3
                 : 2;
    Rng rng(cfg.seed);
    const auto& group = CliffordGroup::instance();

    switch (cfg.kind) {
        case NoiseKind::none:
            m.gate_errors_.push_back(Ptm::identity(2));
            m.true_r_ = 0.0;
            break;
        case NoiseKind::depolarizing: {
            validate_rate(cfg.r, 0.5);
            m.gate_errors_.push_back(Ptm::depolarizing(2, 1.0 - 2.0 * cfg.r));
            m.true_r_ = cfg.r;
            break;
        }
        case NoiseKind::fixed_unitary: {
            m.gate_errors_.push_back(cfg.r == 0.0
                                         ? Ptm::identity(2)
                                         : random_unitary_error(cfg.r, rng));
            m.true_r_ = error_rate(m.gate_errors_[0]);
            break;
        }
        case NoiseKind::gate_dependent_unitary: {
            double acc = 0.0;
            for (int g = 0; g < 24; ++g) {
                m.gate_errors_.push_back(
                    cfg.r == 0.0 ? Ptm::identity(2)
                                 : random_unitary_error(cfg.r, rng));
                acc += error_rate(m.gate_errors_.back());
            }
            m.true_r_ = acc / 24.0;
            break;
        }
        case NoiseKind::generator_dependent: {
            // One random unitary error of strength r/1.875 per physical
            // generator; Clifford errors assemble along the decompositions.
            std::array<Ptm, 7> per_gen = {
                Ptm::identity(2), Ptm::identity(2), Ptm::identity(2),
                Ptm::identity(2), Ptm::identity(2), Ptm::identity(2),
                Ptm::identity(2)};
            const double r_gen = cfg.r / group.mean_generator_count();
            if (cfg.r > 0.0)
                for (auto& e : per_gen) e = random_unitary_error(r_gen, rng);
            double acc = 0.0;
            for (const auto& el : group.elements()) {
                Eigen::Matrix4d noisy = Eigen::Matrix4d::Identity();
                for (Generator gen : el.generators) {
                    const auto& err = per_gen[static_cast<int>(gen)];
                    noisy = err.entries() *
                            (generator_ptm_int(gen).cast<double>() * noisy);
                }
                Ptm e(2, noisy * el.ptm.entries().transpose());
                acc += error_rate(e);
                m.gate_errors_.push_back(std::move(e));
            }
            m.true_r_ = acc / 24.0;
            break;
        }
        case NoiseKind::amplitude_damping: {
            // The product maps damp for one gate time per pulse slot, so at
            // a given per-gate-time rate the assembled Clifford errors
            // average (53/24) times it. Calibrate the input rate so the
            // group mean equals r, which is the error rate the protocol
            // estimates.
            auto assemble = [&](double r_gate) {
                const auto gens =
                    amplitude_damping_generators(r_gate, cfg.n_steps);
                std::vector<Ptm> errors;
                double acc = 0.0;
                for (const auto& el : group.elements()) {
                    Eigen::Matrix4d noisy = Eigen::Matrix4d::Identity();
                    for (Generator gen : el.generators)
                        noisy = gens[static_cast<int>(gen)].entries() * noisy;
                    Ptm e(2, noisy * el.ptm.entries().transpose());
                    acc += error_rate(e);
                    errors.push_back(std::move(e));
                }
                return std::pair<std::vector<Ptm>, double>(std::move(errors),
                                                           acc / 24.0);
            };
            if (cfg.r == 0.0) {
                m.gate_errors_ = assemble(0.0).first;
                m.true_r_ = 0.0;
                break;
            }
            double lo = 0.0, hi = cfg.r;  // mean exceeds the per-gate rate
            if (assemble(hi).second < cfg.r)
                throw std::logic_error("amplitude damping: bad bracket");
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (assemble(mid).second < cfg.r ? lo : hi) = mid;
            }
            auto [errors, mean_r] = assemble(0.5 * (lo + hi));
            m.gate_errors_ = std::move(errors);
            m.true_r_ = mean_r;
            break;
        }
        case NoiseKind::gaussian_fast:
        case NoiseKind::slow_drift: {
            validate_rate(cfg.r, 0.5);
            const Eigen::Matrix2cd h = random_normalized_hermitian(2, rng);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
            m.eigvecs_ = es.eigenvectors();
            m.eigvals_ = es.eigenvalues();
            m.true_r_ = cfg.r;
            break;
        }
        case NoiseKind::leakage_fixed: {
            m.gate_errors_.push_back(cfg.r == 0.0
                                         ? Ptm::identity(3)
                                         : leakage_unitary(cfg.r, rng));
            m.true_r_ = cfg.r == 0.0
                            ? 0.0
                            : qubit_block_error_rate(m.gate_errors_[0]);
            break;
        }
        case NoiseKind::leakage_random: {
            double acc = 0.0;
            for (int g = 0; g < 48; ++g) {
                m.gate_errors_.push_back(cfg.r == 0.0
                                             ? Ptm::identity(3)
                                             : leakage_unitary(cfg.r, rng));
                acc += qubit_block_error_rate(m.gate_errors_.back());
            }
            m.true_r_ = acc / 48.0;
            break;
        }
    }
    return m;
}

Ptm NoiseModel::unitary_error_at_rate(double r_draw) const {
    const double gap = eigvals_(1) - eigvals_(0);
    const double eps = std::acos(1.0 - 3.0 * std::min(r_draw, 0.5)) / gap;
    Eigen::Vector2cd phases;
    for (int i = 0; i < 2; ++i)
        phases(i) = std::exp(Complex(0.0, -eps * eigvals_(i)));
    const Eigen::Matrix2cd u =
        eigvecs_ * phases.asDiagonal() * eigvecs_.adjoint();
    return Ptm::from_unitary(u);
}

Ptm NoiseModel::error_for(int gate, int /*time_step*/, int sequence,
                          Rng& seq_rng) const {
    switch (cfg_.kind) {
        case NoiseKind::none:
        case NoiseKind::depolarizing:
        case NoiseKind::fixed_unitary:
        case NoiseKind::leakage_fixed:
            return gate_errors_[0];
        case NoiseKind::gate_dependent_unitary:
        case NoiseKind::generator_dependent:
        case NoiseKind::amplitude_damping:
        case NoiseKind::leakage_random:
            if (gate < 0 || gate >= static_cast<int>(gate_errors_.size()))
                throw std::invalid_argument("NoiseModel: gate index out of range");
            return gate_errors_[gate];
        case NoiseKind::gaussian_fast: {
            const double r_draw =
                std::max(0.0, seq_rng.normal(cfg_.r, cfg_.r / 4.0));
            return unitary_error_at_rate(r_draw);
        }
        case NoiseKind::slow_drift: {
            if (sequence < 0 || sequence >= total_sequences_)
                throw std::invalid_argument(
                    "NoiseModel: sequence index out of range");
            const double frac =
                total_sequences_ > 1
                    ? static_cast<double>(sequence) / (total_sequences_ - 1)
                    : 0.5;
            return unitary_error_at_rate(cfg_.r * (0.5 + frac));
        }
    }
    throw std::logic_error("NoiseModel: unhandled kind");
}

double NoiseModel::true_average_error() const { return true_r_; }

}  // namespace rb
