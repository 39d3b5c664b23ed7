#include "rb/ptm.hpp"

#include <Eigen/Eigenvalues>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rb {

namespace {

std::vector<Eigen::MatrixXcd> make_qubit_basis() {
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd id, x, y, z;
    id << 1, 0, 0, 1;
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    const double n = 1.0 / std::sqrt(2.0);
    return {n * id, n * x, n * y, n * z};
}

std::vector<Eigen::MatrixXcd> make_qutrit_basis() {
    const Complex i(0.0, 1.0);
    std::vector<Eigen::MatrixXcd> b(9, Eigen::MatrixXcd::Zero(3, 3));
    // Qubit Paulis embedded in the upper block, third-level population, and
    // the four operators coupling the qubit block to the third level. Each
    // unnormalized operator P satisfies tr(P^2) = 3; dividing by sqrt(3)
    // makes the set orthonormal.
    const double s32 = std::sqrt(1.5);
    b[0] = Eigen::MatrixXcd::Identity(3, 3);
    b[1](0, 1) = s32;
    b[1](1, 0) = s32;
    b[2](0, 1) = -i * s32;
    b[2](1, 0) = i * s32;
    b[3](0, 0) = s32;
    b[3](1, 1) = -s32;
    const double s12 = std::sqrt(0.5);
    b[4](0, 0) = s12;
    b[4](1, 1) = s12;
    b[4](2, 2) = -2.0 * s12;
    b[5](0, 2) = s32;
    b[5](2, 0) = s32;
    b[6](0, 2) = -i * s32;
    b[6](2, 0) = i * s32;
    b[7](1, 2) = s32;
    b[7](2, 1) = s32;
    b[8](1, 2) = -i * s32;
    b[8](2, 1) = i * s32;
    const double n = 1.0 / std::sqrt(3.0);
    for (auto& m : b) m *= n;
    return b;
}

}  // namespace

const std::vector<Eigen::MatrixXcd>& operator_basis(int dim) {
    static const std::vector<Eigen::MatrixXcd> qubit = make_qubit_basis();
    static const std::vector<Eigen::MatrixXcd> qutrit = make_qutrit_basis();
    if (dim == 2) return qubit;
    if (dim == 3) return qutrit;
    throw std::invalid_argument("operator_basis: dim must be 2 or 3");
}

void KrausSet::validate(double tol) const {
    if (dim < 2) throw std::invalid_argument("KrausSet: dim must be >= 2");
    if (operators.empty())
        throw std::invalid_argument("KrausSet: no operators");
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& k : operators) {
        if (k.rows() != dim || k.cols() != dim)
            throw std::invalid_argument("KrausSet: operator shape mismatch");
        acc += k.adjoint() * k;
    }
    acc -= Eigen::MatrixXcd::Identity(dim, dim);
    if (acc.cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument(
            "KrausSet: completeness sum K^dag K != I (violation " +
            std::to_string(acc.cwiseAbs().maxCoeff()) + ")");
}

Ptm::Ptm(int dim, Eigen::MatrixXd entries) : dim_(dim), entries_(std::move(entries)) {
    const int n = dim * dim;
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("Ptm: dim must be 2 or 3");
    if (entries_.rows() != n || entries_.cols() != n)
        throw std::invalid_argument("Ptm: entries must be d^2 x d^2");
}

Ptm Ptm::identity(int dim) {
    return Ptm(dim, Eigen::MatrixXd::Identity(dim * dim, dim * dim));
}

Ptm Ptm::depolarizing(int dim, double alpha) {
    const int n = dim * dim;
    const double lo = -1.0 / (n - 1);
    if (alpha < lo || alpha > 1.0)
        throw std::invalid_argument("depolarizing: alpha out of CPTP range");
    Eigen::MatrixXd m = alpha * Eigen::MatrixXd::Identity(n, n);
    m(0, 0) = 1.0;
    return Ptm(dim, m);
}

Ptm Ptm::from_unitary(const Eigen::MatrixXcd& u) {
    const int d = static_cast<int>(u.rows());
    if (u.cols() != d) throw std::invalid_argument("from_unitary: not square");
    Eigen::MatrixXcd dev =
        u.adjoint() * u - Eigen::MatrixXcd::Identity(d, d);
    if (dev.cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("from_unitary: input is not unitary");
    const auto& basis = operator_basis(d);
    const int n = d * d;
    Eigen::MatrixXd r(n, n);
    for (int j = 0; j < n; ++j) {
        const Eigen::MatrixXcd img = u * basis[j] * u.adjoint();
        for (int i = 0; i < n; ++i)
            r(i, j) = (basis[i] * img).trace().real();
    }
    return Ptm(d, std::move(r));
}

Ptm Ptm::from_kraus(const KrausSet& ks) {
    ks.validate();
    const auto& basis = operator_basis(ks.dim);
    const int n = ks.dim * ks.dim;
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (const auto& k : ks.operators) {
        for (int j = 0; j < n; ++j) {
            const Eigen::MatrixXcd img = k * basis[j] * k.adjoint();
            for (int i = 0; i < n; ++i)
                r(i, j) += (basis[i] * img).trace().real();
        }
    }
    return Ptm(ks.dim, std::move(r));
}

Eigen::VectorXd Ptm::apply(const Eigen::VectorXd& state) const {
    if (state.size() != entries_.rows())
        throw std::invalid_argument("Ptm::apply: state dimension mismatch");
    return entries_ * state;
}

bool Ptm::is_trace_preserving(double tol) const {
    Eigen::RowVectorXd first = entries_.row(0);
    first(0) -= 1.0;
    return first.cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXcd Ptm::choi() const {
    const int d = dim_;
    const int n = d * d;
    const auto& basis = operator_basis(d);
    // E(E_ab) expanded over the basis: sum_kl R_kl B_k (B_l)_{ba}.
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            Eigen::MatrixXcd img = Eigen::MatrixXcd::Zero(d, d);
            for (int l = 0; l < n; ++l) {
                const Complex w = basis[l](b, a);
                if (w == Complex(0, 0)) continue;
                for (int k = 0; k < n; ++k)
                    img += entries_(k, l) * w * basis[k];
            }
            // E_ab (x) img
            j.block(a * d, b * d, d, d) += img;
        }
    }
    return j;
}

bool Ptm::is_cptp(double tol) const {
    if (!is_trace_preserving(1e-7)) return false;
    const Eigen::MatrixXcd j = choi();
    if ((j - j.adjoint()).cwiseAbs().maxCoeff() > 1e-9) return false;
    if (std::abs(j.trace().real() - dim_) > 1e-7) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(j);
    return es.eigenvalues().minCoeff() >= -tol;
}

Ptm compose(const Ptm& a, const Ptm& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("compose: dimension mismatch");
    return Ptm(a.dim(), a.entries() * b.entries());
}

double average_gate_fidelity(const Ptm& e) {
    if (!e.is_trace_preserving(1e-7))
        throw std::invalid_argument(
            "average_gate_fidelity: channel is not trace preserving");
    const double d = e.dim();
    return (e.entries().trace() + d) / (d * d + d);
}

double error_rate(const Ptm& e) { return 1.0 - average_gate_fidelity(e); }

double qubit_block_error_rate(const Ptm& e) {
    if (e.dim() != 3)
        throw std::invalid_argument("qubit_block_error_rate: need a qutrit PTM");
    const double tr4 = e.entries().topLeftCorner(4, 4).trace();
    return 1.0 - (tr4 + 2.0) / 6.0;
}

Ptm twirl(const Ptm& e, const std::vector<Ptm>& group) {
    if (group.empty()) throw std::invalid_argument("twirl: empty group");
    const int n = e.size();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    for (const auto& g : group) {
        if (g.dim() != e.dim())
            throw std::invalid_argument("twirl: dimension mismatch");
        acc += g.entries().transpose() * e.entries() * g.entries();
    }
    return Ptm(e.dim(), acc / static_cast<double>(group.size()));
}

Eigen::VectorXd state_coefficients(const Eigen::MatrixXcd& rho) {
    const int d = static_cast<int>(rho.rows());
    const auto& basis = operator_basis(d);
    Eigen::VectorXd c(d * d);
    for (int i = 0; i < d * d; ++i)
        c(i) = (basis[i] * rho).trace().real();
    return c;
}

Eigen::VectorXd ground_state(int dim) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return state_coefficients(rho);
}

Eigen::VectorXd state_from_bloch(double x, double y, double z) {
    Eigen::VectorXd c(4);
    const double n = 1.0 / std::sqrt(2.0);
    c << n, n * x, n * y, n * z;
    return c;
}

Eigen::Vector3d bloch_of(const Eigen::VectorXd& state) {
    if (state.size() != 4)
        throw std::invalid_argument("bloch_of: qubit states only");
    return std::sqrt(2.0) * state.tail<3>();
}

double survival(const Eigen::VectorXd& meas, const Ptm& s,
                const Eigen::VectorXd& prep) {
    return meas.dot(s.apply(prep));
}

Eigen::VectorXd apply_to_state(const Ptm& e, const Eigen::VectorXd& state) {
    const double expect = 1.0 / std::sqrt(static_cast<double>(e.dim()));
    if (state.size() != e.size())
        throw std::invalid_argument("apply_to_state: dimension mismatch");
    if (std::abs(state(0) - expect) > 1e-9)
        throw std::invalid_argument(
            "apply_to_state: state is not trace-normalized");
    return e.apply(state);
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string to_csv(const Ptm& p) {
    std::ostringstream out;
    const auto& m = p.entries();
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    return out.str();
}

Ptm ptm_from_csv(int dim, const std::string& csv) {
    const int n = dim * dim;
    Eigen::MatrixXd m(n, n);
    std::istringstream in(csv);
    std::string line;
    int i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (i >= n) throw std::invalid_argument("ptm_from_csv: too many rows");
        std::istringstream ls(line);
        std::string cell;
        int j = 0;
        while (std::getline(ls, cell, ',')) {
            if (j >= n)
                throw std::invalid_argument("ptm_from_csv: too many columns");
            double v = 0.0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc())
                throw std::invalid_argument("ptm_from_csv: bad number '" + cell + "'");
            m(i, j++) = v;
        }
        if (j != n) throw std::invalid_argument("ptm_from_csv: short row");
        ++i;
    }
    if (i != n) throw std::invalid_argument("ptm_from_csv: short matrix");
    return Ptm(dim, std::move(m));
}

std::string to_json(const Ptm& p) {
    nlohmann::json j;
    j["dim"] = p.dim();
    auto rows = nlohmann::json::array();
    for (int i = 0; i < p.size(); ++i) {
        auto row = nlohmann::json::array();
        for (int k = 0; k < p.size(); ++k) row.push_back(p.entries()(i, k));
        rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
    return j.dump();
}

Ptm ptm_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const int dim = j.at("dim").get<int>();
    const int n = dim * dim;
    Eigen::MatrixXd m(n, n);
    const auto& rows = j.at("entries");
    if (static_cast<int>(rows.size()) != n)
        throw std::invalid_argument("ptm_from_json: wrong row count");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw std::invalid_argument("ptm_from_json: wrong column count");
        for (int k = 0; k < n; ++k) m(i, k) = rows[i][k].get<double>();
    }
    return Ptm(dim, std::move(m));
}

}  // namespace rb
