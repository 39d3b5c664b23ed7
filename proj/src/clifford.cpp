#include "rb/clifford.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace rb {

namespace {

using Eigen::Matrix3cd;
using Eigen::Matrix4i;

Matrix4i pauli_map(int p) {
    Matrix4i m = Matrix4i::Identity();
    switch (p) {
        case 0: break;
        case 1: m(2, 2) = -1; m(3, 3) = -1; break;  // X
        case 2: m(1, 1) = -1; m(3, 3) = -1; break;  // Y
        case 3: m(1, 1) = -1; m(2, 2) = -1; break;  // Z
        default: throw std::invalid_argument("pauli_map: bad index");
    }
    return m;
}

Matrix4i hadamard_map(int h) {
    Matrix4i m = Matrix4i::Identity();
    if (h == 0) return m;
    // (x, y, z) -> (z, -y, x)
    m.setZero();
    m(0, 0) = 1;
    m(1, 3) = 1;
    m(2, 2) = -1;
    m(3, 1) = 1;
    return m;
}

Matrix4i exchange_map(int s) {
    Matrix4i m = Matrix4i::Identity();
    if (s == 0) return m;
    // S: (x, y, z) -> (z, x, y)
    Matrix4i cyc = Matrix4i::Zero();
    cyc(0, 0) = 1;
    cyc(1, 3) = 1;
    cyc(2, 1) = 1;
    cyc(3, 2) = 1;
    return s == 1 ? cyc : Matrix4i(cyc * cyc);
}

// Table of physical decompositions, in the same element order as the
// (pauli, hadamard, exchange) enumeration below: hadamard-major blocks,
// pauli rows, exchange columns. Lists are applied left to right in time.
const std::vector<std::vector<Generator>>& decomposition_table() {
    using G = Generator;
    static const std::vector<std::vector<Generator>> table = {
        /* I -I-I   */ {G::Id},
        /* I -I-S   */ {G::YHalf, G::XHalf},
        /* I -I-S2  */ {G::XHalfMinus, G::YHalfMinus},
        /* X -I-I   */ {G::XPi},
        /* X -I-S   */ {G::YHalfMinus, G::XHalfMinus},
        /* X -I-S2  */ {G::XHalf, G::YHalfMinus},
        /* Y -I-I   */ {G::YPi},
        /* Y -I-S   */ {G::YHalfMinus, G::XHalf},
        /* Y -I-S2  */ {G::XHalf, G::YHalf},
        /* Z -I-I   */ {G::XPi, G::YPi},
        /* Z -I-S   */ {G::YHalf, G::XHalfMinus},
        /* Z -I-S2  */ {G::XHalfMinus, G::YHalf},
        /* I -H-I   */ {G::YHalf, G::XPi},
        /* I -H-S   */ {G::XHalfMinus},
        /* I -H-S2  */ {G::XHalf, G::YHalfMinus, G::XHalfMinus},
        /* X -H-I   */ {G::YHalfMinus},
        /* X -H-S   */ {G::XHalf},
        /* X -H-S2  */ {G::XHalf, G::YHalf, G::XHalf},
        /* Y -H-I   */ {G::YHalfMinus, G::XPi},
        /* Y -H-S   */ {G::XHalf, G::YPi},
        /* Y -H-S2  */ {G::XHalf, G::YHalfMinus, G::XHalf},
        /* Z -H-I   */ {G::YHalf},
        /* Z -H-S   */ {G::XHalfMinus, G::YPi},
        /* Z -H-S2  */ {G::XHalf, G::YHalf, G::XHalfMinus},
    };
    return table;
}

}  // namespace

const char* generator_name(Generator g) {
    switch (g) {
        case Generator::Id: return "id";
        case Generator::XHalf: return "x90";
        case Generator::XHalfMinus: return "x90m";
        case Generator::YHalf: return "y90";
        case Generator::YHalfMinus: return "y90m";
        case Generator::XPi: return "x180";
        case Generator::YPi: return "y180";
    }
    return "?";
}

double generator_angle(Generator g) {
    constexpr double half = std::numbers::pi / 2.0;
    switch (g) {
        case Generator::Id: return 0.0;
        case Generator::XHalf: return half;
        case Generator::XHalfMinus: return -half;
        case Generator::YHalf: return half;
        case Generator::YHalfMinus: return -half;
        case Generator::XPi: return 2.0 * half;
        case Generator::YPi: return 2.0 * half;
    }
    return 0.0;
}

char generator_axis(Generator g) {
    switch (g) {
        case Generator::YHalf:
        case Generator::YHalfMinus:
        case Generator::YPi: return 'y';
        default: return 'x';
    }
}

Eigen::Matrix4i generator_ptm_int(Generator g) {
    Matrix4i m = Matrix4i::Identity();
    switch (g) {
        case Generator::Id:
            break;
        case Generator::XHalf:   // (x,y,z) -> (x,-z,y)
            m(1, 1) = 1; m(2, 2) = 0; m(3, 3) = 0;
            m(2, 3) = -1; m(3, 2) = 1;
            break;
        case Generator::XHalfMinus:
            m(1, 1) = 1; m(2, 2) = 0; m(3, 3) = 0;
            m(2, 3) = 1; m(3, 2) = -1;
            break;
        case Generator::YHalf:   // (x,y,z) -> (z,y,-x)
            m(1, 1) = 0; m(3, 3) = 0;
            m(1, 3) = 1; m(3, 1) = -1;
            break;
        case Generator::YHalfMinus:
            m(1, 1) = 0; m(3, 3) = 0;
            m(1, 3) = -1; m(3, 1) = 1;
            break;
        case Generator::XPi:
            m = pauli_map(1);
            break;
        case Generator::YPi:
            m = pauli_map(2);
            break;
    }
    return m;
}

Eigen::Matrix3cd generator_qutrit_unitary(Generator g) {
    const Complex i(0.0, 1.0);
    Matrix3cd h = Matrix3cd::Zero();
    if (generator_axis(g) == 'x') {
        h(0, 1) = 1.0;
        h(1, 0) = 1.0;
    } else {
        h(0, 1) = -i;
        h(1, 0) = i;
    }
    const double theta = generator_angle(g);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    Matrix3cd u = Matrix3cd::Identity();
    u(0, 0) = c;
    u(1, 1) = c;
    u(0, 1) = -i * s * h(0, 1);
    u(1, 0) = -i * s * h(1, 0);
    return u;
}

CliffordGroup::CliffordGroup() {
    const auto& decomp = decomposition_table();
    elements_.reserve(24);
    for (int h = 0; h < 2; ++h) {
        for (int p = 0; p < 4; ++p) {
            for (int s = 0; s < 3; ++s) {
                CliffordElement e;
                e.index = static_cast<int>(elements_.size());
                e.pauli = p;
                e.hadamard = h;
                e.exchange = s;
                e.ptm_int = Matrix4i(exchange_map(s) * (hadamard_map(h) * pauli_map(p)));
                e.generators = decomp[e.index];
                // Physical decomposition must reproduce the factor form
                // exactly; both are signed permutations.
                Matrix4i from_gens = Matrix4i::Identity();
                for (Generator g : e.generators)
                    from_gens = Matrix4i(generator_ptm_int(g) * from_gens);
                if (from_gens != e.ptm_int)
                    throw std::logic_error(
                        "clifford table: decomposition mismatch at index " +
                        std::to_string(e.index));
                e.ptm = Ptm(2, e.ptm_int.cast<double>());
                elements_.push_back(std::move(e));
            }
        }
    }

    auto find_index = [&](const Matrix4i& m) {
        for (const auto& e : elements_)
            if (e.ptm_int == m) return e.index;
        throw std::logic_error("clifford table: product left the group");
    };
    for (int a = 0; a < 24; ++a)
        for (int b = 0; b < 24; ++b)
            product_[a][b] =
                find_index(Matrix4i(elements_[a].ptm_int * elements_[b].ptm_int));
    for (int a = 0; a < 24; ++a)
        inverse_[a] = find_index(Matrix4i(elements_[a].ptm_int.transpose()));

    for (const auto& e : elements_) {
        ptms_.push_back(e.ptm);
        if (e.hadamard == 0) ps12_.push_back(e.index);
    }
}

const CliffordGroup& CliffordGroup::instance() {
    static const CliffordGroup group;
    return group;
}

const CliffordElement& CliffordGroup::element(int i) const {
    if (i < 0 || i >= 24)
        throw std::invalid_argument("CliffordGroup: index out of range");
    return elements_[i];
}

int CliffordGroup::product(int a, int b) const {
    if (a < 0 || a >= 24 || b < 0 || b >= 24)
        throw std::invalid_argument("CliffordGroup: index out of range");
    return product_[a][b];
}

int CliffordGroup::inverse(int a) const {
    if (a < 0 || a >= 24)
        throw std::invalid_argument("CliffordGroup: index out of range");
    return inverse_[a];
}

int CliffordGroup::invert_sequence(std::span<const int> seq) const {
    if (seq.empty())
        throw std::invalid_argument("invert_sequence: empty sequence");
    int acc = seq[0];
    if (acc < 0 || acc >= 24)
        throw std::invalid_argument("invert_sequence: index out of range");
    for (size_t j = 1; j < seq.size(); ++j) acc = product(seq[j], acc);
    return inverse_[acc];
}

Ptm CliffordGroup::twirl_full(const Ptm& e) const { return twirl(e, ptms_); }

Ptm CliffordGroup::twirl_pauli_exchange(const Ptm& e) const {
    std::vector<Ptm> sub;
    sub.reserve(ps12_.size());
    for (int i : ps12_) sub.push_back(ptms_[i]);
    return twirl(e, sub);
}

double CliffordGroup::mean_generator_count() const {
    size_t total = 0;
    for (const auto& e : elements_) total += e.generators.size();
    return static_cast<double>(total) / elements_.size();
}

std::string CliffordGroup::table_json() const {
    nlohmann::json j;
    auto prod = nlohmann::json::array();
    for (int a = 0; a < 24; ++a) {
        auto row = nlohmann::json::array();
        for (int b = 0; b < 24; ++b) row.push_back(product_[a][b]);
        prod.push_back(std::move(row));
    }
    j["product"] = std::move(prod);
    auto inv = nlohmann::json::array();
    for (int a = 0; a < 24; ++a) inv.push_back(inverse_[a]);
    j["inverse"] = std::move(inv);
    auto els = nlohmann::json::array();
    for (const auto& e : elements_) {
        nlohmann::json je;
        je["index"] = e.index;
        je["pauli"] = e.pauli;
        je["hadamard"] = e.hadamard;
        je["exchange"] = e.exchange;
        auto gens = nlohmann::json::array();
        for (Generator g : e.generators) gens.push_back(generator_name(g));
        je["generators"] = std::move(gens);
        auto rows = nlohmann::json::array();
        for (int r = 0; r < 4; ++r) {
            auto row = nlohmann::json::array();
            for (int c = 0; c < 4; ++c) row.push_back(e.ptm_int(r, c));
            rows.push_back(std::move(row));
        }
        je["ptm"] = std::move(rows);
        els.push_back(std::move(je));
    }
    j["elements"] = std::move(els);
    return j.dump(2);
}

ExtendedQutritGroup::ExtendedQutritGroup() {
    const auto& cliffords = CliffordGroup::instance().elements();
    unitaries_.reserve(48);
    Matrix3cd flip = Matrix3cd::Identity();
    flip(2, 2) = -1.0;
    for (const auto& e : cliffords) {
        Matrix3cd u = Matrix3cd::Identity();
        for (Generator g : e.generators) u = generator_qutrit_unitary(g) * u;
        unitaries_.push_back(u);
        unitaries_.push_back(u * flip);
    }
    ptms_.reserve(48);
    for (const auto& u : unitaries_) ptms_.push_back(Ptm::from_unitary(u));

    auto find_index = [&](const Eigen::MatrixXd& m) {
        for (int i = 0; i < 48; ++i)
            if ((ptms_[i].entries() - m).cwiseAbs().maxCoeff() < 1e-9) return i;
        throw std::logic_error("extended qutrit group: product left the set");
    };
    product_.assign(48, std::vector<int>(48, 0));
    for (int a = 0; a < 48; ++a)
        for (int b = 0; b < 48; ++b)
            product_[a][b] =
                find_index(ptms_[a].entries() * ptms_[b].entries());
    inverse_.resize(48);
    for (int a = 0; a < 48; ++a)
        inverse_[a] = find_index(ptms_[a].entries().transpose());
}

const ExtendedQutritGroup& ExtendedQutritGroup::instance() {
    static const ExtendedQutritGroup group;
    return group;
}

const Ptm& ExtendedQutritGroup::element(int i) const {
    if (i < 0 || i >= 48)
        throw std::invalid_argument("ExtendedQutritGroup: index out of range");
    return ptms_[i];
}

const Eigen::Matrix3cd& ExtendedQutritGroup::unitary(int i) const {
    if (i < 0 || i >= 48)
        throw std::invalid_argument("ExtendedQutritGroup: index out of range");
    return unitaries_[i];
}

int ExtendedQutritGroup::product(int a, int b) const { return product_[a][b]; }

int ExtendedQutritGroup::inverse(int a) const { return inverse_[a]; }

int ExtendedQutritGroup::invert_sequence(std::span<const int> seq) const {
    if (seq.empty())
        throw std::invalid_argument("invert_sequence: empty sequence");
    int acc = seq[0];
    for (size_t j = 1; j < seq.size(); ++j) acc = product_[seq[j]][acc];
    return inverse_[acc];
}

Ptm ExtendedQutritGroup::twirl(const Ptm& e) const { return rb::twirl(e, ptms_); }

Ptm ExtendedQutritGroup::twirl_unextended(const Ptm& e) const {
    std::vector<Ptm> sub;
    sub.reserve(24);
    for (int i = 0; i < 48; i += 2) sub.push_back(ptms_[i]);
    return rb::twirl(e, sub);
}

}  // namespace rb
