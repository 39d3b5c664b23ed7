#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "rb/ptm.hpp"

namespace rb {

// Physical generating set: identity pulse, the four pi/2 rotations and the
// two pi rotations about x and y.
enum class Generator : int {
    Id = 0,
    XHalf,
    XHalfMinus,
    YHalf,
    YHalfMinus,
    XPi,
    YPi,
};

const char* generator_name(Generator g);
// Rotation angle (radians, signed) and axis ('x'/'y'; identity reports 'x').
double generator_angle(Generator g);
char generator_axis(Generator g);
// Exact signed-permutation PTM of the generator.
Eigen::Matrix4i generator_ptm_int(Generator g);
// Qutrit embedding exp(-i theta G3 / 2) with G3 the qubit Pauli in the upper
// 2x2 block; fixes the third-level relative phase to the physical-generator
// convention.
Eigen::Matrix3cd generator_qutrit_unitary(Generator g);

struct CliffordElement {
    int index = 0;
    // Decomposition factors: pauli in {I,X,Y,Z} = {0..3}, hadamard in {0,1},
    // exchange in {0,1,2}; applied in time order pauli, hadamard, exchange.
    int pauli = 0;
    int hadamard = 0;
    int exchange = 0;
    // Physical decomposition, applied left to right in time.
    std::vector<Generator> generators;
    Eigen::Matrix4i ptm_int;
    Ptm ptm{2, Eigen::MatrixXd::Identity(4, 4)};
};

// The 24-element single-qubit Clifford group with exact integer-matrix
// arithmetic for products and inverses, so sequence inversion never
// accumulates floating-point drift.
class CliffordGroup {
  public:
    static const CliffordGroup& instance();

    const std::vector<CliffordElement>& elements() const { return elements_; }
    const CliffordElement& element(int i) const;
    int size() const { return 24; }

    // Index of the product "apply b first, then a".
    int product(int a, int b) const;
    int inverse(int a) const;
    // Element inverting the whole sequence (seq applied left to right).
    int invert_sequence(std::span<const int> seq) const;

    // Indices of the 12-element group generated by the Pauli and exchange
    // factors (hadamard == 0); a 2-design.
    const std::vector<int>& pauli_exchange_subgroup() const { return ps12_; }

    const std::vector<Ptm>& ptms() const { return ptms_; }
    Ptm twirl_full(const Ptm& e) const;
    Ptm twirl_pauli_exchange(const Ptm& e) const;

    double mean_generator_count() const;

    // Product/inverse tables plus element metadata, for cross-implementation
    // conformance checks.
    std::string table_json() const;

  private:
    CliffordGroup();
    std::vector<CliffordElement> elements_;
    std::vector<Ptm> ptms_;
    std::vector<int> ps12_;
    int product_[24][24];
    int inverse_[24];
};

// The 24 Cliffords embedded as qutrit unitaries with both third-level phases
// (U (+) 1) and (U (+) -1): 48 channels, closed under composition. Twirling
// any qutrit channel over the set is block diagonal across the qubit-sector
// basis elements {P1..P5} and the leakage sector {P6..P9}.
class ExtendedQutritGroup {
  public:
    static const ExtendedQutritGroup& instance();

    int size() const { return 48; }
    const Ptm& element(int i) const;
    const Eigen::Matrix3cd& unitary(int i) const;
    // Qubit Clifford index of element i (elements 2c and 2c+1 project to c).
    int qubit_clifford(int i) const { return i / 2; }

    int product(int a, int b) const;
    int inverse(int a) const;
    int invert_sequence(std::span<const int> seq) const;

    Ptm twirl(const Ptm& e) const;
    // Twirl over the 24 elements with positive third-level phase only; leaves
    // the off-diagonal blocks of a generic channel nonzero.
    Ptm twirl_unextended(const Ptm& e) const;

  private:
    ExtendedQutritGroup();
    std::vector<Eigen::Matrix3cd> unitaries_;
    std::vector<Ptm> ptms_;
    std::vector<std::vector<int>> product_;
    std::vector<int> inverse_;
};

}  // namespace rb
