#pragma once

#include "qsw/linalg.hpp"

#include <optional>
#include <utility>

namespace qsw {

// Real-linear map on C^d stored by its unique split x |-> Lx + A*conj(x).
struct RealLinearOp {
    CMat linear;      // L
    CMat conjLinear;  // A

    Eigen::Index dim() const { return linear.rows(); }
    CVec apply(const CVec& x) const { return linear * x + conjLinear * x.conjugate(); }

    static RealLinearOp identity(Eigen::Index d) { return {eye(d), CMat::Zero(d, d)}; }
    RealLinearOp compose(const RealLinearOp& o) const {
        // (L1 + A1 k)(L2 + A2 k) = (L1 L2 + A1 conj(A2)) + (L1 A2 + A1 conj(L2)) k
        return {linear * o.linear + conjLinear * o.conjLinear.conjugate(),
                linear * o.conjLinear + conjLinear * o.linear.conjugate()};
    }
};

// Anti-unitary involution x |-> C*conj(x); the matrix is unitary and symmetric.
struct Conjugation {
    CMat matrix;

    Eigen::Index dim() const { return matrix.rows(); }
    CVec apply(const CVec& x) const { return matrix * x.conjugate(); }
    static Conjugation entrywise(Eigen::Index d) { return {eye(d)}; }
    double defect() const;  // max of unitarity and symmetry residuals
};

struct SymplecticTriple {
    CMat V;         // unitary
    Conjugation C;  // commutes with P: C*conj(P) = P*C
    CMat P;         // self-adjoint, non-negative
};

// Block operator on k(+)kbar generated by a gauge-invariant part A and an optional squeezing triple.
struct AWAmplitude {
    Eigen::Index dimK = 0;
    CMat A;  // self-adjoint, non-negative
    std::optional<SymplecticTriple> squeeze;
    CMat sigmaBlocks;  // 2*dimK square

    CMat block(int i, int j) const { return sigmaBlocks.block(i * dimK, j * dimK, dimK, dimK); }
    bool gaugeInvariant() const { return !squeeze.has_value(); }
};

// Unique (L, A) with T = L + A*conj on C^d, from the 2d x 2d real matrix of T
// acting on stacked (Re x; Im x) coordinates.
RealLinearOp split_parts(const RMat& T);

// Realification inverse to split_parts.
RMat realify(const RealLinearOp& Z);

// True iff Im<Ze_a, Ze_b> matches Im<e_a, e_b> on the real basis {e_j, i e_j}.
bool is_symplectic(const RealLinearOp& Z, double tol);

// B = V(cosh P - C sinh P); inverse is (cosh P + C sinh P)V*.
RealLinearOp build_symplectic(const SymplecticTriple& t, double tol = 1e-8);

// Constructive inverse of build_symplectic: V and P are unique; C is unique on Ran P
// and fixed deterministically on ker P.
SymplecticTriple decompose_symplectic(const RealLinearOp& B, double tol = 1e-8);

struct PartialConjugate {
    CMat Yc;       // in B(h2; hbar (x) h1)
    double cNorm;  // ||Yc||
};

// Y in B(h1; h (x) h2) |-> Yc with (<conj(y)| (x) I)Yc = Y*(|y> (x) I) for all y.
PartialConjugate partial_conjugate(const CMat& Y, Eigen::Index dimH, Eigen::Index dimH1,
                                   Eigen::Index dimH2);

// Orthonormal basis (columns) of {z in k : (<z| (x) I)X = 0} for X in B(h; k (x) h).
CMat degeneracy_space(const CMat& X, Eigen::Index dimK, Eigen::Index dimH, double tol = 1e-10);

// Doubling map x |-> (x, -conj(x)); real-linear, not complex-linear.
CVec doubling(const CVec& x);

// Contraction (<x| (x) I) Y for Y in B(h; k (x) h), giving an h-operator.
CMat slice_bra(const CVec& x, const CMat& Y, Eigen::Index dimH);

// 2d x 2d matrix M_B on k(+)kbar with M_B(iota(x)) = iota(Bx).
CMat squeezing_matrix(const RealLinearOp& B);

AWAmplitude make_amplitude(const CMat& A, std::optional<SymplecticTriple> squeeze = std::nullopt,
                           double tol = 1e-8);

// ||Sigma iota(x)||^2; equals <x, cosh(2A) x> in the gauge-invariant case.
double covariance(const AWAmplitude& sigma, const CVec& x);

// A = arccosh(R)/2 for R >= I; inverse of A |-> cosh(2A).
CMat covariance_to_amplitude(const CMat& R, double tol = 1e-8);

}  // namespace qsw
