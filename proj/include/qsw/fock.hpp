#pragma once

#include "qsw/algebra.hpp"

#include <utility>
#include <vector>

namespace qsw {

// Boson Fock space over C^d truncated at total particle number <= cutoff.
// Basis: occupation multi-indices ordered by level, then lexicographically;
// index 0 is the vacuum.
struct FockSpace {
    FockSpace(Eigen::Index oneParticleDim, int cutoff);

    Eigen::Index d;
    int cutoff;
    std::vector<std::vector<int>> occupations;

    Eigen::Index dim() const { return static_cast<Eigen::Index>(occupations.size()); }
    Eigen::Index index(const std::vector<int>& occ) const;  // -1 if out of range
};

struct Ladder {
    CMat plus;   // a+(x) = a-(x)*; the level-(cutoff+1) image is dropped
    CMat minus;  // a-(x), antilinear in x
};
Ladder ladder(const FockSpace& space, const CVec& x);

// dGamma(T): second quantization of a one-particle operator; preserves levels.
CMat second_quantization(const FockSpace& space, const CMat& T);

CVec exponential_vector(const FockSpace& space, const CVec& x);

// Norm of the part of eps(x) above the cutoff.
double exponential_tail(const FockSpace& space, const CVec& x);

struct WeylOp {
    CMat matrix;
    double tailBound;
    bool truncationWarning;
};

// exp(a+(x) - a-(x)); unitary on the retained subspace up to the reported tail.
WeylOp weyl(const FockSpace& space, const CVec& x, double tol = 1e-8);

// W(S00 x - S01 conj(x)) (x) W(S10 x - S11 conj(x)) on the double Fock space
// factor (x) factor, for the blocks S of the amplitude.
WeylOp weyl_sigma(const AWAmplitude& sigma, const FockSpace& factor, const CVec& x,
                  double tol = 1e-8);

// Quasifree ladder pair on factor (x) factor:
// a+_S(x) = a+(S00 x)(x)I + I(x)a+(S10 x) + a-(S01 conj x)(x)I + I(x)a-(S11 conj x),
// and a-_S(x) likewise with +/- exchanged.
Ladder ladder_sigma(const AWAmplitude& sigma, const FockSpace& factor, const CVec& x);

// Right-continuous step function R+ -> C^dim with compact support; constant on
// [t_j, t_{j+1}) and zero after the last breakpoint.
struct StepFunction {
    std::vector<std::pair<double, CVec>> segments;  // (duration > 0, value)
    Eigen::Index dim = 0;

    static StepFunction zero(Eigen::Index d) { return {{}, d}; }
    static StepFunction make(Eigen::Index d, std::vector<std::pair<double, CVec>> segs);

    CVec value(double t) const;
    std::vector<double> breakpoints() const;  // {0, t_1, ..., t_m}
    double duration() const;
    double normSq() const;  // |f|^2 in L^2(R+)
    cplx inner(const StepFunction& g) const;  // <f, g> over all of R+
    cplx innerInterval(const StepFunction& g, double a, double b) const;
};

// Tensor product of per-slot Fock spaces over K; slot j carries [T_j, T_j + dt_j).
struct SlicedFock {
    FockSpace slot;
    std::vector<double> durations;

    int slots() const { return static_cast<int>(durations.size()); }
    Eigen::Index dim() const;
    std::vector<double> boundaries() const;  // {0, T_1, ..., T_m}
    // Slot index for boundary time t (within tol); -1 if t is not a boundary.
    int boundarySlot(double t, double tol = 1e-9) const;
};

// (x)_j eps(sqrt(dt_j) f(T_j)); requires f constant on every slot.
CVec sliced_exponential_vector(const SlicedFock& slicing, const StepFunction& f);

// Piecewise-constant deterministic integrand with values in B(Khat (x) h),
// Khat = C (+) K; the vacuum row/column comes first.
struct SimpleIntegrand {
    std::vector<std::pair<double, CMat>> segments;  // (duration > 0, value)
    Eigen::Index dimK = 0, dimh = 0;

    static SimpleIntegrand make(Eigen::Index dimK, Eigen::Index dimh,
                                std::vector<std::pair<double, CMat>> segs);
    CMat value(double t) const;  // zero after the support
    std::vector<double> breakpoints() const;
    SimpleIntegrand adjointwise() const;  // blockwise adjoint F*
};

// Lambda(F)_t realized on h (x) sliced Fock: time + creation + annihilation +
// preservation integrals assembled from per-slot ladder operators. t and all
// discontinuities of F must be slot boundaries.
CMat qs_integral_operator(const SimpleIntegrand& F, const SlicedFock& slicing, double t);

}  // namespace qsw
