#pragma once

#include "qsw/fock.hpp"
#include "qsw/linalg.hpp"

#include <optional>
#include <vector>

namespace qsw {

// Hudson-Parthasarathy generator triple (H, L, W) together with its assembled
// block matrix F = [[iH - L*L/2, -L*W], [L, W - I]] on (C (+) K) (x) h.
// residual1/residual2 are the two unitarity structure relations
// max|F* + F + F*DF| and max|F + F* + FDF*|, D the preservation projection.
struct HPGenerator {
    CMat H;  // self-adjoint on h
    CMat L;  // h -> K (x) h
    CMat W;  // unitary on K (x) h
    CMat F;  // block matrix on (C (+) K) (x) h
    Eigen::Index dimK = 0;
    Eigen::Index dimh = 0;
    double residual1 = 0.0;
    double residual2 = 0.0;

    // Time block K = iH - L*L/2; the vacuum expectation semigroup is e^{tK}.
    CMat timeBlock() const;
    bool gaussian(double tol = 1e-10) const;
};

// Validates H = H* and W unitary to tol, assembles F and its residuals.
HPGenerator hp_generator(const CMat& H, const CMat& L, const CMat& W,
                         double tol = 1e-8);

// Preservation projection D = 0 (+) I_{K (x) h} as a matrix on (C (+) K) (x) h.
CMat ito_projection(Eigen::Index dimK, Eigen::Index dimh);

// (<(1,x)| (x) I_h) F (|(1,y)> (x) I_h) for a block matrix F on (C (+) K) (x) h.
CMat slot_compression(const CMat& F, const CVec& x, const CVec& y,
                      Eigen::Index dimh);

// Exact evaluation of <u eps(f), Lambda(F)_t v eps(g)> for a deterministic
// simple integrand: the integrand of the first fundamental formula is constant
// on each piece of the common refinement, so the integral is a finite sum.
cplx integral_element(const SimpleIntegrand& F, const StepFunction& f,
                      const StepFunction& g, const CVec& u, const CVec& v,
                      double t);

// <u eps(f), U_t v eps(g)> for the cocycle generated by gen: the time-ordered
// product of exp(dt (F^x_y + <x,y> I)) over the common slot refinement of f, g
// and [0, t), later slots acting on the left, times exp<f 1_[t,inf), g 1_[t,inf)>.
cplx cocycle_element(const HPGenerator& gen, const StepFunction& f,
                     const StepFunction& g, const CVec& u, const CVec& v,
                     double t);

// The flow map a |-> theta(a) stored through its action on the matrix units
// of B(h); unitalResidual = max|theta(I)|, adjointResidual checks
// theta(a)* = theta(a*) on the basis.
struct FlowGenerator {
    Eigen::Index dimK = 0;
    Eigen::Index dimh = 0;
    std::vector<CMat> thetaBasis;  // theta(E_rc), index c*dimh + r
    double unitalResidual = 0.0;
    double adjointResidual = 0.0;

    CMat theta(const CMat& a) const;
    // Lindblad part -i[H,a] - {L*L,a}/2 + L*(I (x) a)L (time block of theta).
    CMat lindblad(const CMat& a) const;
    // Matrix of a |-> lindblad(a) acting on vec(a).
    CMat lindbladSuperoperator() const;
    // Matrix of b |-> (<(1,x)| (x) I) theta(b) (|(1,y)> (x) I) acting on vec(b).
    CMat slotSuperoperator(const CVec& x, const CVec& y) const;
};

CMat theta(const HPGenerator& gen, const CMat& a);
FlowGenerator flow_generator(const HPGenerator& gen);

// <u eps(f), j_t(a) v eps(g)> for the flow j_t(a) = U_t*(a (x) I)U_t: the
// time-ordered product of superoperator exponentials
// exp(dt (Theta^x_y + <x,y> id)) applied to a, earliest slot outermost,
// times the same tail factor as cocycle_element.
cplx flow_element(const FlowGenerator& flow, const CMat& a,
                  const StepFunction& f, const StepFunction& g, const CVec& u,
                  const CVec& v, double t);
cplx flow_element(const HPGenerator& gen, const CMat& a, const StepFunction& f,
                  const StepFunction& g, const CVec& u, const CVec& v,
                  double t);

// Pure-noise perturbation data: scalar alpha, vector z in K, unitary w on K.
struct NoiseWitness {
    double alpha = 0.0;
    CVec z;
    CMat w;
};

// The generator of ((I (x) u_t) U_t) for a pure-noise cocycle u with data
// noise: W' = (w (x) I)W, L' = (w (x) I)L + |z> (x) I,
// H' = H + (i/2)((<w*z| (x) I)L - L*(|w*z> (x) I)) + alpha I.
HPGenerator product_with_noise(const HPGenerator& gen,
                               const NoiseWitness& noise);

// Decides whether two generators induce the same flow: extracts the unique
// candidate (alpha, z, w) from partial traces of W2 W1*, L2 - (w (x) I)L1 and
// the H difference, and returns it when every residual is at most tol.
std::optional<NoiseWitness> same_flow(const HPGenerator& gen1,
                                      const HPGenerator& gen2,
                                      double tol = 1e-8);

// True iff (z, lambda) |-> (<z| (x) I)L - lambda I has trivial kernel,
// i.e. no nonzero z makes (<z| (x) I)L scalar. sigmaMin receives the smallest
// singular value of the kernel matrix when non-null.
bool minimality_check(const CMat& L, double tol = 1e-8,
                      double* sigmaMin = nullptr);

}  // namespace qsw
