#pragma once

#include "qsw/qsc.hpp"

namespace qsw {

// Integrand triple on khat (x) h, stored with its partial-conjugation witnesses.
// Block form [[K, R],[Q, 0]]: Q creates, R annihilates, no preservation part.
struct QFIntegrand {
    CMat K;       // B(h)
    CMat Q;       // B(h; k (x) h)
    CMat R;       // B(k (x) h; h)
    CMat Qc;      // Q^c in B(h; kbar (x) h)
    CMat Rstarc;  // (R*)^c in B(h; kbar (x) h)
    Eigen::Index dimK = 0, dimh = 0;

    CMat blockMatrix() const;  // [[K, R],[Q, 0]] on khat (x) h
    // [[K, R, Qc*],[Q, 0, 0],[Rstarc, 0, 0]] on (C (+) k (+) kbar) (x) h.
    CMat doubled() const;
};

QFIntegrand qf_integrand(const CMat& K, const CMat& Q, const CMat& R);

// (1 (+) Sigma) (x) I_h on (C (+) k (+) kbar) (x) h.
CMat sigma_hat(const AWAmplitude& sigma, Eigen::Index dimh);

// (Sigma (x) I_h) [Q; -Q^c]: the creation block of the lifted generator.
CMat quasifree_creation(const AWAmplitude& sigma, const CMat& Q, Eigen::Index dimh);

// The lift sigma_hat * G.doubled() * sigma_hat^*; feeding it to the standard
// integral over k (+) kbar realizes the quasifree integral of G.
CMat sigma_lift_integrand(const QFIntegrand& G, const AWAmplitude& sigma);

// Generator of a quasifree unitary cocycle: K = iH - L*L/2 for the doubled
// creation operator L, so K + K* + L*L = 0 and the lift is Gaussian.
struct QFGenerator {
    Eigen::Index dimK = 0, dimh = 0;
    CMat K;
    CMat Q;   // B(h; k (x) h)
    CMat Qc;  // witness
    CMat L;   // quasifree_creation(sigma, Q)
    AWAmplitude sigma;
    double residual = 0;  // max |K + K* + L*L|

    CMat H() const;            // (K - K*) / 2i
    CMat blockMatrix() const;  // [[K, -Q*],[Q, 0]] on khat (x) h
    QFIntegrand integrand() const;
};

QFGenerator qf_generator(const CMat& H, const CMat& Q, const AWAmplitude& sigma,
                         double tol = 1e-8);

// Validation path for pre-assembled blocks: requires R = -Q* and the structure
// relation K + K* + L*L = 0, both to tol.
QFGenerator qf_generator_checked(const CMat& K, const CMat& Q, const CMat& R,
                                 const AWAmplitude& sigma, double tol = 1e-8);

// Gaussian HP generator on (k (+) kbar) (x) h with creation block G.L.
HPGenerator sigma_lift(const QFGenerator& G);

// Splits the creation block as [L1; L2] and accepts iff
// L2 = -(conj(tanh A) (x) I) L1^c, returning Q = ((cosh A)^{-1} (x) I) L1.
// Requires F Gaussian with even noise dimension and sigma gauge invariant.
std::optional<CMat> recognize_quasifree(const HPGenerator& F, const AWAmplitude& sigma,
                                        double tol = 1e-8);

// Re-expresses an integrand over sigma as one over sigma * M:
//   Qt = (cosh P V* (x) I)Q - (C conj(sinh P) V^T (x) I)(R*)^c,
//   Rt = R(V cosh P (x) I) - Q^{c*}(conj(V) conj(C) sinh P (x) I),
// which leaves (Sigma (x) I)[[Q, R*],[(R*)^c, Q^c]] unchanged.
struct ChangeOfVariables {
    QFIntegrand transformed;
    AWAmplitude sigmaNew;  // sigma * M
};
ChangeOfVariables change_of_variables(const QFIntegrand& G, const AWAmplitude& sigma,
                                      const SymplecticTriple& M, double tol = 1e-8);

// All gauge-invariant amplitudes under which a Gaussian generator is quasifree:
// {Sigma_At : At >= 0, Ran(tanh At - tanh A0) inside the degeneracy space of L1}.
struct AmplitudeSet {
    CMat A0;            // accepted gauge part
    CMat tanhA0;
    CMat degeneracyL1;  // orthonormal columns spanning {x : (<x| (x) I)L1 = 0}
    CMat degeneracyQ;   // same for the recognized Q; dimensions always agree

    bool singleton() const { return degeneracyL1.cols() == 0; }
    bool contains(const CMat& Atilde, double tol = 1e-8) const;
};

AmplitudeSet amplitude_set(const HPGenerator& F, const CMat& A0, double tol = 1e-8);

// Witness that two generators over the same amplitude induce the same flow:
// Q2 - Q1 = |x> (x) I and H2 - H1 - (i/2)((<x| (x) I)Q1 - Q1*(|x> (x) I)) = alpha I.
struct QFNoiseWitness {
    CVec x;
    double alpha = 0;
};

std::optional<QFNoiseWitness> same_flow_qf(const QFGenerator& G1, const QFGenerator& G2,
                                           double tol = 1e-8);

// Flow generator integrand psi(a) = (La, (I (x) a)Q - Qa, Q*(I (x) a) - aQ*) with
// La the Lindblad action of (H, L); its lift equals theta(sigma_lift(G), a).
QFIntegrand qf_flow_psi(const QFGenerator& G, const CMat& a);

}  // namespace qsw
