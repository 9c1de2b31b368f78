#pragma once

#include "qsw/fock.hpp"
#include "qsw/qsc.hpp"
#include "qsw/quasifree.hpp"

#include <array>
#include <vector>

namespace qsw {

// GNS data of a faithful state on B(p), realized on the Hilbert-Schmidt
// space with eta(X) = X rho^{1/2}. HS(p) vectors are stored column-major,
// so vec|x><y| = conj(y) (x) x and left multiplication is I (x) X. The
// noise space k collects the strictly lower eigenvalue-pair blocks, kbar
// their adjoints in matching column order, and K0 the diagonal blocks
// orthogonal to omega.
struct GNSModel {
    Eigen::Index particleDim = 0;
    CMat rho;                        // density matrix
    RVec gamma;                      // strictly decreasing cluster eigenvalues
    std::vector<Eigen::Index> mult;  // eigenspace dimensions d_alpha
    std::vector<CMat> eigenbasis;    // orthonormal columns of each eigenspace
    CVec omega;                      // vec(rho^{1/2})
    Eigen::Index dimNoise = 0;       // dim k
    CMat basisK;                     // columns vec|e^i_alpha><e^j_beta|, alpha > beta
    CMat basisKbar;                  // adjoint partners, same column order
    CMat basisK0;
    // (alpha, beta, i, j) addressing each k column.
    std::vector<std::array<Eigen::Index, 4>> blockIndex;
    double mrho = 0.0;  // min gamma_a / gamma_{a+1}

    Eigen::Index dimGNS() const { return particleDim * particleDim; }
    Eigen::Index dimK0() const { return basisK0.cols(); }
    CMat isometryJ() const;  // [basisK, basisKbar]
    CMat adapted() const;    // unitary [omega, basisK, basisKbar, basisK0]
    CMat pi(const CMat& X) const;
    CVec eta(const CMat& X) const;
    // pi (x) id on HS(p) (x) C^dimh and rho (x) id: B(p (x) h) -> B(h).
    CMat pitilde(const CMat& A, Eigen::Index dimh) const;
    CMat rhotilde(const CMat& A, Eigen::Index dimh) const;
};

GNSModel gns_build(const CMat& rho, double tol = 1e-8);

// Same model with each eigenspace basis rotated by the given unitaries;
// the k and kbar bases are rebuilt accordingly.
GNSModel rotate_gns_bases(const GNSModel& gns, const std::vector<CMat>& unitaries);

// Gauge-invariant amplitude on k: S and C are diagonal in the block basis
// with entries sqrt(gamma_a / (gamma_b - gamma_a)) and
// sqrt(gamma_b / (gamma_b - gamma_a)) on the (alpha, beta) block.
AWAmplitude sigma_rho(const GNSModel& gns);

// Coupling pair with matrix elements
// <|zeta><eta| (x) u, Qhat v> = sqrt(gamma_b - gamma_a) <zeta (x) u, A(eta (x) v)>
// and the adjoint-block version for Qbar.
struct PhiPair {
    CMat Qhat;  // B(h; k (x) h)
    CMat Qbar;  // B(h; kbar (x) h)
};
PhiPair phi_rho(const GNSModel& gns, const CMat& A, Eigen::Index dimh);

struct WalkModel {
    Eigen::Index particleDim = 0, systemDim = 0;
    CMat HS;  // on h
    CMat HP;  // on p
    CMat HI;  // on p (x) h
};
WalkModel make_walk_model(Eigen::Index particleDim, Eigen::Index systemDim,
                          const CMat& HS, const CMat& HP, const CMat& HI,
                          double tol = 1e-12);
// max over alpha of |(P_alpha (x) I) HI (P_alpha (x) I)|.
double off_diagonal_defect(const WalkModel& model, const GNSModel& gns);

// One-step unitary exp(i tau H_T(tau)) with
// H_T(tau) = I (x) HS + HPhat (x) I + tau^{-1/2} HIhat on Khat (x) h,
// plus the blockwise rescaling s_tau(G - I) that approaches the limit
// stochastic generator: the (vac, vac) block is divided by tau, the
// off-vacuum rows and columns by sqrt(tau).
struct ScaledGenerator {
    CMat G;
    CMat scaled;
    Eigen::Index dimKhat = 0, dimh = 0;
    double unitaryDefect = 0.0;
};
ScaledGenerator interaction_generator(const CMat& HS, const CMat& HPhat,
                                      const CMat& HIhat, Eigen::Index dimKhat,
                                      Eigen::Index dimh, double tau);
// GNS form: Hamiltonians are lifted through pi and expressed in coordinates
// adapted to omega, so the vacuum coordinate comes first.
ScaledGenerator interaction_generator(const WalkModel& model, const GNSModel& gns,
                                      double tau);

// <u eps(f), (I (x) D) U_n (I (x) D*) v eps(g)> for the walk generated by G:
// the ordered product of slot contractions
// (<(1, sqrt(tau) f_j)| (x) I) G (|(1, sqrt(tau) g_j)> (x) I), later slots
// leftmost, times the tail product prod_{j >= n} (1 + tau <f_j, g_j>).
// f and g must be constant on each [j tau, (j+1) tau); values are read at
// left endpoints.
cplx walk_element(const CMat& G, const StepFunction& f, const StepFunction& g,
                  const CVec& u, const CVec& v, long n, double tau);

// Limit stochastic generator of the repeated-interactions walk.
struct LimitGenerator {
    CMat K;                 // i HS + i rho(HP) I - (1/2) rhotilde(HI^2)
    CMat L;                 // i J* pitilde(HI) (|omega> (x) I), on (k (+) kbar) (x) h
    CMat Q;                 // i phi_rho(HI)
    QFGenerator qf;         // quasifree generator over sigma_rho
    HPGenerator lifted;     // on (k (+) kbar (+) K0) (x) h, coupling [L; 0]
    double blockResidual = 0.0;     // (C omega (+) K0) block of pitilde(HI)|omega>
    double couplingResidual = 0.0;  // |L - (Sigma (x) I)[Q; -Qc]|
    double strongLISigmaMin = 0.0;  // least singular value of the component family
    bool unique = false;            // k^{L1} trivial
};
LimitGenerator limit_generator(const WalkModel& model, const GNSModel& gns,
                               double tol = 1e-8);

// f resampled onto the tau-grid: piecewise constant with values read at the
// left endpoint of each slot, covering the support of f.
StepFunction resample_steps(const StepFunction& f, double tau);

struct ConvergenceRow {
    long n = 0;
    double tau = 0.0;
    double absError = 0.0;
    double ratio = 0.0;  // to the previous row; 0 for the first
};
// |walk_element - cocycle_element| at time T for each n, with f, g resampled
// onto each tau-grid; rows are computed in parallel and merged in order.
std::vector<ConvergenceRow> convergence_study(const WalkModel& model,
                                              const GNSModel& gns,
                                              const StepFunction& f,
                                              const StepFunction& g, const CVec& u,
                                              const CVec& v, double T,
                                              const std::vector<long>& nList);

// Thermal qubit coupled to a qubit system: rho = diag(gamma0, 1 - gamma0),
// HS = HP = sigma_z, HI = sigma_x (x) sigma_x, u = v = e0, fixed two-segment
// test functions on k (+) kbar (+) K0.
struct WalkExperiment {
    CMat rho;
    WalkModel model;
    StepFunction f, g;
    CVec u, v;
    double T = 1.0;
    std::vector<long> nList;
};
WalkExperiment thermal_qubit_experiment(double gamma0 = 0.8);

}  // namespace qsw
