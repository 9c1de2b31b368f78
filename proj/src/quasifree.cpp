#include "qsw/quasifree.hpp"

#include <stdexcept>
#include <utility>

namespace qsw {

namespace {

void check_blocks(const CMat& K, const CMat& Q, Eigen::Index& dimK, Eigen::Index& dimh) {
    dimh = K.rows();
    if (K.cols() != dimh) throw std::invalid_argument("qf blocks: K must be square");
    if (dimh == 0 || Q.cols() != dimh || Q.rows() % dimh != 0 || Q.rows() == 0)
        throw std::invalid_argument("qf blocks: Q must map h to k (x) h");
    dimK = Q.rows() / dimh;
}

CMat cosh_inv(const CMat& a) {
    return funm_selfadjoint(a, [](double t) { return 1.0 / std::cosh(t); });
}

}  // namespace

CMat QFIntegrand::blockMatrix() const {
    Eigen::Index n = dimK * dimh;
    CMat g = CMat::Zero(dimh + n, dimh + n);
    g.topLeftCorner(dimh, dimh) = K;
    g.topRightCorner(dimh, n) = R;
    g.bottomLeftCorner(n, dimh) = Q;
    return g;
}

CMat QFIntegrand::doubled() const {
    Eigen::Index n = dimK * dimh;
    CMat g = CMat::Zero(dimh + 2 * n, dimh + 2 * n);
    g.topLeftCorner(dimh, dimh) = K;
    g.block(0, dimh, dimh, n) = R;
    g.block(0, dimh + n, dimh, n) = Qc.adjoint();
    g.block(dimh, 0, n, dimh) = Q;
    g.block(dimh + n, 0, n, dimh) = Rstarc;
    return g;
}

QFIntegrand qf_integrand(const CMat& K, const CMat& Q, const CMat& R) {
    Eigen::Index dimK = 0, dimh = 0;
    check_blocks(K, Q, dimK, dimh);
    if (R.rows() != dimh || R.cols() != dimK * dimh)
        throw std::invalid_argument("qf_integrand: R must map k (x) h to h");
    CMat Qc = partial_conjugate(Q, dimK, dimh, dimh).Yc;
    CMat Rstarc = partial_conjugate(R.adjoint(), dimK, dimh, dimh).Yc;
    return {K, Q, R, std::move(Qc), std::move(Rstarc), dimK, dimh};
}

CMat sigma_hat(const AWAmplitude& sigma, Eigen::Index dimh) {
    Eigen::Index n = sigma.dimK * dimh;
    CMat s = CMat::Zero(dimh + 2 * n, dimh + 2 * n);
    s.topLeftCorner(dimh, dimh) = eye(dimh);
    s.bottomRightCorner(2 * n, 2 * n) = kron(sigma.sigmaBlocks, eye(dimh));
    return s;
}

CMat quasifree_creation(const AWAmplitude& sigma, const CMat& Q, Eigen::Index dimh) {
    if (Q.cols() != dimh || Q.rows() != sigma.dimK * dimh)
        throw std::invalid_argument("quasifree_creation: Q must map h to k (x) h");
    CMat col(2 * Q.rows(), dimh);
    col.topRows(Q.rows()) = Q;
    col.bottomRows(Q.rows()) = -partial_conjugate(Q, sigma.dimK, dimh, dimh).Yc;
    return kron(sigma.sigmaBlocks, eye(dimh)) * col;
}

CMat sigma_lift_integrand(const QFIntegrand& G, const AWAmplitude& sigma) {
    if (sigma.dimK != G.dimK)
        throw std::invalid_argument("sigma_lift_integrand: noise dimension mismatch");
    CMat s = sigma_hat(sigma, G.dimh);
    return s * G.doubled() * s.adjoint();
}

CMat QFGenerator::H() const { return (K - K.adjoint()) / cplx(0, 2); }

CMat QFGenerator::blockMatrix() const {
    QFIntegrand g;
    g.K = K;
    g.Q = Q;
    g.R = -Q.adjoint();
    g.dimK = dimK;
    g.dimh = dimh;
    return g.blockMatrix();
}

QFIntegrand QFGenerator::integrand() const {
    QFIntegrand g;
    g.K = K;
    g.Q = Q;
    g.R = -Q.adjoint();
    g.Qc = Qc;
    g.Rstarc = -Qc;  // (-Q)^c
    g.dimK = dimK;
    g.dimh = dimh;
    return g;
}

QFGenerator qf_generator(const CMat& H, const CMat& Q, const AWAmplitude& sigma,
                         double tol) {
    Eigen::Index dimK = 0, dimh = 0;
    check_blocks(H, Q, dimK, dimh);
    if (dimK != sigma.dimK)
        throw std::invalid_argument("qf_generator: noise dimension mismatch");
    if (maxAbs(H - H.adjoint().eval()) > tol)
        throw std::invalid_argument("qf_generator: H must be self-adjoint");
    QFGenerator g;
    g.dimK = dimK;
    g.dimh = dimh;
    g.Q = Q;
    g.Qc = partial_conjugate(Q, dimK, dimh, dimh).Yc;
    g.sigma = sigma;
    CMat col(2 * dimK * dimh, dimh);
    col.topRows(dimK * dimh) = Q;
    col.bottomRows(dimK * dimh) = -g.Qc;
    g.L = kron(sigma.sigmaBlocks, eye(dimh)) * col;
    g.K = cplx(0, 1) * H - 0.5 * g.L.adjoint() * g.L;
    g.residual = maxAbs(g.K + g.K.adjoint() + g.L.adjoint() * g.L);
    return g;
}

QFGenerator qf_generator_checked(const CMat& K, const CMat& Q, const CMat& R,
                                 const AWAmplitude& sigma, double tol) {
    if (R.rows() != K.rows() || R.cols() != Q.rows())
        throw std::invalid_argument("qf_generator_checked: R must map k (x) h to h");
    if (maxAbs(Q + R.adjoint()) > tol)
        throw std::invalid_argument("qf_generator_checked: annihilation block must be -Q*");
    QFGenerator g = qf_generator((K - K.adjoint()) / cplx(0, 2), Q, sigma, tol);
    double structure = maxAbs(K + K.adjoint() + g.L.adjoint() * g.L);
    if (structure > tol)
        throw std::invalid_argument("qf_generator_checked: K + K* + L*L does not vanish");
    g.K = K;
    g.residual = structure;
    return g;
}

HPGenerator sigma_lift(const QFGenerator& G) {
    return hp_generator(G.H(), G.L, eye(2 * G.dimK * G.dimh));
}

std::optional<CMat> recognize_quasifree(const HPGenerator& F, const AWAmplitude& sigma,
                                        double tol) {
    if (!sigma.gaugeInvariant())
        throw std::invalid_argument("recognize_quasifree: amplitude must be gauge invariant");
    if (!F.gaussian(tol))
        throw std::invalid_argument("recognize_quasifree: generator must be Gaussian");
    Eigen::Index dk = sigma.dimK, dh = F.dimh;
    if (F.dimK != 2 * dk)
        throw std::invalid_argument("recognize_quasifree: noise dimension must be doubled");
    CMat L1 = F.L.topRows(dk * dh), L2 = F.L.bottomRows(dk * dh);
    CMat L1c = partial_conjugate(L1, dk, dh, dh).Yc;
    double defect = opnorm(L2 + kron(tanh_sa(sigma.A).conjugate().eval(), eye(dh)) * L1c);
    if (defect > tol) return std::nullopt;
    return CMat(kron(cosh_inv(sigma.A), eye(dh)) * L1);
}

ChangeOfVariables change_of_variables(const QFIntegrand& G, const AWAmplitude& sigma,
                                      const SymplecticTriple& M, double tol) {
    if (sigma.dimK != G.dimK || M.V.rows() != G.dimK)
        throw std::invalid_argument("change_of_variables: dimension mismatch");
    Eigen::Index dh = G.dimh;
    CMat c = cosh_sa(M.P), s = sinh_sa(M.P);
    const CMat& V = M.V;
    const CMat& Cm = M.C.matrix;

    CMat Qt = kron(CMat(c * V.adjoint()), eye(dh)) * G.Q -
              kron(CMat(Cm * s.conjugate() * V.transpose()), eye(dh)) * G.Rstarc;
    CMat Rt = G.R * kron(CMat(V * c), eye(dh)) -
              G.Qc.adjoint() * kron(CMat(V.conjugate() * Cm.conjugate() * s), eye(dh));

    RealLinearOp squeeze = build_symplectic(M, tol);
    RealLinearOp base = sigma.squeeze ? build_symplectic(*sigma.squeeze, tol)
                                      : RealLinearOp::identity(G.dimK);
    AWAmplitude composed;
    composed.dimK = sigma.dimK;
    composed.A = sigma.A;
    composed.squeeze = decompose_symplectic(base.compose(squeeze), tol);
    composed.sigmaBlocks = sigma.sigmaBlocks * squeezing_matrix(squeeze);
    return {qf_integrand(G.K, Qt, Rt), std::move(composed)};
}

bool AmplitudeSet::contains(const CMat& Atilde, double tol) const {
    if (Atilde.rows() != A0.rows() || Atilde.cols() != A0.cols()) return false;
    if (maxAbs(Atilde - Atilde.adjoint().eval()) > tol) return false;
    Eigen::SelfAdjointEigenSolver<CMat> es(Atilde);
    if (es.eigenvalues()(0) < -tol) return false;
    CMat X = tanh_sa(Atilde) - tanhA0;
    if (degeneracyL1.cols() > 0) X -= degeneracyL1 * (degeneracyL1.adjoint() * X);
    return maxAbs(X) <= tol;
}

AmplitudeSet amplitude_set(const HPGenerator& F, const CMat& A0, double tol) {
    AWAmplitude sigma = make_amplitude(A0, std::nullopt, tol);
    auto q = recognize_quasifree(F, sigma, tol);
    if (!q)
        throw std::invalid_argument("amplitude_set: generator not quasifree for this gauge part");
    Eigen::Index dk = sigma.dimK, dh = F.dimh;
    AmplitudeSet set;
    set.A0 = A0;
    set.tanhA0 = tanh_sa(A0);
    set.degeneracyL1 = degeneracy_space(F.L.topRows(dk * dh), dk, dh, tol);
    set.degeneracyQ = degeneracy_space(*q, dk, dh, tol);
    return set;
}

std::optional<QFNoiseWitness> same_flow_qf(const QFGenerator& G1, const QFGenerator& G2,
                                           double tol) {
    if (G1.dimK != G2.dimK || G1.dimh != G2.dimh)
        throw std::invalid_argument("same_flow_qf: dimension mismatch");
    if (maxAbs(G1.sigma.sigmaBlocks - G2.sigma.sigmaBlocks) > tol)
        throw std::invalid_argument("same_flow_qf: amplitudes differ");
    Eigen::Index dk = G1.dimK, dh = G1.dimh;

    CMat D = G2.Q - G1.Q;
    CVec x(dk);
    for (Eigen::Index i = 0; i < dk; ++i)
        x(i) = D.block(i * dh, 0, dh, dh).trace() / static_cast<double>(dh);
    double defect = maxAbs(D - kron(x, eye(dh)));

    CMat cross = slice_bra(x, G1.Q, dh);
    CMat rem = G2.H() - G1.H() - cplx(0, 0.5) * (cross - cross.adjoint());
    double alpha = rem.trace().real() / static_cast<double>(dh);
    defect = std::max(defect, maxAbs(rem - alpha * eye(dh)));
    if (defect > tol) return std::nullopt;
    return QFNoiseWitness{std::move(x), alpha};
}

QFIntegrand qf_flow_psi(const QFGenerator& G, const CMat& a) {
    if (a.rows() != G.dimh || a.cols() != G.dimh)
        throw std::invalid_argument("qf_flow_psi: a must act on h");
    CMat H = G.H();
    CMat LL = G.L.adjoint() * G.L;
    CMat Ka = cplx(0, -1) * (H * a - a * H) - 0.5 * (LL * a + a * LL) +
              G.L.adjoint() * kron(eye(2 * G.dimK), a) * G.L;
    CMat lifted = kron(eye(G.dimK), a);
    CMat Qa = lifted * G.Q - G.Q * a;
    CMat Ra = G.Q.adjoint() * lifted - a * G.Q.adjoint();
    return qf_integrand(Ka, Qa, Ra);
}

}  // namespace qsw
