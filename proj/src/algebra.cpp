#include "qsw/algebra.hpp"

namespace qsw {

double Conjugation::defect() const {
    Eigen::Index d = matrix.rows();
    double uni = maxAbs(matrix * matrix.adjoint() - eye(d));
    double sym = maxAbs(matrix - matrix.transpose().eval());
    return std::max(uni, sym);
}

RealLinearOp split_parts(const RMat& T) {
    if (T.rows() != T.cols() || T.rows() % 2 != 0)
        throw std::invalid_argument("split_parts: expected a 2d x 2d real matrix");
    Eigen::Index d = T.rows() / 2;
    RMat T11 = T.topLeftCorner(d, d), T12 = T.topRightCorner(d, d);
    RMat T21 = T.bottomLeftCorner(d, d), T22 = T.bottomRightCorner(d, d);
    // Columns: L e_j = (T e_j - i T(i e_j))/2, A e_j = (T e_j + i T(i e_j))/2.
    CMat L = ((T11 + T22).cast<cplx>() + cplx(0, 1) * (T21 - T12).cast<cplx>()) / 2.0;
    CMat A = ((T11 - T22).cast<cplx>() + cplx(0, 1) * (T21 + T12).cast<cplx>()) / 2.0;
    return {L, A};
}

RMat realify(const RealLinearOp& Z) {
    Eigen::Index d = Z.dim();
    RMat T(2 * d, 2 * d);
    T.topLeftCorner(d, d) = (Z.linear + Z.conjLinear).real();
    T.topRightCorner(d, d) = (-Z.linear + Z.conjLinear).imag();
    T.bottomLeftCorner(d, d) = (Z.linear + Z.conjLinear).imag();
    T.bottomRightCorner(d, d) = (Z.linear - Z.conjLinear).real();
    return T;
}

bool is_symplectic(const RealLinearOp& Z, double tol) {
    if (Z.linear.rows() != Z.linear.cols() || Z.conjLinear.rows() != Z.conjLinear.cols() ||
        Z.linear.rows() != Z.conjLinear.rows())
        throw std::invalid_argument("is_symplectic: square parts of equal dimension required");
    Eigen::Index d = Z.dim();
    std::vector<CVec> basis;
    basis.reserve(2 * d);
    for (Eigen::Index j = 0; j < d; ++j) basis.push_back(CVec::Unit(d, j));
    for (Eigen::Index j = 0; j < d; ++j) basis.push_back(cplx(0, 1) * CVec::Unit(d, j));
    std::vector<CVec> image;
    image.reserve(2 * d);
    for (const auto& v : basis) image.push_back(Z.apply(v));
    for (size_t a = 0; a < basis.size(); ++a)
        for (size_t b = 0; b < basis.size(); ++b) {
            double lhs = image[a].dot(image[b]).imag();
            double rhs = basis[a].dot(basis[b]).imag();
            if (std::abs(lhs - rhs) > tol) return false;
        }
    return true;
}

RealLinearOp build_symplectic(const SymplecticTriple& t, double tol) {
    Eigen::Index d = t.V.rows();
    if (t.C.dim() != d || t.P.rows() != d || t.P.cols() != d)
        throw std::invalid_argument("build_symplectic: dimension mismatch");
    if (maxAbs(t.V * t.V.adjoint() - eye(d)) > tol)
        throw std::invalid_argument("build_symplectic: V not unitary");
    if (t.C.defect() > tol)
        throw std::invalid_argument("build_symplectic: C not a conjugation");
    if (maxAbs(t.P - t.P.adjoint().eval()) > tol)
        throw std::invalid_argument("build_symplectic: P not self-adjoint");
    if (maxAbs(t.C.matrix * t.P.conjugate() - t.P * t.C.matrix) > tol)
        throw std::invalid_argument("build_symplectic: C and P do not commute");
    CMat ch = cosh_sa(t.P), sh = sinh_sa(t.P);
    // B = V cosh P - V C sinh P; the conjugate-linear factor contributes V*C*conj(sinh P).
    return {t.V * ch, -t.V * t.C.matrix * sh.conjugate()};
}

SymplecticTriple decompose_symplectic(const RealLinearOp& B, double tol) {
    if (!is_symplectic(B, std::max(tol, 1e-8)))
        throw std::invalid_argument("decompose_symplectic: input is not symplectic");
    Eigen::Index d = B.dim();
    const CMat& L = B.linear;
    const CMat& A = B.conjLinear;

    // |L| >= I for symplectic B with bounded inverse; polar part V = L|L|^{-1}.
    Eigen::SelfAdjointEigenSolver<CMat> esL(L.adjoint() * L);
    RVec lam = esL.eigenvalues();
    if (lam(0) < 1.0 - 1e-6)
        throw std::invalid_argument("decompose_symplectic: linear part is singular");
    RVec inv(lam.size()), root(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        root(i) = std::sqrt(std::max(lam(i), 1.0));
        inv(i) = 1.0 / root(i);
    }
    CMat V = L * (esL.eigenvectors() * inv.asDiagonal() * esL.eigenvectors().adjoint());

    // Conjugate-linear polar A = W|A| computed through the SVD of conj(A_m).
    Eigen::JacobiSVD<CMat> svd(A.conjugate(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-10 * smax) ++rank;

    // conj(A)*conj(A)^adj has root sinh P, so P = arcsinh of the singular values in the
    // right singular basis. (arccosh|L| is the same P but ill-conditioned near ker P.)
    RVec pEig(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) pEig(i) = std::asinh(s(i));
    CMat P = svd.matrixV() * pEig.cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
    CMat proj = CMat::Zero(d, d);
    for (Eigen::Index i = 0; i < rank; ++i) proj(i, i) = 1.0;
    CMat W = svd.matrixU().conjugate() * proj * svd.matrixV().transpose();
    CMat N = svd.matrixV().rightCols(d - rank);  // orthonormal basis of ker|A|

    // D = D0 (+) D1 with D1 = V*W on (ker|A|)^perp and D0 entrywise conjugation in basis N.
    CMat D = N * N.transpose() + V.adjoint() * W;
    return {V, Conjugation{-D}, P};
}

PartialConjugate partial_conjugate(const CMat& Y, Eigen::Index dimH, Eigen::Index dimH1,
                                   Eigen::Index dimH2) {
    if (Y.rows() != dimH * dimH2 || Y.cols() != dimH1)
        throw std::invalid_argument("partial_conjugate: shape inconsistent with dims");
    CMat Yc(dimH * dimH1, dimH2);
    // Yc[(i,a), c] = conj(Y[(i,c), a]): swaps the domain index with the second tensor slot.
    for (Eigen::Index i = 0; i < dimH; ++i)
        for (Eigen::Index a = 0; a < dimH1; ++a)
            for (Eigen::Index c = 0; c < dimH2; ++c)
                Yc(i * dimH1 + a, c) = std::conj(Y(i * dimH2 + c, a));
    return {Yc, opnorm(Yc)};
}

CMat degeneracy_space(const CMat& X, Eigen::Index dimK, Eigen::Index dimH, double tol) {
    if (X.rows() != dimK * dimH || X.cols() != dimH)
        throw std::invalid_argument("degeneracy_space: shape inconsistent with dims");
    // Column i holds vec of the slice (<e_i| (x) I)X; the map acts on conj(z).
    CMat M(dimH * dimH, dimK);
    for (Eigen::Index i = 0; i < dimK; ++i)
        M.col(i) = vec(X.middleRows(i * dimH, dimH));
    CMat null = null_space(M, tol);
    return null.conjugate();
}

CVec doubling(const CVec& x) {
    CVec v(2 * x.size());
    v.head(x.size()) = x;
    v.tail(x.size()) = -x.conjugate();
    return v;
}

CMat slice_bra(const CVec& x, const CMat& Y, Eigen::Index dimH) {
    Eigen::Index dimK = Y.rows() / dimH;
    if (Y.rows() != dimK * dimH || x.size() != dimK)
        throw std::invalid_argument("slice_bra: shape mismatch");
    CMat out = CMat::Zero(dimH, Y.cols());
    for (Eigen::Index i = 0; i < dimK; ++i)
        out += std::conj(x(i)) * Y.middleRows(i * dimH, dimH);
    return out;
}

CMat squeezing_matrix(const RealLinearOp& B) {
    Eigen::Index d = B.dim();
    CMat M(2 * d, 2 * d);
    M.topLeftCorner(d, d) = B.linear;
    M.topRightCorner(d, d) = -B.conjLinear;
    M.bottomLeftCorner(d, d) = -B.conjLinear.conjugate();
    M.bottomRightCorner(d, d) = B.linear.conjugate();
    return M;
}

AWAmplitude make_amplitude(const CMat& A, std::optional<SymplecticTriple> squeeze, double tol) {
    Eigen::Index d = A.rows();
    if (A.cols() != d) throw std::invalid_argument("make_amplitude: A must be square");
    if (maxAbs(A - A.adjoint().eval()) > tol)
        throw std::invalid_argument("make_amplitude: A not self-adjoint");
    Eigen::SelfAdjointEigenSolver<CMat> es(A);
    if (es.eigenvalues()(0) < -tol)
        throw std::invalid_argument("make_amplitude: A not non-negative");

    CMat sigma = CMat::Zero(2 * d, 2 * d);
    sigma.topLeftCorner(d, d) = cosh_sa(A);
    sigma.bottomRightCorner(d, d) = sinh_sa(A).conjugate();
    if (squeeze) {
        RealLinearOp B = build_symplectic(*squeeze, std::max(tol, 1e-8));
        sigma = sigma * squeezing_matrix(B);
    }
    return {d, A, std::move(squeeze), sigma};
}

double covariance(const AWAmplitude& sigma, const CVec& x) {
    if (x.size() != sigma.dimK) throw std::invalid_argument("covariance: dimension mismatch");
    return (sigma.sigmaBlocks * doubling(x)).squaredNorm();
}

CMat covariance_to_amplitude(const CMat& R, double tol) {
    Eigen::Index d = R.rows();
    if (R.cols() != d || maxAbs(R - R.adjoint().eval()) > tol)
        throw std::invalid_argument("covariance_to_amplitude: R must be self-adjoint");
    Eigen::SelfAdjointEigenSolver<CMat> es(R);
    if (es.eigenvalues()(0) < 1.0 - tol)
        throw std::invalid_argument("covariance_to_amplitude: R >= I required");
    return arccosh_clamped(R) / 2.0;
}

}  // namespace qsw
