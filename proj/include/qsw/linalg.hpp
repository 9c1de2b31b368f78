#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <complex>
#include <random>
#include <stdexcept>

namespace qsw {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline CMat kron(const CMat& a, const CMat& b) {
    return Eigen::kroneckerProduct(a, b);
}

inline CMat eye(Eigen::Index d) { return CMat::Identity(d, d); }

// Largest singular value.
inline double opnorm(const CMat& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<CMat>(a).singularValues()(0);
}

inline double maxAbs(const CMat& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().maxCoeff();
}

inline CMat expm(const CMat& a) { return a.exp(); }

// f applied to the spectrum of a self-adjoint matrix; enforces self-adjointness first.
template <typename F>
CMat funm_selfadjoint(const CMat& a, F f, double symTol = 1e-10) {
    if (a.rows() != a.cols()) throw std::invalid_argument("funm_selfadjoint: square matrix required");
    if (maxAbs(a - a.adjoint()) > symTol * std::max(1.0, maxAbs(a)))
        throw std::invalid_argument("funm_selfadjoint: matrix not self-adjoint");
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    RVec w = es.eigenvalues();
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = f(w(i));
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

inline CMat cosh_sa(const CMat& a)   { return funm_selfadjoint(a, [](double t) { return std::cosh(t); }); }
inline CMat sinh_sa(const CMat& a)   { return funm_selfadjoint(a, [](double t) { return std::sinh(t); }); }
inline CMat tanh_sa(const CMat& a)   { return funm_selfadjoint(a, [](double t) { return std::tanh(t); }); }
inline CMat arcsinh_sa(const CMat& a) { return funm_selfadjoint(a, [](double t) { return std::asinh(t); }); }
// Eigenvalues are clamped up to 1 before the log: guards the spectral edge against roundoff.
inline CMat arccosh_clamped(const CMat& a) {
    return funm_selfadjoint(a, [](double t) { return std::acosh(std::max(t, 1.0)); });
}
inline CMat sqrt_psd(const CMat& a) {
    return funm_selfadjoint(a, [](double t) { return std::sqrt(std::max(t, 0.0)); });
}

// Column-major vectorization of B(h); vec(AXB) = (B^T (x) A) vec(X).
inline CVec vec(const CMat& a) {
    CVec v(a.size());
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r) v(k++) = a(r, c);
    return v;
}

inline CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("unvec: size mismatch");
    CMat a(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = v(k++);
    return a;
}

// Orthonormal basis of the null space of a (columns); singular values <= tol*sigma_max count as zero.
inline CMat null_space(const CMat& a, double tol) {
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * smax) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

inline double smallest_singular_value(const CMat& a) {
    Eigen::JacobiSVD<CMat> svd(a);
    const auto& s = svd.singularValues();
    return s.size() ? s(s.size() - 1) : 0.0;
}

// Deterministic random sources for property checks.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double gauss() {
        std::normal_distribution<double> n(0.0, 1.0);
        return n(gen);
    }
    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(gen);
    }
    cplx cgauss() { return cplx(gauss(), gauss()) / std::sqrt(2.0); }

    CMat matrix(Eigen::Index r, Eigen::Index c) {
        CMat m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cgauss();
        return m;
    }
    CVec vector(Eigen::Index d) {
        CVec v(d);
        for (Eigen::Index i = 0; i < d; ++i) v(i) = cgauss();
        return v;
    }
    CMat selfadjoint(Eigen::Index d) {
        CMat m = matrix(d, d);
        return (m + m.adjoint().eval()) / 2.0;
    }
    CMat unitary(Eigen::Index d) {
        CMat m = matrix(d, d);
        Eigen::HouseholderQR<CMat> qr(m);
        CMat q = qr.householderQ() * CMat::Identity(d, d);
        CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
        // Fix phases so the factorization (hence q) is deterministic.
        for (Eigen::Index i = 0; i < d; ++i) {
            cplx rii = r(i, i);
            if (std::abs(rii) > 0) q.col(i) *= rii / std::abs(rii);
        }
        return q;
    }
    // Self-adjoint with spectrum in [lo, hi].
    CMat positive(Eigen::Index d, double lo, double hi) {
        CMat u = unitary(d);
        CVec diag(d);
        for (Eigen::Index i = 0; i < d; ++i) diag(i) = uniform(lo, hi);
        return u * diag.asDiagonal() * u.adjoint();
    }
    // Faithful density matrix: spectrum bounded below, unit trace.
    CMat density(Eigen::Index d, double minEig = 0.05) {
        CMat u = unitary(d);
        RVec w(d);
        double tot = 0;
        for (Eigen::Index i = 0; i < d; ++i) { w(i) = minEig + uniform(0.0, 1.0); tot += w(i); }
        w /= tot;
        return u * w.cast<cplx>().asDiagonal() * u.adjoint();
    }
};

}  // namespace qsw
