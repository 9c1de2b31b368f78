#include "qsw/walk.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

namespace qsw {

namespace {

void require_selfadjoint(const CMat& X, const std::string& name, double tol) {
    if (X.rows() != X.cols())
        throw std::invalid_argument(name + ": square matrix required");
    if (maxAbs(CMat(X - X.adjoint())) > tol)
        throw std::invalid_argument(name + ": not self-adjoint");
}

}  // namespace

CMat GNSModel::isometryJ() const {
    CMat J(dimGNS(), 2 * dimNoise);
    J.leftCols(dimNoise) = basisK;
    J.rightCols(dimNoise) = basisKbar;
    return J;
}

CMat GNSModel::adapted() const {
    CMat W(dimGNS(), dimGNS());
    W.col(0) = omega;
    W.middleCols(1, dimNoise) = basisK;
    W.middleCols(1 + dimNoise, dimNoise) = basisKbar;
    W.rightCols(dimK0()) = basisK0;
    return W;
}

CMat GNSModel::pi(const CMat& X) const {
    if (X.rows() != particleDim || X.cols() != particleDim)
        throw std::invalid_argument("GNSModel::pi: dimension mismatch");
    return kron(eye(particleDim), X);
}

CVec GNSModel::eta(const CMat& X) const {
    const CMat img = X * Eigen::Map<const CMat>(omega.data(), particleDim, particleDim);
    return Eigen::Map<const CVec>(img.data(), img.size());
}

CMat GNSModel::pitilde(const CMat& A, Eigen::Index dimh) const {
    if (A.rows() != particleDim * dimh || A.cols() != A.rows())
        throw std::invalid_argument("GNSModel::pitilde: dimension mismatch");
    return kron(eye(particleDim), A);
}

CMat GNSModel::rhotilde(const CMat& A, Eigen::Index dimh) const {
    if (A.rows() != particleDim * dimh || A.cols() != A.rows())
        throw std::invalid_argument("GNSModel::rhotilde: dimension mismatch");
    CMat out = CMat::Zero(dimh, dimh);
    for (Eigen::Index m = 0; m < particleDim; ++m)
        for (Eigen::Index n = 0; n < particleDim; ++n)
            out += rho(n, m) * A.block(m * dimh, n * dimh, dimh, dimh);
    return out;
}

namespace {

// k columns are vec|e^i_alpha><e^j_beta| = conj(e^j_beta) (x) e^i_alpha over
// pairs alpha > beta; kbar columns are the adjoint partners in the same order.
void build_noise_bases(GNSModel& gns) {
    const Eigen::Index dp = gns.particleDim;
    const std::size_t clusters = gns.mult.size();
    Eigen::Index dk = 0;
    for (std::size_t a = 1; a < clusters; ++a)
        for (std::size_t b = 0; b < a; ++b) dk += gns.mult[a] * gns.mult[b];
    gns.dimNoise = dk;
    gns.basisK.resize(dp * dp, dk);
    gns.basisKbar.resize(dp * dp, dk);
    gns.blockIndex.clear();
    gns.blockIndex.reserve(static_cast<std::size_t>(dk));
    Eigen::Index col = 0;
    for (std::size_t a = 1; a < clusters; ++a)
        for (std::size_t b = 0; b < a; ++b)
            for (Eigen::Index i = 0; i < gns.mult[a]; ++i)
                for (Eigen::Index j = 0; j < gns.mult[b]; ++j) {
                    const CVec za = gns.eigenbasis[a].col(i);
                    const CVec zb = gns.eigenbasis[b].col(j);
                    gns.basisK.col(col) = kron(CMat(zb.conjugate()), CMat(za));
                    gns.basisKbar.col(col) = kron(CMat(za.conjugate()), CMat(zb));
                    gns.blockIndex.push_back({static_cast<Eigen::Index>(a),
                                              static_cast<Eigen::Index>(b), i, j});
                    ++col;
                }
}

}  // namespace

GNSModel gns_build(const CMat& rho, double tol) {
    require_selfadjoint(rho, "gns_build: state", 1e-12);
    if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-10)
        throw std::invalid_argument("gns_build: state must have unit trace");

    GNSModel gns;
    gns.particleDim = rho.rows();
    gns.rho = rho;

    Eigen::SelfAdjointEigenSolver<CMat> es(rho);
    if (es.eigenvalues().minCoeff() <= 1e-12)
        throw std::invalid_argument("gns_build: state not faithful");

    const Eigen::Index dp = rho.rows();
    // Descending eigenvalues, clustered at relative gap tol.
    std::vector<double> vals;
    std::vector<std::vector<Eigen::Index>> clusters;
    for (Eigen::Index idx = dp - 1; idx >= 0; --idx) {
        const double v = es.eigenvalues()(idx);
        if (vals.empty() || vals.back() - v > tol * vals.back()) {
            vals.push_back(v);
            clusters.push_back({idx});
        } else {
            clusters.back().push_back(idx);
        }
    }
    gns.gamma.resize(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t a = 0; a < vals.size(); ++a) {
        double mean = 0.0;
        for (Eigen::Index idx : clusters[a]) mean += es.eigenvalues()(idx);
        gns.gamma(static_cast<Eigen::Index>(a)) =
            mean / static_cast<double>(clusters[a].size());
        gns.mult.push_back(static_cast<Eigen::Index>(clusters[a].size()));
        CMat basis(dp, gns.mult[a]);
        for (std::size_t i = 0; i < clusters[a].size(); ++i)
            basis.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(clusters[a][i]);
        gns.eigenbasis.push_back(std::move(basis));
    }

    const CMat root = es.operatorSqrt();
    gns.omega = Eigen::Map<const CVec>(root.data(), root.size());

    gns.mrho = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a + 1 < gns.gamma.size(); ++a)
        gns.mrho = std::min(gns.mrho, gns.gamma(a) / gns.gamma(a + 1));

    build_noise_bases(gns);

    // K0: the diagonal pair blocks minus the omega line.
    CMat diagProj = CMat::Zero(dp * dp, dp * dp);
    for (std::size_t a = 0; a < clusters.size(); ++a) {
        const CMat proj = gns.eigenbasis[a] * gns.eigenbasis[a].adjoint();
        diagProj += kron(CMat(proj.conjugate()), proj);
    }
    diagProj -= gns.omega * gns.omega.adjoint();
    Eigen::SelfAdjointEigenSolver<CMat> esDiag(diagProj);
    Eigen::Index d0 = 0;
    for (Eigen::Index i = 0; i < esDiag.eigenvalues().size(); ++i)
        if (esDiag.eigenvalues()(i) > 0.5) ++d0;
    gns.basisK0.resize(dp * dp, d0);
    Eigen::Index col = 0;
    for (Eigen::Index i = 0; i < esDiag.eigenvalues().size(); ++i)
        if (esDiag.eigenvalues()(i) > 0.5) gns.basisK0.col(col++) = esDiag.eigenvectors().col(i);

    return gns;
}

GNSModel rotate_gns_bases(const GNSModel& gns, const std::vector<CMat>& unitaries) {
    if (unitaries.size() != gns.mult.size())
        throw std::invalid_argument("rotate_gns_bases: one unitary per eigenspace required");
    GNSModel out = gns;
    for (std::size_t a = 0; a < unitaries.size(); ++a) {
        if (unitaries[a].rows() != gns.mult[a] || unitaries[a].cols() != gns.mult[a])
            throw std::invalid_argument("rotate_gns_bases: unitary dimension mismatch");
        out.eigenbasis[a] = gns.eigenbasis[a] * unitaries[a];
    }
    build_noise_bases(out);
    return out;
}

AWAmplitude sigma_rho(const GNSModel& gns) {
    if (gns.dimNoise == 0)
        throw std::invalid_argument("sigma_rho: state has a single eigenvalue cluster");
    CMat A = CMat::Zero(gns.dimNoise, gns.dimNoise);
    for (Eigen::Index m = 0; m < gns.dimNoise; ++m) {
        const auto& [a, b, i, j] = gns.blockIndex[static_cast<std::size_t>(m)];
        const double gap = gns.gamma(b) - gns.gamma(a);
        if (gap <= 1e-14 * gns.gamma(b))
            throw std::invalid_argument("sigma_rho: eigenvalue clusters collide");
        A(m, m) = std::asinh(std::sqrt(gns.gamma(a) / gap));
    }
    return make_amplitude(A);
}

PhiPair phi_rho(const GNSModel& gns, const CMat& A, Eigen::Index dimh) {
    if (A.rows() != gns.particleDim * dimh || A.cols() != A.rows())
        throw std::invalid_argument("phi_rho: dimension mismatch");
    const CMat idh = eye(dimh);
    PhiPair out;
    out.Qhat = CMat::Zero(gns.dimNoise * dimh, dimh);
    out.Qbar = CMat::Zero(gns.dimNoise * dimh, dimh);
    for (Eigen::Index m = 0; m < gns.dimNoise; ++m) {
        const auto& [a, b, i, j] = gns.blockIndex[static_cast<std::size_t>(m)];
        const double weight = std::sqrt(gns.gamma(b) - gns.gamma(a));
        const CVec za = gns.eigenbasis[a].col(i);
        const CVec zb = gns.eigenbasis[b].col(j);
        out.Qhat.middleRows(m * dimh, dimh) =
            weight * slice_bra(za, CMat(A * kron(CMat(zb), idh)), dimh);
        out.Qbar.middleRows(m * dimh, dimh) =
            weight * slice_bra(zb, CMat(A * kron(CMat(za), idh)), dimh);
    }
    return out;
}

WalkModel make_walk_model(Eigen::Index particleDim, Eigen::Index systemDim,
                          const CMat& HS, const CMat& HP, const CMat& HI,
                          double tol) {
    require_selfadjoint(HS, "walk model: system Hamiltonian", tol);
    require_selfadjoint(HP, "walk model: particle Hamiltonian", tol);
    require_selfadjoint(HI, "walk model: interaction Hamiltonian", tol);
    if (HS.rows() != systemDim || HP.rows() != particleDim ||
        HI.rows() != particleDim * systemDim)
        throw std::invalid_argument("walk model: Hamiltonian dimensions mismatch");
    return {particleDim, systemDim, HS, HP, HI};
}

double off_diagonal_defect(const WalkModel& model, const GNSModel& gns) {
    const CMat idh = eye(model.systemDim);
    double defect = 0.0;
    for (const auto& basis : gns.eigenbasis) {
        const CMat proj = kron(CMat(basis * basis.adjoint()), idh);
        defect = std::max(defect, maxAbs(CMat(proj * model.HI * proj)));
    }
    return defect;
}

ScaledGenerator interaction_generator(const CMat& HS, const CMat& HPhat,
                                      const CMat& HIhat, Eigen::Index dimKhat,
                                      Eigen::Index dimh, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("interaction_generator: tau must be positive");
    const Eigen::Index n = dimKhat * dimh;
    if (HS.rows() != dimh || HPhat.rows() != dimKhat || HIhat.rows() != n)
        throw std::invalid_argument("interaction_generator: dimension mismatch");
    const CMat HT = kron(eye(dimKhat), HS) + kron(HPhat, eye(dimh)) +
                    (1.0 / std::sqrt(tau)) * HIhat;
    ScaledGenerator out;
    out.dimKhat = dimKhat;
    out.dimh = dimh;
    out.G = CMat(cplx(0.0, tau) * HT).exp();
    out.unitaryDefect = maxAbs(CMat(out.G.adjoint() * out.G - eye(n)));
    out.scaled = out.G - eye(n);
    const double rootTau = std::sqrt(tau);
    out.scaled.topLeftCorner(dimh, dimh) /= tau;
    out.scaled.topRightCorner(dimh, n - dimh) /= rootTau;
    out.scaled.bottomLeftCorner(n - dimh, dimh) /= rootTau;
    return out;
}

ScaledGenerator interaction_generator(const WalkModel& model, const GNSModel& gns,
                                      double tau) {
    if (model.particleDim != gns.particleDim)
        throw std::invalid_argument("interaction_generator: particle dimensions mismatch");
    const CMat W = gns.adapted();
    const CMat HPhat = W.adjoint() * gns.pi(model.HP) * W;
    const CMat lift = kron(W, eye(model.systemDim));
    const CMat HIhat = lift.adjoint() * gns.pitilde(model.HI, model.systemDim) * lift;
    return interaction_generator(model.HS, HPhat, HIhat, gns.dimGNS(),
                                 model.systemDim, tau);
}

cplx walk_element(const CMat& G, const StepFunction& f, const StepFunction& g,
                  const CVec& u, const CVec& v, long n, double tau) {
    if (tau <= 0.0 || n < 0) throw std::invalid_argument("walk_element: bad grid");
    const Eigen::Index dimh = u.size();
    if (v.size() != dimh || G.rows() != G.cols() || G.rows() % dimh != 0)
        throw std::invalid_argument("walk_element: dimension mismatch");
    const Eigen::Index dimK = G.rows() / dimh - 1;
    if (f.dim != dimK || g.dim != dimK)
        throw std::invalid_argument("walk_element: step function dimension mismatch");
    for (const StepFunction* s : {&f, &g})
        for (double b : s->breakpoints())
            if (std::abs(b - std::round(b / tau) * tau) > 1e-9)
                throw std::invalid_argument("walk_element: step function not slot-aligned");

    const CMat idh = eye(dimh);
    const double rootTau = std::sqrt(tau);
    CMat acc = idh;
    for (long j = 0; j < n; ++j) {
        CVec hatf(dimK + 1), hatg(dimK + 1);
        hatf(0) = 1.0;
        hatg(0) = 1.0;
        hatf.tail(dimK) = rootTau * f.value(static_cast<double>(j) * tau);
        hatg.tail(dimK) = rootTau * g.value(static_cast<double>(j) * tau);
        acc = slice_bra(hatf, CMat(G * kron(CMat(hatg), idh)), dimh) * acc;
    }
    cplx tail = 1.0;
    const double support = std::max(f.duration(), g.duration());
    const long slots = static_cast<long>(std::ceil(support / tau - 1e-12));
    for (long j = n; j < slots; ++j) {
        const CVec fj = f.value(static_cast<double>(j) * tau);
        const CVec gj = g.value(static_cast<double>(j) * tau);
        tail *= 1.0 + tau * fj.dot(gj);
    }
    return u.dot(CVec(acc * v)) * tail;
}

LimitGenerator limit_generator(const WalkModel& model, const GNSModel& gns,
                               double tol) {
    if (model.particleDim != gns.particleDim)
        throw std::invalid_argument("limit_generator: particle dimensions mismatch");
    if (gns.dimNoise == 0)
        throw std::invalid_argument(
            "limit_generator: state has no off-diagonal eigenvalue pairs");
    for (std::size_t a = 0; a < gns.eigenbasis.size(); ++a) {
        const CMat proj =
            kron(CMat(gns.eigenbasis[a] * gns.eigenbasis[a].adjoint()), eye(model.systemDim));
        if (maxAbs(CMat(proj * model.HI * proj)) > tol)
            throw std::invalid_argument(
                "limit_generator: interaction not off-diagonal at eigenvalue cluster " +
                std::to_string(a));
    }

    const Eigen::Index dh = model.systemDim;
    const Eigen::Index dk = gns.dimNoise;
    const CMat idh = eye(dh);
    LimitGenerator out;

    const double rhoHP = (gns.rho * model.HP).trace().real();
    out.K = cplx(0, 1) * model.HS + cplx(0, rhoHP) * idh -
            0.5 * gns.rhotilde(CMat(model.HI * model.HI), dh);

    const CMat column = gns.pitilde(model.HI, dh) * kron(CMat(gns.omega), idh);
    out.L = cplx(0, 1) * kron(CMat(gns.isometryJ().adjoint()), idh) * column;
    const CMat offProj =
        gns.omega * gns.omega.adjoint() + gns.basisK0 * gns.basisK0.adjoint();
    out.blockResidual = maxAbs(CMat(kron(offProj, idh) * column));

    out.Q = cplx(0, 1) * phi_rho(gns, model.HI, dh).Qhat;
    const AWAmplitude sigma = sigma_rho(gns);
    out.couplingResidual = opnorm(CMat(out.L - quasifree_creation(sigma, out.Q, dh)));

    const CMat Heff = model.HS + rhoHP * idh;
    out.qf = qf_generator(Heff, out.Q, sigma);

    const Eigen::Index dimK = 2 * dk + gns.dimK0();
    CMat Lfull = CMat::Zero(dimK * dh, dh);
    Lfull.topRows(2 * dk * dh) = out.L;
    out.lifted = hp_generator(Heff, Lfull, eye(dimK * dh));

    // Strong linear independence of the lower-triangular components of HI.
    CMat family(dh * dh, dk);
    for (Eigen::Index m = 0; m < dk; ++m) {
        const auto& [a, b, i, j] = gns.blockIndex[static_cast<std::size_t>(m)];
        const CMat comp = slice_bra(CVec(gns.eigenbasis[a].col(i)),
                                    CMat(model.HI * kron(CMat(gns.eigenbasis[b].col(j)), idh)),
                                    dh);
        family.col(m) = Eigen::Map<const CVec>(comp.data(), comp.size());
    }
    out.strongLISigmaMin = dk == 0 ? 0.0 : smallest_singular_value(family);
    out.unique = dk > 0 &&
                 degeneracy_space(CMat(out.L.topRows(dk * dh)), dk, dh).cols() == 0;
    return out;
}

StepFunction resample_steps(const StepFunction& f, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("resample_steps: tau must be positive");
    const long slots = static_cast<long>(std::ceil(f.duration() / tau - 1e-12));
    if (slots <= 0) return StepFunction::zero(f.dim);
    std::vector<std::pair<double, CVec>> segs;
    segs.reserve(static_cast<std::size_t>(slots));
    for (long j = 0; j < slots; ++j)
        segs.emplace_back(tau, f.value(static_cast<double>(j) * tau));
    return StepFunction::make(f.dim, std::move(segs));
}

std::vector<ConvergenceRow> convergence_study(const WalkModel& model,
                                              const GNSModel& gns,
                                              const StepFunction& f,
                                              const StepFunction& g, const CVec& u,
                                              const CVec& v, double T,
                                              const std::vector<long>& nList) {
    if (T <= 0.0) throw std::invalid_argument("convergence_study: T must be positive");
    for (std::size_t i = 1; i < nList.size(); ++i)
        if (nList[i] <= nList[i - 1])
            throw std::invalid_argument("convergence_study: nList must increase strictly");
    const Eigen::Index dimK = gns.dimGNS() - 1;
    if (f.dim != dimK || g.dim != dimK)
        throw std::invalid_argument("convergence_study: step function dimension mismatch");

    const LimitGenerator lim = limit_generator(model, gns);
    std::vector<std::future<double>> errors;
    errors.reserve(nList.size());
    for (long n : nList)
        errors.push_back(std::async(std::launch::async, [&, n] {
            const double tau = T / static_cast<double>(n);
            const StepFunction fr = resample_steps(f, tau);
            const StepFunction gr = resample_steps(g, tau);
            const ScaledGenerator one = interaction_generator(model, gns, tau);
            const cplx walk = walk_element(one.G, fr, gr, u, v, n, tau);
            const cplx exact = cocycle_element(lim.lifted, fr, gr, u, v, T);
            return std::abs(walk - exact);
        }));

    std::vector<ConvergenceRow> rows;
    rows.reserve(nList.size());
    for (std::size_t i = 0; i < nList.size(); ++i) {
        ConvergenceRow row;
        row.n = nList[i];
        row.tau = T / static_cast<double>(nList[i]);
        row.absError = errors[i].get();
        row.ratio = i == 0 ? 0.0 : row.absError / rows.back().absError;
        rows.push_back(row);
    }
    return rows;
}

WalkExperiment thermal_qubit_experiment(double gamma0) {
    if (gamma0 <= 0.5 || gamma0 >= 1.0)
        throw std::invalid_argument("thermal_qubit_experiment: gamma0 must lie in (0.5, 1)");
    WalkExperiment ex;
    ex.rho = CMat::Zero(2, 2);
    ex.rho(0, 0) = gamma0;
    ex.rho(1, 1) = 1.0 - gamma0;
    CMat sz(2, 2), sx(2, 2);
    sz << 1, 0, 0, -1;
    sx << 0, 1, 1, 0;
    ex.model = make_walk_model(2, 2, sz, sz, kron(sx, sx));
    CVec f1(3), f2(3), g1(3), g2(3);
    f1 << cplx(0.30, 0.10), cplx(-0.20, 0.00), cplx(0.25, -0.15);
    f2 << cplx(-0.10, 0.00), cplx(0.20, 0.20), cplx(0.10, 0.00);
    g1 << cplx(0.20, 0.00), cplx(0.15, -0.10), cplx(-0.20, 0.05);
    g2 << cplx(0.10, 0.10), cplx(-0.15, 0.00), cplx(0.20, 0.00);
    ex.f = StepFunction::make(3, {{0.7, f1}, {0.6, f2}});
    ex.g = StepFunction::make(3, {{0.5, g1}, {0.8, g2}});
    ex.u = CVec::Unit(2, 0);
    ex.v = CVec::Unit(2, 0);
    ex.T = 1.0;
    ex.nList = {16, 64, 256, 1024, 4096};
    return ex;
}

}  // namespace qsw
