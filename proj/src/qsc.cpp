#include "qsw/qsc.hpp"

#include "qsw/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsw {

namespace {

// Sorted boundaries of the common refinement of the given breakpoint lists
// restricted to [0, t]; adjacent pairs are the constancy pieces.
std::vector<double> merged_pieces(std::initializer_list<std::vector<double>> lists,
                                  double t) {
    if (t < 0.0) throw std::invalid_argument("time must be non-negative");
    std::vector<double> cuts{0.0, t};
    for (const auto& lst : lists)
        for (double s : lst)
            if (s > 1e-12 && s < t - 1e-12) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());
    return cuts;
}

CVec hat(const CVec& x) {
    CVec xh(x.size() + 1);
    xh(0) = 1.0;
    xh.tail(x.size()) = x;
    return xh;
}

// exp(<f 1_[t,inf), g 1_[t,inf)>); step data vanish beyond their support.
cplx tail_factor(const StepFunction& f, const StepFunction& g, double t) {
    return std::exp(f.inner(g) - f.innerInterval(g, 0.0, t));
}

}  // namespace

CMat HPGenerator::timeBlock() const {
    return cplx(0, 1) * H - 0.5 * L.adjoint() * L;
}

bool HPGenerator::gaussian(double tol) const {
    return maxAbs(W - CMat::Identity(W.rows(), W.cols())) <= tol;
}

CMat ito_projection(Eigen::Index dimK, Eigen::Index dimh) {
    const Eigen::Index n = (1 + dimK) * dimh;
    CMat d = CMat::Zero(n, n);
    d.bottomRightCorner(dimK * dimh, dimK * dimh) =
        CMat::Identity(dimK * dimh, dimK * dimh);
    return d;
}

HPGenerator hp_generator(const CMat& H, const CMat& L, const CMat& W, double tol) {
    const Eigen::Index dh = H.rows();
    if (H.cols() != dh) throw std::invalid_argument("hp_generator: H must be square");
    if (L.cols() != dh || L.rows() % dh != 0)
        throw std::invalid_argument("hp_generator: L must map h into K (x) h");
    const Eigen::Index dK = L.rows() / dh;
    if (W.rows() != dK * dh || W.cols() != dK * dh)
        throw std::invalid_argument("hp_generator: W must act on K (x) h");
    if (maxAbs(H - H.adjoint()) > tol)
        throw std::invalid_argument("hp_generator: H is not self-adjoint");
    if (maxAbs(W.adjoint() * W - CMat::Identity(dK * dh, dK * dh)) > tol)
        throw std::invalid_argument("hp_generator: W is not unitary");

    const Eigen::Index n = (1 + dK) * dh;
    CMat F = CMat::Zero(n, n);
    F.topLeftCorner(dh, dh) = cplx(0, 1) * H - 0.5 * L.adjoint() * L;
    F.topRightCorner(dh, dK * dh) = -L.adjoint() * W;
    F.bottomLeftCorner(dK * dh, dh) = L;
    F.bottomRightCorner(dK * dh, dK * dh) = W - CMat::Identity(dK * dh, dK * dh);

    const CMat d = ito_projection(dK, dh);
    HPGenerator gen{H, L, W, F, dK, dh, 0.0, 0.0};
    gen.residual1 = maxAbs(F.adjoint() + F + F.adjoint() * d * F);
    gen.residual2 = maxAbs(F + F.adjoint() + F * d * F.adjoint());
    return gen;
}

CMat slot_compression(const CMat& F, const CVec& x, const CVec& y,
                      Eigen::Index dimh) {
    if (F.rows() != F.cols() || F.rows() % dimh != 0)
        throw std::invalid_argument("slot_compression: shape mismatch");
    const CVec yh = hat(y);
    if ((1 + x.size()) * dimh != F.rows() || yh.size() * dimh != F.cols())
        throw std::invalid_argument("slot_compression: dimension mismatch");
    const CMat right = F * kron(CMat(yh), CMat::Identity(dimh, dimh));
    return slice_bra(hat(x), right, dimh);
}

cplx integral_element(const SimpleIntegrand& F, const StepFunction& f,
                      const StepFunction& g, const CVec& u, const CVec& v,
                      double t) {
    if (f.dim != F.dimK || g.dim != F.dimK)
        throw std::invalid_argument("integral_element: noise dimension mismatch");
    if (u.size() != F.dimh || v.size() != F.dimh)
        throw std::invalid_argument("integral_element: initial-space dimension mismatch");
    const auto cuts =
        merged_pieces({F.breakpoints(), f.breakpoints(), g.breakpoints()}, t);
    cplx acc(0, 0);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = (cuts[i] + cuts[i + 1]) / 2.0;
        const CVec left = kron(CMat(hat(f.value(mid))), CMat(u)).col(0);
        const CVec right = kron(CMat(hat(g.value(mid))), CMat(v)).col(0);
        acc += (cuts[i + 1] - cuts[i]) * left.dot(F.value(mid) * right);
    }
    return acc * std::exp(f.inner(g));
}

cplx cocycle_element(const HPGenerator& gen, const StepFunction& f,
                     const StepFunction& g, const CVec& u, const CVec& v,
                     double t) {
    if (f.dim != gen.dimK || g.dim != gen.dimK)
        throw std::invalid_argument("cocycle_element: noise dimension mismatch");
    if (u.size() != gen.dimh || v.size() != gen.dimh)
        throw std::invalid_argument("cocycle_element: initial-space dimension mismatch");
    const auto cuts = merged_pieces({f.breakpoints(), g.breakpoints()}, t);
    CMat m = CMat::Identity(gen.dimh, gen.dimh);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = (cuts[i] + cuts[i + 1]) / 2.0;
        const CVec x = f.value(mid), y = g.value(mid);
        const CMat slot = slot_compression(gen.F, x, y, gen.dimh) +
                          x.dot(y) * CMat::Identity(gen.dimh, gen.dimh);
        m = expm(CMat((cuts[i + 1] - cuts[i]) * slot)) * m;
    }
    return u.dot(m * v) * tail_factor(f, g, t);
}

CMat theta(const HPGenerator& gen, const CMat& a) {
    if (a.rows() != gen.dimh || a.cols() != gen.dimh)
        throw std::invalid_argument("theta: argument must act on h");
    const Eigen::Index dh = gen.dimh, dK = gen.dimK;
    const CMat ia = kron(CMat::Identity(dK, dK), a);
    const CMat lstarl = gen.L.adjoint() * gen.L;
    const Eigen::Index n = (1 + dK) * dh;
    CMat out = CMat::Zero(n, n);
    out.topLeftCorner(dh, dh) = cplx(0, -1) * (gen.H * a - a * gen.H) -
                                0.5 * (lstarl * a + a * lstarl) +
                                gen.L.adjoint() * ia * gen.L;
    out.topRightCorner(dh, dK * dh) =
        (gen.L.adjoint() * ia - a * gen.L.adjoint()) * gen.W;
    out.bottomLeftCorner(dK * dh, dh) = gen.W.adjoint() * (ia * gen.L - gen.L * a);
    out.bottomRightCorner(dK * dh, dK * dh) = gen.W.adjoint() * ia * gen.W - ia;
    return out;
}

FlowGenerator flow_generator(const HPGenerator& gen) {
    const Eigen::Index dh = gen.dimh;
    FlowGenerator flow;
    flow.dimK = gen.dimK;
    flow.dimh = dh;
    flow.thetaBasis.reserve(static_cast<size_t>(dh * dh));
    for (Eigen::Index c = 0; c < dh; ++c)
        for (Eigen::Index r = 0; r < dh; ++r) {
            CMat unit = CMat::Zero(dh, dh);
            unit(r, c) = 1.0;
            flow.thetaBasis.push_back(theta(gen, unit));
        }
    flow.unitalResidual = maxAbs(flow.theta(CMat::Identity(dh, dh)));
    double adj = 0.0;
    for (Eigen::Index c = 0; c < dh; ++c)
        for (Eigen::Index r = 0; r < dh; ++r)
            adj = std::max(adj, maxAbs(flow.thetaBasis[c * dh + r].adjoint() -
                                       flow.thetaBasis[r * dh + c]));
    flow.adjointResidual = adj;
    return flow;
}

CMat FlowGenerator::theta(const CMat& a) const {
    if (a.rows() != dimh || a.cols() != dimh)
        throw std::invalid_argument("theta: argument must act on h");
    const Eigen::Index n = (1 + dimK) * dimh;
    CMat out = CMat::Zero(n, n);
    for (Eigen::Index c = 0; c < dimh; ++c)
        for (Eigen::Index r = 0; r < dimh; ++r)
            out += a(r, c) * thetaBasis[static_cast<size_t>(c * dimh + r)];
    return out;
}

CMat FlowGenerator::lindblad(const CMat& a) const {
    return theta(a).topLeftCorner(dimh, dimh);
}

CMat FlowGenerator::lindbladSuperoperator() const {
    CMat super(dimh * dimh, dimh * dimh);
    for (Eigen::Index k = 0; k < dimh * dimh; ++k)
        super.col(k) =
            vec(thetaBasis[static_cast<size_t>(k)].topLeftCorner(dimh, dimh));
    return super;
}

CMat FlowGenerator::slotSuperoperator(const CVec& x, const CVec& y) const {
    CMat super(dimh * dimh, dimh * dimh);
    for (Eigen::Index k = 0; k < dimh * dimh; ++k)
        super.col(k) =
            vec(slot_compression(thetaBasis[static_cast<size_t>(k)], x, y, dimh));
    return super;
}

cplx flow_element(const FlowGenerator& flow, const CMat& a, const StepFunction& f,
                  const StepFunction& g, const CVec& u, const CVec& v, double t) {
    if (f.dim != flow.dimK || g.dim != flow.dimK)
        throw std::invalid_argument("flow_element: noise dimension mismatch");
    if (u.size() != flow.dimh || v.size() != flow.dimh)
        throw std::invalid_argument("flow_element: initial-space dimension mismatch");
    if (a.rows() != flow.dimh || a.cols() != flow.dimh)
        throw std::invalid_argument("flow_element: argument must act on h");
    const auto cuts = merged_pieces({f.breakpoints(), g.breakpoints()}, t);
    const Eigen::Index n = flow.dimh * flow.dimh;
    CVec phi = vec(a);
    // Earliest slot is the outermost map, so it multiplies phi last.
    for (size_t i = cuts.size() - 1; i > 0; --i) {
        const double mid = (cuts[i - 1] + cuts[i]) / 2.0;
        const CVec x = f.value(mid), y = g.value(mid);
        const CMat super =
            flow.slotSuperoperator(x, y) + x.dot(y) * CMat::Identity(n, n);
        phi = expm(CMat((cuts[i] - cuts[i - 1]) * super)) * phi;
    }
    return u.dot(unvec(phi, flow.dimh, flow.dimh) * v) * tail_factor(f, g, t);
}

cplx flow_element(const HPGenerator& gen, const CMat& a, const StepFunction& f,
                  const StepFunction& g, const CVec& u, const CVec& v, double t) {
    return flow_element(flow_generator(gen), a, f, g, u, v, t);
}

HPGenerator product_with_noise(const HPGenerator& gen, const NoiseWitness& noise) {
    const Eigen::Index dK = gen.dimK, dh = gen.dimh;
    if (noise.z.size() != dK || noise.w.rows() != dK || noise.w.cols() != dK)
        throw std::invalid_argument("product_with_noise: noise dimension mismatch");
    if (maxAbs(noise.w.adjoint() * noise.w - CMat::Identity(dK, dK)) > 1e-8)
        throw std::invalid_argument("product_with_noise: w is not unitary");
    const CMat ih = CMat::Identity(dh, dh);
    const CMat wAmp = kron(noise.w, ih);
    const CMat wNew = wAmp * gen.W;
    const CMat lNew = wAmp * gen.L + kron(CMat(noise.z), ih);
    const CVec wz = noise.w.adjoint() * noise.z;
    const CMat cross = slice_bra(wz, gen.L, dh);
    const CMat hNew = gen.H + cplx(0, 0.5) * (cross - cross.adjoint()) +
                      noise.alpha * ih;
    return hp_generator(hNew, lNew, wNew);
}

std::optional<NoiseWitness> same_flow(const HPGenerator& gen1,
                                      const HPGenerator& gen2, double tol) {
    if (gen1.dimK != gen2.dimK || gen1.dimh != gen2.dimh)
        throw std::invalid_argument("same_flow: dimension mismatch");
    const Eigen::Index dK = gen1.dimK, dh = gen1.dimh;
    const CMat ih = CMat::Identity(dh, dh);

    const CMat x = gen2.W * gen1.W.adjoint();
    CMat w(dK, dK);
    for (Eigen::Index k = 0; k < dK; ++k)
        for (Eigen::Index l = 0; l < dK; ++l)
            w(k, l) = x.block(k * dh, l * dh, dh, dh).trace() / double(dh);
    double res = maxAbs(x - kron(w, ih));
    res = std::max(res, maxAbs(w.adjoint() * w - CMat::Identity(dK, dK)));

    const CMat diff = gen2.L - kron(w, ih) * gen1.L;
    CVec z(dK);
    for (Eigen::Index k = 0; k < dK; ++k)
        z(k) = diff.block(k * dh, 0, dh, dh).trace() / double(dh);
    res = std::max(res, maxAbs(diff - kron(CMat(z), ih)));

    const CMat cross = slice_bra(CVec(w.adjoint() * z), gen1.L, dh);
    const CMat rem =
        gen2.H - gen1.H - cplx(0, 0.5) * (cross - cross.adjoint());
    const cplx alpha = rem.trace() / double(dh);
    res = std::max(res, std::abs(alpha.imag()));
    res = std::max(res, maxAbs(rem - alpha.real() * ih));

    if (res > tol) return std::nullopt;
    return NoiseWitness{alpha.real(), z, w};
}

bool minimality_check(const CMat& L, double tol, double* sigmaMin) {
    const Eigen::Index dh = L.cols();
    if (dh == 0 || L.rows() % dh != 0)
        throw std::invalid_argument("minimality_check: L must map h into K (x) h");
    const Eigen::Index dK = L.rows() / dh;
    CMat cols(dh * dh, dK + 1);
    for (Eigen::Index k = 0; k < dK; ++k)
        cols.col(k) = vec(slice_bra(CVec(CVec::Unit(dK, k)), L, dh));
    cols.col(dK) = vec(CMat::Identity(dh, dh));
    if (cols.rows() < cols.cols()) {
        if (sigmaMin) *sigmaMin = 0.0;
        return false;
    }
    const double sigma = smallest_singular_value(cols);
    if (sigmaMin) *sigmaMin = sigma;
    return sigma > tol;
}

}  // namespace qsw
