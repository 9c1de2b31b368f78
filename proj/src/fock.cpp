#include "qsw/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qsw {

namespace {

void enumerate_level(Eigen::Index d, int remaining, std::vector<int>& current,
                     std::vector<std::vector<int>>& out) {
    if (current.size() + 1 == static_cast<size_t>(d)) {
        current.push_back(remaining);
        out.push_back(current);
        current.pop_back();
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        current.push_back(k);
        enumerate_level(d, remaining - k, current, out);
        current.pop_back();
    }
}

}  // namespace

FockSpace::FockSpace(Eigen::Index oneParticleDim, int cutoffIn)
    : d(oneParticleDim), cutoff(cutoffIn) {
    if (d < 1 || cutoff < 0) throw std::invalid_argument("FockSpace: bad dimensions");
    for (int level = 0; level <= cutoff; ++level) {
        std::vector<int> current;
        enumerate_level(d, level, current, occupations);
    }
}

Eigen::Index FockSpace::index(const std::vector<int>& occ) const {
    if (occ.size() != static_cast<size_t>(d)) return -1;
    int total = 0;
    for (int k : occ) {
        if (k < 0) return -1;
        total += k;
    }
    if (total > cutoff) return -1;
    // Levels are enumerated in order; scan the block of the right level.
    for (Eigen::Index i = 0; i < dim(); ++i) {
        int lvl = 0;
        for (int k : occupations[i]) lvl += k;
        if (lvl == total && occupations[i] == occ) return i;
    }
    return -1;
}

Ladder ladder(const FockSpace& space, const CVec& x) {
    if (x.size() != space.d) throw std::invalid_argument("ladder: dimension mismatch");
    const Eigen::Index n = space.dim();
    CMat minus = CMat::Zero(n, n);
    std::vector<int> target;
    for (Eigen::Index col = 0; col < n; ++col) {
        const auto& occ = space.occupations[col];
        for (Eigen::Index k = 0; k < space.d; ++k) {
            if (occ[k] == 0 || x(k) == cplx(0, 0)) continue;
            target = occ;
            target[k] -= 1;
            Eigen::Index row = space.index(target);
            minus(row, col) += std::conj(x(k)) * std::sqrt(static_cast<double>(occ[k]));
        }
    }
    return {minus.adjoint(), minus};
}

CMat second_quantization(const FockSpace& space, const CMat& T) {
    if (T.rows() != space.d || T.cols() != space.d)
        throw std::invalid_argument("second_quantization: dimension mismatch");
    const Eigen::Index n = space.dim();
    CMat out = CMat::Zero(n, n);
    std::vector<int> target;
    for (Eigen::Index col = 0; col < n; ++col) {
        const auto& occ = space.occupations[col];
        for (Eigen::Index l = 0; l < space.d; ++l) {
            if (occ[l] == 0) continue;
            const double drop = std::sqrt(static_cast<double>(occ[l]));
            for (Eigen::Index k = 0; k < space.d; ++k) {
                if (T(k, l) == cplx(0, 0)) continue;
                target = occ;
                target[l] -= 1;
                const double raise = std::sqrt(static_cast<double>(target[k] + 1));
                target[k] += 1;
                out(space.index(target), col) += T(k, l) * drop * raise;
            }
        }
    }
    return out;
}

CVec exponential_vector(const FockSpace& space, const CVec& x) {
    if (x.size() != space.d) throw std::invalid_argument("exponential_vector: dimension mismatch");
    CVec v(space.dim());
    for (Eigen::Index i = 0; i < space.dim(); ++i) {
        const auto& occ = space.occupations[i];
        cplx c(1.0, 0.0);
        for (Eigen::Index k = 0; k < space.d; ++k) {
            double fact = 1.0;
            for (int r = 1; r <= occ[k]; ++r) {
                c *= x(k);
                fact *= r;
            }
            c /= std::sqrt(fact);
        }
        v(i) = c;
    }
    return v;
}

double exponential_tail(const FockSpace& space, const CVec& x) {
    const double s = x.squaredNorm();
    // Forward sum of the dropped terms sum_{n > N} s^n/n!; avoids the
    // catastrophic cancellation of exp(s) minus the partial sum.
    double term = 1.0;
    for (int level = 0; level < space.cutoff + 1; ++level) term *= s / (level + 1);
    double tailSq = 0.0;
    for (int n = space.cutoff + 1; n < space.cutoff + 2000 && term > 0.0; ++n) {
        tailSq += term;
        term *= s / (n + 1);
        if (term < tailSq * 1e-18) {
            tailSq += term;
            break;
        }
    }
    return std::sqrt(tailSq);
}

WeylOp weyl(const FockSpace& space, const CVec& x, double tol) {
    Ladder lad = ladder(space, x);
    const double tail = exponential_tail(space, x);
    return {expm(CMat(lad.plus - lad.minus)), tail, tail > tol};
}

WeylOp weyl_sigma(const AWAmplitude& sigma, const FockSpace& factor, const CVec& x,
                  double tol) {
    if (x.size() != sigma.dimK || factor.d != sigma.dimK)
        throw std::invalid_argument("weyl_sigma: dimension mismatch");
    const CVec pair = sigma.sigmaBlocks * doubling(x);
    const CVec y1 = pair.head(sigma.dimK), y2 = pair.tail(sigma.dimK);
    WeylOp w1 = weyl(factor, y1, tol), w2 = weyl(factor, y2, tol);
    const double tail = w1.tailBound + w2.tailBound;
    return {kron(w1.matrix, w2.matrix), tail, tail > tol};
}

Ladder ladder_sigma(const AWAmplitude& sigma, const FockSpace& factor, const CVec& x) {
    if (x.size() != sigma.dimK || factor.d != sigma.dimK)
        throw std::invalid_argument("ladder_sigma: dimension mismatch");
    Ladder c00 = ladder(factor, CVec(sigma.block(0, 0) * x));
    Ladder c10 = ladder(factor, CVec(sigma.block(1, 0) * x));
    Ladder c01 = ladder(factor, CVec(sigma.block(0, 1) * x.conjugate()));
    Ladder c11 = ladder(factor, CVec(sigma.block(1, 1) * x.conjugate()));
    const CMat id = eye(factor.dim());
    CMat plus = kron(c00.plus, id) + kron(id, c10.plus) + kron(c01.minus, id) +
                kron(id, c11.minus);
    CMat minus = kron(c00.minus, id) + kron(id, c10.minus) + kron(c01.plus, id) +
                 kron(id, c11.plus);
    return {plus, minus};
}

StepFunction StepFunction::make(Eigen::Index d, std::vector<std::pair<double, CVec>> segs) {
    for (const auto& [dt, val] : segs) {
        if (dt <= 0.0) throw std::invalid_argument("StepFunction: durations must be positive");
        if (val.size() != d) throw std::invalid_argument("StepFunction: value dimension mismatch");
    }
    return {std::move(segs), d};
}

CVec StepFunction::value(double t) const {
    double left = 0.0;
    for (const auto& [dt, val] : segments) {
        if (t >= left && t < left + dt) return val;
        left += dt;
    }
    return CVec::Zero(dim);
}

std::vector<double> StepFunction::breakpoints() const {
    std::vector<double> pts{0.0};
    double acc = 0.0;
    for (const auto& [dt, val] : segments) {
        acc += dt;
        pts.push_back(acc);
    }
    return pts;
}

double StepFunction::duration() const {
    double acc = 0.0;
    for (const auto& [dt, val] : segments) acc += dt;
    return acc;
}

double StepFunction::normSq() const {
    double acc = 0.0;
    for (const auto& [dt, val] : segments) acc += dt * val.squaredNorm();
    return acc;
}

cplx StepFunction::inner(const StepFunction& g) const {
    const double horizon = std::max(duration(), g.duration());
    return horizon > 0.0 ? innerInterval(g, 0.0, horizon) : cplx(0, 0);
}

cplx StepFunction::innerInterval(const StepFunction& g, double a, double b) const {
    if (dim != g.dim) throw std::invalid_argument("StepFunction: dimension mismatch");
    std::vector<double> pts{a, b};
    for (double t : breakpoints())
        if (t > a && t < b) pts.push_back(t);
    for (double t : g.breakpoints())
        if (t > a && t < b) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    cplx acc(0, 0);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const double mid = (pts[i] + pts[i + 1]) / 2.0;
        acc += (pts[i + 1] - pts[i]) * value(mid).dot(g.value(mid));
    }
    return acc;
}

Eigen::Index SlicedFock::dim() const {
    Eigen::Index n = 1;
    for (size_t j = 0; j < durations.size(); ++j) n *= slot.dim();
    return n;
}

std::vector<double> SlicedFock::boundaries() const {
    std::vector<double> pts{0.0};
    double acc = 0.0;
    for (double dt : durations) {
        acc += dt;
        pts.push_back(acc);
    }
    return pts;
}

int SlicedFock::boundarySlot(double t, double tol) const {
    const auto pts = boundaries();
    for (size_t j = 0; j < pts.size(); ++j)
        if (std::abs(pts[j] - t) <= tol) return static_cast<int>(j);
    return -1;
}

namespace {

// Verifies that h is constant on [left, left+dt) given its breakpoints.
void require_constant_on_slot(const std::vector<double>& breaks, double left, double right,
                              const char* what) {
    for (double t : breaks)
        if (t > left + 1e-9 && t < right - 1e-9)
            throw std::invalid_argument(std::string(what) +
                                        ": discontinuity inside a slot");
}

}  // namespace

CVec sliced_exponential_vector(const SlicedFock& slicing, const StepFunction& f) {
    if (f.dim != slicing.slot.d)
        throw std::invalid_argument("sliced_exponential_vector: dimension mismatch");
    const auto fBreaks = f.breakpoints();
    CVec out = CVec::Ones(1);
    double left = 0.0;
    for (double dt : slicing.durations) {
        require_constant_on_slot(fBreaks, left, left + dt, "sliced_exponential_vector");
        const CVec arg = std::sqrt(dt) * f.value(left);
        out = kron(CMat(out), CMat(exponential_vector(slicing.slot, arg))).col(0).eval();
        left += dt;
    }
    return out;
}

SimpleIntegrand SimpleIntegrand::make(Eigen::Index dimK, Eigen::Index dimh,
                                      std::vector<std::pair<double, CMat>> segs) {
    const Eigen::Index n = (1 + dimK) * dimh;
    for (const auto& [dt, val] : segs) {
        if (dt <= 0.0) throw std::invalid_argument("SimpleIntegrand: durations must be positive");
        if (val.rows() != n || val.cols() != n)
            throw std::invalid_argument("SimpleIntegrand: block size mismatch");
    }
    return {std::move(segs), dimK, dimh};
}

CMat SimpleIntegrand::value(double t) const {
    double left = 0.0;
    for (const auto& [dt, val] : segments) {
        if (t >= left && t < left + dt) return val;
        left += dt;
    }
    return CMat::Zero((1 + dimK) * dimh, (1 + dimK) * dimh);
}

std::vector<double> SimpleIntegrand::breakpoints() const {
    std::vector<double> pts{0.0};
    double acc = 0.0;
    for (const auto& [dt, val] : segments) {
        acc += dt;
        pts.push_back(acc);
    }
    return pts;
}

SimpleIntegrand SimpleIntegrand::adjointwise() const {
    SimpleIntegrand out = *this;
    for (auto& [dt, val] : out.segments) val = val.adjoint().eval();
    return out;
}

CMat qs_integral_operator(const SimpleIntegrand& F, const SlicedFock& slicing, double t) {
    if (F.dimK != slicing.slot.d)
        throw std::invalid_argument("qs_integral_operator: noise dimension mismatch");
    const int upto = slicing.boundarySlot(t);
    if (upto < 0)
        throw std::invalid_argument("qs_integral_operator: t is not a slot boundary");

    const Eigen::Index dh = F.dimh, dK = F.dimK;
    const Eigen::Index slotDim = slicing.slot.dim();
    const int m = slicing.slots();

    // Per-slot ladder operators for the basis directions of K, shared by all slots.
    std::vector<Ladder> basisLadder;
    basisLadder.reserve(dK);
    for (Eigen::Index i = 0; i < dK; ++i)
        basisLadder.push_back(ladder(slicing.slot, CVec::Unit(dK, i)));

    auto embed = [&](const CMat& op, int j) {
        CMat out = CMat::Ones(1, 1);
        for (int s = 0; s < m; ++s)
            out = kron(out, s == j ? op : eye(slotDim)).eval();
        return out;
    };

    const auto fBreaks = F.breakpoints();
    CMat total = CMat::Zero(dh * slicing.dim(), dh * slicing.dim());
    double left = 0.0;
    for (int j = 0; j < upto; ++j) {
        const double dt = slicing.durations[j];
        require_constant_on_slot(fBreaks, left, left + dt, "qs_integral_operator");
        const CMat Fj = F.value(left);
        const CMat K = Fj.topLeftCorner(dh, dh);
        const CMat L = Fj.bottomLeftCorner(dK * dh, dh);
        const CMat M = Fj.topRightCorner(dh, dK * dh);
        const CMat N = Fj.bottomRightCorner(dK * dh, dK * dh);

        total += kron(CMat(dt * K), embed(eye(slotDim), j));
        const double root = std::sqrt(dt);
        for (Eigen::Index i = 0; i < dK; ++i) {
            const CMat Li = slice_bra(CVec::Unit(dK, i), L, dh);
            const CMat Mi = M.middleCols(i * dh, dh);
            total += kron(CMat(root * Li), embed(basisLadder[i].plus, j));
            total += kron(CMat(root * Mi), embed(basisLadder[i].minus, j));
        }
        for (Eigen::Index k = 0; k < dK; ++k)
            for (Eigen::Index l = 0; l < dK; ++l) {
                const CMat Nkl =
                    slice_bra(CVec::Unit(dK, k), CMat(N.middleCols(l * dh, dh)), dh);
                if (maxAbs(Nkl) == 0.0) continue;
                total += kron(Nkl, embed(CMat(basisLadder[k].plus * basisLadder[l].minus), j));
            }
        left += dt;
    }
    return total;
}

}  // namespace qsw
