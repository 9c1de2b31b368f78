#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsw/algebra.hpp"
#include "qsw/qsc.hpp"
#include "qsw/suites.hpp"

#include <complex>

using namespace qsw;

namespace {

HPGenerator random_generator(Rng& rng, Eigen::Index dimK, Eigen::Index dimh,
                             bool gaussianOnly = false) {
    const CMat H = rng.selfadjoint(dimh);
    const CMat L = rng.matrix(dimK * dimh, dimh);
    const CMat W = gaussianOnly ? CMat::Identity(dimK * dimh, dimK * dimh)
                                : rng.unitary(dimK * dimh);
    return hp_generator(H, L, W);
}

HPGenerator zero_generator(Eigen::Index dimK, Eigen::Index dimh) {
    return hp_generator(CMat::Zero(dimh, dimh), CMat::Zero(dimK * dimh, dimh),
                        CMat::Identity(dimK * dimh, dimK * dimh));
}

// Pure-noise generator on h = C with data (alpha, z, w).
HPGenerator noise_generator(double alpha, const CVec& z, const CMat& w) {
    CMat h(1, 1);
    h(0, 0) = alpha;
    return hp_generator(h, z, w);
}

// Lindblad superoperator built directly from (H, L), bypassing theta.
CMat direct_lindblad_superoperator(const CMat& H, const CMat& L) {
    const Eigen::Index dh = H.rows();
    const Eigen::Index dK = L.rows() / dh;
    const CMat lstarl = L.adjoint() * L;
    CMat super(dh * dh, dh * dh);
    for (Eigen::Index c = 0; c < dh; ++c)
        for (Eigen::Index r = 0; r < dh; ++r) {
            CMat unit = CMat::Zero(dh, dh);
            unit(r, c) = 1.0;
            const CMat image = cplx(0, -1) * (H * unit - unit * H) -
                               0.5 * (lstarl * unit + unit * lstarl) +
                               L.adjoint() * kron(CMat::Identity(dK, dK), unit) * L;
            super.col(c * dh + r) = vec(image);
        }
    return super;
}

StepFunction transformed(const CMat& w, const StepFunction& f) {
    StepFunction out = f;
    for (auto& [dt, val] : out.segments) val = (w * val).eval();
    out.dim = w.rows();
    return out;
}

StepFunction constant_step(double duration, const CVec& value) {
    return StepFunction::make(value.size(), {{duration, value}});
}

// <u eps(f), Y_t v eps(g)> for the pure-noise cocycle with data (alpha, z, w),
// via the Weyl action W(x)eps(g) = exp(-|x|^2/2 - <x,g>) eps(x + g) and the
// second-quantized rotation, independently of the ordered-exponential route.
cplx analytic_pure_noise(double alpha, const CVec& z, const CMat& w, cplx u,
                         cplx v, const StepFunction& f, const StepFunction& g,
                         double t) {
    const StepFunction zConst = constant_step(std::max(t, 1e-30), z);
    const StepFunction wg = transformed(w, g);
    const cplx exponent = cplx(0, alpha * t) - 0.5 * t * z.squaredNorm() -
                          zConst.innerInterval(wg, 0.0, t) +
                          f.innerInterval(zConst, 0.0, t) +
                          f.innerInterval(wg, 0.0, t) + f.inner(g) -
                          f.innerInterval(g, 0.0, t);
    return std::conj(u) * v * std::exp(exponent);
}

}  // namespace

TEST_CASE("generator assembly and structure relations") {
    Rng rng(511);

    SUBCASE("zero triple gives F = 0") {
        auto gen = zero_generator(1, 2);
        CHECK(maxAbs(gen.F) == 0.0);
        CHECK(gen.residual1 == 0.0);
        CHECK(gen.residual2 == 0.0);
        CHECK(gen.gaussian());
    }

    SUBCASE("blocks are placed as assembled") {
        const CMat H = rng.selfadjoint(2);
        const CMat L = rng.matrix(4, 2);
        const CMat W = rng.unitary(4);
        auto gen = hp_generator(H, L, W);
        CHECK(gen.dimK == 2);
        CHECK(gen.dimh == 2);
        CHECK(maxAbs(gen.F.topLeftCorner(2, 2) -
                     (cplx(0, 1) * H - 0.5 * L.adjoint() * L)) == 0.0);
        CHECK(maxAbs(gen.F.topRightCorner(2, 4) + L.adjoint() * W) == 0.0);
        CHECK(maxAbs(gen.F.bottomLeftCorner(4, 2) - L) == 0.0);
        CHECK(maxAbs(gen.F.bottomRightCorner(4, 4) - (W - CMat::Identity(4, 4))) ==
              0.0);
        CHECK(maxAbs(gen.timeBlock() - gen.F.topLeftCorner(2, 2)) == 0.0);
    }

    SUBCASE("structure residuals vanish for random triples") {
        for (int trial = 0; trial < 10; ++trial) {
            auto gen = random_generator(rng, 2, 2);
            CHECK(gen.residual1 <= 1e-13);
            CHECK(gen.residual2 <= 1e-13);
        }
    }

    SUBCASE("Gaussian case: K + L*L/2 skew-adjoint") {
        auto gen = random_generator(rng, 2, 2, true);
        CHECK(gen.gaussian());
        const CMat skew = gen.timeBlock() + 0.5 * gen.L.adjoint() * gen.L;
        CHECK(maxAbs(skew + skew.adjoint()) <= 1e-13);
        CHECK_FALSE(random_generator(rng, 2, 2).gaussian(1e-6));
    }

    SUBCASE("invalid inputs are rejected") {
        const CMat bad = rng.matrix(2, 2) + CMat::Identity(2, 2) * 5.0;
        CHECK_THROWS_AS(hp_generator(bad, CMat::Zero(2, 2), CMat::Identity(2, 2)),
                        std::invalid_argument);
        CHECK_THROWS_AS(hp_generator(CMat::Identity(2, 2), CMat::Zero(2, 2),
                                     2.0 * CMat::Identity(2, 2)),
                        std::invalid_argument);
        CHECK_THROWS_AS(hp_generator(CMat::Identity(2, 2), rng.matrix(3, 2),
                                     CMat::Identity(2, 2)),
                        std::invalid_argument);
    }

    SUBCASE("ito projection") {
        const CMat d = ito_projection(2, 2);
        CHECK(maxAbs(d * d - d) == 0.0);
        CHECK(maxAbs(d - d.adjoint()) == 0.0);
        CHECK(maxAbs(d.topLeftCorner(2, 2)) == 0.0);
        CHECK(maxAbs(d.bottomRightCorner(4, 4) - CMat::Identity(4, 4)) == 0.0);
    }
}

TEST_CASE("slot compression") {
    Rng rng(902);
    const Eigen::Index dK = 2, dh = 3;
    const CMat F = rng.matrix((1 + dK) * dh, (1 + dK) * dh);
    const CVec x = rng.vector(dK), y = rng.vector(dK);

    // Index-level oracle for (<(1,x)| (x) I) F (|(1,y)> (x) I).
    CVec xh(1 + dK), yh(1 + dK);
    xh(0) = 1.0;
    xh.tail(dK) = x;
    yh(0) = 1.0;
    yh.tail(dK) = y;
    CMat expected = CMat::Zero(dh, dh);
    for (Eigen::Index p = 0; p <= dK; ++p)
        for (Eigen::Index q = 0; q <= dK; ++q)
            for (Eigen::Index r = 0; r < dh; ++r)
                for (Eigen::Index c = 0; c < dh; ++c)
                    expected(r, c) +=
                        std::conj(xh(p)) * F(p * dh + r, q * dh + c) * yh(q);
    CHECK(maxAbs(slot_compression(F, x, y, dh) - expected) <= 1e-14);

    auto gen = random_generator(rng, dK, dh);
    CHECK(maxAbs(slot_compression(gen.F, CVec::Zero(dK), CVec::Zero(dK), dh) -
                 gen.timeBlock()) <= 1e-14);
}

TEST_CASE("integral elements") {
    Rng rng(333);
    const Eigen::Index dK = 1, dh = 2;
    const CVec u = rng.vector(dh), v = rng.vector(dh);

    SUBCASE("zero integrand") {
        auto F = SimpleIntegrand::make(dK, dh, {{1.0, CMat::Zero(4, 4)}});
        const StepFunction f = StepFunction::make(
            dK, {{0.5, CVec::Constant(1, cplx(0.3, -0.1))}});
        CHECK(integral_element(F, f, f, u, v, 0.8) == cplx(0, 0));
    }

    SUBCASE("time part integrates to t<u,Kv>") {
        const CMat K = rng.matrix(dh, dh);
        CMat block = CMat::Zero(4, 4);
        block.topLeftCorner(dh, dh) = K;
        auto F = SimpleIntegrand::make(dK, dh, {{3.0, block}});
        const StepFunction zero = StepFunction::zero(dK);
        const cplx base = u.dot(K * v);
        CHECK(std::abs(integral_element(F, zero, zero, u, v, 0.7) - 0.7 * base) <=
              1e-14);
        // The integrand vanishes beyond its support.
        CHECK(std::abs(integral_element(F, zero, zero, u, v, 5.0) - 3.0 * base) <=
              1e-13);
    }

    SUBCASE("agrees with the sliced-Fock integral operator") {
        SlicedFock slicing{FockSpace(1, 12), {0.5, 0.5}};
        CMat blockA(4, 4), blockB(4, 4);
        blockA << cplx(0.3, 0.1), cplx(-0.2, 0.0), cplx(0.1, -0.3), cplx(0.0, 0.2),
            cplx(0.2, -0.1), cplx(0.4, 0.0), cplx(-0.1, 0.1), cplx(0.3, 0.0),
            cplx(0.0, 0.25), cplx(-0.3, 0.1), cplx(0.2, 0.2), cplx(0.1, 0.0),
            cplx(0.15, 0.0), cplx(0.0, -0.2), cplx(0.05, 0.1), cplx(-0.2, 0.3);
        blockB = 0.5 * blockA.adjoint() + 0.25 * CMat::Identity(4, 4);
        auto F = SimpleIntegrand::make(dK, dh, {{0.5, blockA}, {0.5, blockB}});
        const StepFunction f = StepFunction::make(
            1, {{0.5, CVec::Constant(1, cplx(0.4, 0.2))},
                {0.5, CVec::Constant(1, cplx(-0.3, 0.1))}});
        const StepFunction g = StepFunction::make(
            1, {{0.5, CVec::Constant(1, cplx(0.1, -0.5))},
                {0.5, CVec::Constant(1, cplx(0.2, 0.3))}});
        const CMat op = qs_integral_operator(F, slicing, 1.0);
        const CVec ef = sliced_exponential_vector(slicing, f);
        const CVec eg = sliced_exponential_vector(slicing, g);
        const CVec left = kron(CMat(u), CMat(ef)).col(0);
        const CVec right = kron(CMat(v), CMat(eg)).col(0);
        const cplx viaOperator = left.dot(op * right);
        const cplx exact = integral_element(F, f, g, u, v, 1.0);
        CHECK(std::abs(viaOperator - exact) <= 1e-6);
    }
}

TEST_CASE("cocycle elements") {
    Rng rng(4711);
    const Eigen::Index dK = 2, dh = 2;
    const CVec u = rng.vector(dh), v = rng.vector(dh);
    const StepFunction f = StepFunction::make(
        dK, {{0.7, 0.5 * rng.vector(dK)}, {0.8, 0.5 * rng.vector(dK)}});
    const StepFunction g = StepFunction::make(
        dK, {{0.4, 0.5 * rng.vector(dK)}, {0.9, 0.5 * rng.vector(dK)}});

    SUBCASE("zero generator reproduces the exponential inner product") {
        auto gen = zero_generator(dK, dh);
        for (double t : {0.0, 0.5, 1.1, 3.0}) {
            const cplx expected = u.dot(v) * std::exp(f.inner(g));
            CHECK(std::abs(cocycle_element(gen, f, g, u, v, t) - expected) <=
                  1e-13);
        }
    }

    SUBCASE("vacuum expectation semigroup e^{tK}") {
        auto gen = random_generator(rng, dK, dh);
        const StepFunction zero = StepFunction::zero(dK);
        for (double t : {0.3, 1.0, 1.9}) {
            const cplx expected = u.dot(expm(CMat(t * gen.timeBlock())) * v);
            CHECK(std::abs(cocycle_element(gen, zero, zero, u, v, t) - expected) <=
                  1e-12);
        }
    }

    SUBCASE("pure noise decays at the vacuum") {
        const CVec z = rng.vector(dK);
        auto gen = noise_generator(0.0, z, CMat::Identity(dK, dK));
        const StepFunction zero = StepFunction::zero(dK);
        const CVec one = CVec::Ones(1);
        for (double t : {0.2, 1.0, 2.0}) {
            const double expected = std::exp(-0.5 * t * z.squaredNorm());
            CHECK(std::abs(cocycle_element(gen, zero, zero, one, one, t) -
                           expected) <= 1e-12);
        }
    }

    SUBCASE("pure noise matches the analytic Weyl formula") {
        const CVec z = 0.8 * rng.vector(dK);
        const cplx us = rng.cgauss(), vs = rng.cgauss();
        const CVec uv = CVec::Constant(1, us), vv = CVec::Constant(1, vs);
        const double alpha = rng.gauss();

        auto plain = noise_generator(alpha, z, CMat::Identity(dK, dK));
        auto rotated = noise_generator(alpha, z, rng.unitary(dK));
        for (const auto& gen : {plain, rotated})
            for (double t : {0.35, 0.7, 1.4, 2.0}) {
                const cplx expected =
                    analytic_pure_noise(alpha, z, gen.W, us, vs, f, g, t);
                CHECK(std::abs(cocycle_element(gen, f, g, uv, vv, t) - expected) <=
                      1e-10);
            }
    }

    SUBCASE("propagator factorizes across a time split") {
        auto gen = random_generator(rng, dK, dh);
        const double r = 0.6, total = 1.5;
        auto ordered_product = [&](double a, double b) {
            std::vector<double> cuts{a, b};
            for (double s : f.breakpoints())
                if (s > a + 1e-12 && s < b - 1e-12) cuts.push_back(s);
            for (double s : g.breakpoints())
                if (s > a + 1e-12 && s < b - 1e-12) cuts.push_back(s);
            std::sort(cuts.begin(), cuts.end());
            CMat m = CMat::Identity(dh, dh);
            for (size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double mid = (cuts[i] + cuts[i + 1]) / 2.0;
                const CVec x = f.value(mid), y = g.value(mid);
                const CMat slot = slot_compression(gen.F, x, y, dh) +
                                  x.dot(y) * CMat::Identity(dh, dh);
                m = expm(CMat((cuts[i + 1] - cuts[i]) * slot)) * m;
            }
            return m;
        };
        const CMat whole = ordered_product(0.0, total);
        const CMat split = ordered_product(r, total) * ordered_product(0.0, r);
        CHECK(maxAbs(whole - split) <= 1e-13);
        const cplx viaElement = cocycle_element(gen, f, g, u, v, total);
        const cplx tail = std::exp(f.inner(g) - f.innerInterval(g, 0.0, total));
        CHECK(std::abs(viaElement - u.dot(split * v) * tail) <= 1e-13);
    }

    SUBCASE("adjoint symmetry for pure noise") {
        const CVec z = rng.vector(dK);
        const CMat w = rng.unitary(dK);
        auto gen = noise_generator(0.7, z, w);
        // The adjoint cocycle has generator (-H, -W*L, W*).
        auto adj = hp_generator(-gen.H, CMat(-gen.W.adjoint() * gen.L),
                                CMat(gen.W.adjoint()));
        const CVec uv = CVec::Constant(1, rng.cgauss());
        const CVec vv = CVec::Constant(1, rng.cgauss());
        StepFunction fs = f, gs = g;
        for (double t : {0.5, 1.3}) {
            const cplx forward = cocycle_element(gen, fs, gs, uv, vv, t);
            const cplx backward = cocycle_element(adj, gs, fs, vv, uv, t);
            CHECK(std::abs(std::conj(forward) - backward) <= 1e-12);
        }
    }
}

TEST_CASE("flow elements") {
    Rng rng(6021);
    const Eigen::Index dK = 2, dh = 2;
    const CVec u = rng.vector(dh), v = rng.vector(dh);
    const StepFunction f = StepFunction::make(
        dK, {{0.6, 0.6 * rng.vector(dK)}, {0.9, 0.6 * rng.vector(dK)}});
    const StepFunction g = StepFunction::make(
        dK, {{0.5, 0.6 * rng.vector(dK)}, {1.0, 0.6 * rng.vector(dK)}});

    SUBCASE("theta is unital and adjoint-symmetric") {
        auto gen = random_generator(rng, dK, dh);
        auto flow = flow_generator(gen);
        CHECK(flow.unitalResidual <= 1e-12);
        CHECK(flow.adjointResidual <= 1e-12);
        const CMat a = rng.matrix(dh, dh);
        CHECK(maxAbs(theta(gen, a) - flow.theta(a)) <= 1e-13);
        CHECK(maxAbs(theta(gen, a).adjoint() - theta(gen, CMat(a.adjoint()))) <=
              1e-12);
    }

    SUBCASE("infinitesimal element matches theta plus the Ito correction") {
        auto gen = random_generator(rng, dK, dh);
        const CMat a = rng.matrix(dh, dh);
        const CVec x = rng.vector(dK), y = rng.vector(dK);
        // d/dt at 0+ of <u eps(x 1_[0,t)), j_t(a) v eps(y 1_[0,t))>; the
        // subtracted value is the element at t = 0, where eps(...) = Omega.
        const double t = 1e-6;
        const StepFunction fx = constant_step(t, x), gy = constant_step(t, y);
        const cplx element = flow_element(gen, a, fx, gy, u, v, t);
        const cplx free = u.dot(a * v);

        CVec xh(1 + dK), yh(1 + dK);
        xh(0) = 1.0;
        xh.tail(dK) = x;
        yh(0) = 1.0;
        yh.tail(dK) = y;
        CMat deltaK = CMat::Zero(1 + dK, 1 + dK);
        deltaK.bottomRightCorner(dK, dK) = CMat::Identity(dK, dK);
        const CVec left = kron(CMat(xh), CMat(u)).col(0);
        const CVec right = kron(CMat(yh), CMat(v)).col(0);
        const cplx derivative =
            left.dot((theta(gen, a) + kron(deltaK, a)) * right);
        CHECK(std::abs((element - free) / t - derivative) <= 1e-4);
    }

    SUBCASE("unital at matrix-element level") {
        auto gaussian = random_generator(rng, dK, dh, true);
        auto general = random_generator(rng, dK, dh);
        for (const auto& gen : {gaussian, general})
            for (double t : {0.4, 1.2, 2.5}) {
                const cplx expected = u.dot(v) * std::exp(f.inner(g));
                CHECK(std::abs(flow_element(gen, CMat::Identity(dh, dh), f, g, u,
                                            v, t) -
                               expected) <= 1e-12);
            }
    }

    SUBCASE("vacuum flow is the Lindblad semigroup") {
        auto gen = random_generator(rng, dK, dh);
        const CMat super = direct_lindblad_superoperator(gen.H, gen.L);
        const StepFunction zero = StepFunction::zero(dK);
        const CMat a = rng.matrix(dh, dh);
        for (double t : {0.5, 1.0, 1.8}) {
            const CMat evolved = unvec(expm(CMat(t * super)) * vec(a), dh, dh);
            CHECK(std::abs(flow_element(gen, a, zero, zero, u, v, t) -
                           u.dot(evolved * v)) <= 1e-12);
        }
        auto flow = flow_generator(gen);
        CHECK(maxAbs(flow.lindbladSuperoperator() - super) <= 1e-13);
        CHECK(maxAbs(flow.slotSuperoperator(CVec::Zero(dK), CVec::Zero(dK)) -
                     super) <= 1e-13);
    }
}

TEST_CASE("noise products") {
    Rng rng(7321);
    const Eigen::Index dK = 2, dh = 2;

    SUBCASE("trivial noise leaves the generator unchanged") {
        auto gen = random_generator(rng, dK, dh);
        auto same = product_with_noise(
            gen, {0.0, CVec::Zero(dK), CMat::Identity(dK, dK)});
        CHECK(maxAbs(same.H - gen.H) <= 1e-14);
        CHECK(maxAbs(same.L - gen.L) <= 1e-14);
        CHECK(maxAbs(same.W - gen.W) <= 1e-14);
    }

    SUBCASE("perturbed generator keeps the structure relations") {
        auto gen = random_generator(rng, dK, dh);
        NoiseWitness noise{rng.gauss(), rng.vector(dK), rng.unitary(dK)};
        auto tilde = product_with_noise(gen, noise);
        CHECK(tilde.residual1 <= 1e-12);
        CHECK(tilde.residual2 <= 1e-12);

        // Block form of the product generator: (n (x) I) + F + (n (x) I) D F.
        CMat n(1 + dK, 1 + dK);
        n(0, 0) = cplx(0, noise.alpha) - 0.5 * noise.z.squaredNorm();
        n.block(0, 1, 1, dK) = -(noise.z.adjoint() * noise.w);
        n.block(1, 0, dK, 1) = noise.z;
        n.bottomRightCorner(dK, dK) = noise.w - CMat::Identity(dK, dK);
        const CMat nAmp = kron(n, CMat::Identity(dh, dh));
        const CMat expected =
            nAmp + gen.F + nAmp * ito_projection(dK, dh) * gen.F;
        CHECK(maxAbs(tilde.F - expected) <= 1e-13);

        // The flow map is unchanged by a pure-noise perturbation.
        const CMat a = rng.matrix(dh, dh);
        CHECK(maxAbs(theta(tilde, a) - theta(gen, a)) <= 1e-12);
    }

    SUBCASE("inverse data undoes the perturbation") {
        auto gen = random_generator(rng, dK, dh);
        NoiseWitness noise{rng.gauss(), rng.vector(dK), rng.unitary(dK)};
        auto tilde = product_with_noise(gen, noise);
        NoiseWitness inverse{-noise.alpha, CVec(-noise.w.adjoint() * noise.z),
                             CMat(noise.w.adjoint())};
        auto back = product_with_noise(tilde, inverse);
        CHECK(maxAbs(back.H - gen.H) <= 1e-12);
        CHECK(maxAbs(back.L - gen.L) <= 1e-12);
        CHECK(maxAbs(back.W - gen.W) <= 1e-12);
        auto witness = same_flow(gen, back);
        REQUIRE(witness.has_value());
        CHECK(std::abs(witness->alpha) <= 1e-12);
        CHECK(witness->z.norm() <= 1e-12);
        CHECK(maxAbs(witness->w - CMat::Identity(dK, dK)) <= 1e-12);
    }
}

TEST_CASE("flow equality decision") {
    Rng rng(8181);
    const Eigen::Index dK = 2, dh = 2;
    auto gen = random_generator(rng, dK, dh);

    SUBCASE("reflexive witness") {
        auto witness = same_flow(gen, gen);
        REQUIRE(witness.has_value());
        CHECK(std::abs(witness->alpha) <= 1e-14);
        CHECK(witness->z.norm() <= 1e-14);
        CHECK(maxAbs(witness->w - CMat::Identity(dK, dK)) <= 1e-14);
    }

    SUBCASE("recovers a noise perturbation and its inverse") {
        NoiseWitness noise{rng.gauss(), rng.vector(dK), rng.unitary(dK)};
        auto tilde = product_with_noise(gen, noise);
        auto witness = same_flow(gen, tilde);
        REQUIRE(witness.has_value());
        CHECK(std::abs(witness->alpha - noise.alpha) <= 1e-10);
        CHECK((witness->z - noise.z).norm() <= 1e-10);
        CHECK(maxAbs(witness->w - noise.w) <= 1e-10);

        auto reversed = same_flow(tilde, gen);
        REQUIRE(reversed.has_value());
        CHECK(std::abs(reversed->alpha + noise.alpha) <= 1e-10);
        CHECK((reversed->z + noise.w.adjoint() * noise.z).norm() <= 1e-10);
        CHECK(maxAbs(reversed->w - noise.w.adjoint()) <= 1e-10);
    }

    SUBCASE("distinct Lindblad semigroups yield no witness") {
        auto other = hp_generator(gen.H, CMat(1.3 * gen.L), gen.W);
        CHECK_FALSE(same_flow(gen, other).has_value());
        const CMat semiA = expm(direct_lindblad_superoperator(gen.H, gen.L));
        const CMat semiB = expm(direct_lindblad_superoperator(other.H, other.L));
        CHECK(maxAbs(semiA - semiB) > 1e-3);
    }
}

TEST_CASE("minimality of the dilation") {
    Rng rng(929);
    const Eigen::Index dK = 2, dh = 2;
    double sigma = -1.0;

    CHECK_FALSE(minimality_check(CMat::Zero(dK * dh, dh), 1e-8, &sigma));
    CHECK(sigma <= 1e-12);

    const CVec z0 = rng.vector(dK);
    CHECK_FALSE(minimality_check(kron(CMat(z0), CMat::Identity(dh, dh))));

    // A scalar slice combination also defeats minimality.
    CMat withIdentity(dK * dh, dh);
    withIdentity.topRows(dh) = CMat::Identity(dh, dh);
    withIdentity.bottomRows(dh) = rng.matrix(dh, dh);
    CHECK_FALSE(minimality_check(withIdentity));

    CHECK(minimality_check(rng.matrix(dK * dh, dh), 1e-8, &sigma));
    CHECK(sigma > 1e-8);
}

TEST_CASE("stochastic integral product identity") {
    const Eigen::Index dK = 1, dh = 2;
    SlicedFock slicing{FockSpace(1, 12), {0.5, 0.5}};
    Rng rng(1618);

    auto randomIntegrand = [&]() {
        return SimpleIntegrand::make(
            dK, dh, {{0.5, 0.5 * rng.matrix(4, 4)}, {0.5, 0.5 * rng.matrix(4, 4)}});
    };
    auto F = randomIntegrand();
    auto G = randomIntegrand();
    const StepFunction f = StepFunction::make(
        1, {{0.5, 0.5 * rng.vector(1)}, {0.5, 0.5 * rng.vector(1)}});
    const StepFunction g = StepFunction::make(
        1, {{0.5, 0.5 * rng.vector(1)}, {0.5, 0.5 * rng.vector(1)}});
    const CVec u = rng.vector(dh), v = rng.vector(dh);
    const double t = 1.0;

    // Truncated-Fock route.
    const CMat opF = qs_integral_operator(F, slicing, t);
    const CMat opG = qs_integral_operator(G, slicing, t);
    const CVec left =
        opF * kron(CMat(u), CMat(sliced_exponential_vector(slicing, f))).col(0);
    const CVec right =
        opG * kron(CMat(v), CMat(sliced_exponential_vector(slicing, g))).col(0);
    const cplx viaOperators = left.dot(right);

    // Exact route: the quantum Ito product formula. The first two integrands
    // are piecewise linear in s, so the trapezoid rule on each piece is exact;
    // the third is piecewise constant.
    const CMat deltaHat = ito_projection(dK, dh);
    auto hatted = [&](const CVec& x) {
        CVec xh(1 + dK);
        xh(0) = 1.0;
        xh.tail(dK) = x;
        return xh;
    };
    std::vector<double> cuts{0.0, 0.5, 1.0};
    cplx exact(0, 0);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double mid = (a + b) / 2.0;
        const CVec xf = f.value(mid), yg = g.value(mid);
        const CMat Fs = F.value(mid), Gs = G.value(mid);

        // Lambda(F)_s sits on the left of the first term, so swap arguments
        // and conjugate.
        const CVec w1 = slot_compression(Gs, xf, yg, dh) * v;
        const cplx term1 =
            0.5 * (b - a) *
            (std::conj(integral_element(F, g, f, w1, u, a)) +
             std::conj(integral_element(F, g, f, w1, u, b)));
        const CVec w2 = slot_compression(Fs, yg, xf, dh) * u;
        const cplx term2 = 0.5 * (b - a) *
                           (integral_element(G, f, g, w2, v, a) +
                            integral_element(G, f, g, w2, v, b));
        const CVec lf = Fs * kron(CMat(hatted(xf)), CMat(u)).col(0);
        const CVec rg = deltaHat * Gs * kron(CMat(hatted(yg)), CMat(v)).col(0);
        const cplx term3 = (b - a) * lf.dot(rg) * std::exp(f.inner(g));
        exact += term1 + term2 + term3;
    }
    CHECK(std::abs(viaOperators - exact) <= 1e-6);
}

TEST_CASE("qsc suite is green") {
    for (const auto& row : suite_report("qsc", 12345, 0.0)) {
        INFO(row.id << ": " << row.quantity << " residual " << row.residual
                    << " tol " << row.tol);
        CHECK(row.pass);
    }
}
