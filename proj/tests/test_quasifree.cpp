#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qsw/fock.hpp"
#include "qsw/quasifree.hpp"
#include "qsw/suites.hpp"

#include <complex>
#include <vector>

using namespace qsw;

namespace {

SymplecticTriple random_triple(Rng& rng, Eigen::Index d, double pLo, double pHi) {
    CMat V = rng.unitary(d);
    CMat U = rng.unitary(d);
    CMat C = U * U.transpose();
    RVec diag(d);
    for (Eigen::Index i = 0; i < d; ++i) diag(i) = rng.uniform(pLo, pHi);
    CMat P = U * diag.cast<cplx>().asDiagonal() * U.adjoint();
    return {V, Conjugation{C}, P};
}

AWAmplitude random_amplitude(Rng& rng, Eigen::Index d, bool squeezed) {
    CMat A = rng.positive(d, 0.0, 0.9);
    if (!squeezed) return make_amplitude(A);
    return make_amplitude(A, random_triple(rng, d, 0.1, 0.8));
}

// Partial conjugate by its defining index swap, independent of the library.
CMat conj_oracle(const CMat& Y, Eigen::Index dk, Eigen::Index dh) {
    CMat out(dk * dh, dh);
    for (Eigen::Index i = 0; i < dk; ++i)
        for (Eigen::Index a = 0; a < dh; ++a)
            for (Eigen::Index c = 0; c < dh; ++c)
                out(i * dh + a, c) = std::conj(Y(i * dh + c, a));
    return out;
}

// Column pair [[Q, R*],[(R*)^c, Q^c]] whose Sigma image the squeeze preserves.
CMat column_pair(const QFIntegrand& G) {
    Eigen::Index n = G.dimK * G.dimh;
    CMat big(2 * n, 2 * G.dimh);
    big.topLeftCorner(n, G.dimh) = G.Q;
    big.topRightCorner(n, G.dimh) = G.R.adjoint();
    big.bottomLeftCorner(n, G.dimh) = G.Rstarc;
    big.bottomRightCorner(n, G.dimh) = G.Qc;
    return big;
}

CVec hat_vec(const CVec& x) {
    CVec out(x.size() + 1);
    out(0) = 1.0;
    out.tail(x.size()) = x;
    return out;
}

std::vector<double> merged_cuts(const StepFunction& f, const StepFunction& g, double t) {
    std::vector<double> cuts{0.0, t};
    for (double s : f.breakpoints())
        if (s < t) cuts.push_back(s);
    for (double s : g.breakpoints())
        if (s < t) cuts.push_back(s);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               cuts.end());
    return cuts;
}

StepFunction two_steps(Eigen::Index d, const CVec& v1, const CVec& v2) {
    return StepFunction::make(d, {{0.7, v1}, {0.6, v2}});
}

}  // namespace

TEST_CASE("quasifree generator assembly") {
    Rng rng(401);

    SUBCASE("zero data gives the zero generator") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.8));
        auto g = qf_generator(CMat::Zero(2, 2), CMat::Zero(4, 2), sigma);
        CHECK(maxAbs(g.K) == 0.0);
        CHECK(maxAbs(g.L) == 0.0);
        CHECK(maxAbs(g.blockMatrix()) == 0.0);
        CHECK(g.residual == 0.0);
    }

    SUBCASE("structure relation and creation block on random draws") {
        for (int trial = 0; trial < 12; ++trial) {
            auto sigma = random_amplitude(rng, 2, trial % 2 == 1);
            CMat H = rng.selfadjoint(2), Q = rng.matrix(4, 2);
            auto g = qf_generator(H, Q, sigma);
            CHECK(g.residual <= 1e-13);
            CHECK(maxAbs(g.K + g.K.adjoint() + g.L.adjoint() * g.L) <= 1e-13);
            CHECK(maxAbs(g.H() - H) <= 1e-13);

            CMat col(8, 2);
            col.topRows(4) = Q;
            col.bottomRows(4) = -conj_oracle(Q, 2, 2);
            CHECK(maxAbs(g.L - kron(sigma.sigmaBlocks, eye(2)) * col) <= 1e-14);
        }
    }

    SUBCASE("scalar pure-noise drift matches the doubled covariance") {
        CMat A = rng.positive(2, 0.1, 0.9);
        auto sigma = make_amplitude(A);
        CVec x = rng.vector(2);
        CMat H(1, 1);
        H << 0.37;
        auto g = qf_generator(H, x, sigma);
        cplx expected = cplx(0, 0.37) - 0.5 * x.dot(cosh_sa(CMat(2.0 * A)) * x);
        CHECK(std::abs(g.K(0, 0) - expected) <= 1e-13);

        CMat block(3, 3);
        block.setZero();
        block(0, 0) = g.K(0, 0);
        block.block(0, 1, 1, 2) = -x.adjoint();
        block.block(1, 0, 2, 1) = x;
        CHECK(maxAbs(g.blockMatrix() - block) <= 1e-14);
    }

    SUBCASE("checked path accepts assembled blocks and rejects broken ones") {
        auto sigma = random_amplitude(rng, 2, true);
        auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
        auto g2 = qf_generator_checked(g.K, g.Q, CMat(-g.Q.adjoint()), sigma);
        CHECK(maxAbs(g2.K - g.K) == 0.0);
        CHECK(g2.residual <= 1e-13);

        CMat badR = -g.Q.adjoint();
        badR(0, 0) += 0.1;
        CHECK_THROWS_AS(qf_generator_checked(g.K, g.Q, badR, sigma), std::invalid_argument);
        CMat badK = g.K + 0.1 * eye(2);
        CHECK_THROWS_AS(qf_generator_checked(badK, g.Q, CMat(-g.Q.adjoint()), sigma),
                        std::invalid_argument);
    }

    SUBCASE("input validation") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.8));
        CHECK_THROWS_AS(qf_generator(rng.matrix(2, 2), CMat::Zero(4, 2), sigma),
                        std::invalid_argument);
        CHECK_THROWS_AS(qf_generator(rng.selfadjoint(2), CMat::Zero(5, 2), sigma),
                        std::invalid_argument);
        CHECK_THROWS_AS(qf_generator(rng.selfadjoint(2), CMat::Zero(6, 2), sigma),
                        std::invalid_argument);
    }
}

TEST_CASE("lifting to the doubled noise space") {
    Rng rng(409);

    SUBCASE("zero gauge part produces the undoubled block layout") {
        auto sigma0 = make_amplitude(CMat::Zero(2, 2));
        CMat H = rng.selfadjoint(2), Q = rng.matrix(4, 2);
        auto g = qf_generator(H, Q, sigma0);
        auto F = sigma_lift(g);

        CMat expected = CMat::Zero(10, 10);
        expected.topLeftCorner(2, 2) = g.K;
        expected.block(0, 2, 2, 4) = -Q.adjoint();
        expected.block(2, 0, 4, 2) = Q;
        CHECK(maxAbs(F.F - expected) <= 1e-13);

        // Compressing to the first noise copy recovers the generator itself.
        CHECK(maxAbs(F.F.topLeftCorner(6, 6) - g.blockMatrix()) <= 1e-13);
    }

    SUBCASE("assembled lift agrees with the conjugated doubled matrix") {
        for (int trial = 0; trial < 10; ++trial) {
            auto sigma = random_amplitude(rng, 2, trial % 2 == 0);
            auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
            auto F = sigma_lift(g);
            CHECK(maxAbs(F.L - g.L) == 0.0);
            CHECK(F.gaussian());
            CHECK(F.residual1 <= 1e-12);
            CHECK(F.residual2 <= 1e-12);
            CHECK(maxAbs(F.F - sigma_lift_integrand(g.integrand(), sigma)) <= 1e-13);
        }
    }
}

TEST_CASE("recognizing quasifree generators") {
    Rng rng(419);

    SUBCASE("round trip through the lift") {
        for (int trial = 0; trial < 8; ++trial) {
            auto sigma = make_amplitude(rng.positive(2, 0.1, 0.9));
            auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
            auto q = recognize_quasifree(sigma_lift(g), sigma);
            REQUIRE(q.has_value());
            CHECK(maxAbs(*q - g.Q) <= 1e-12);
        }
    }

    SUBCASE("zero gauge part accepts exactly when the conjugate rows vanish") {
        auto sigma0 = make_amplitude(CMat::Zero(2, 2));
        CMat H = rng.selfadjoint(2), L1 = rng.matrix(4, 2);
        CMat L = CMat::Zero(8, 2);
        L.topRows(4) = L1;
        auto F = hp_generator(H, L, eye(8));
        auto q = recognize_quasifree(F, sigma0);
        REQUIRE(q.has_value());
        CHECK(maxAbs(*q - L1) <= 1e-14);

        CMat Lbad = L;
        Lbad.bottomRows(4) = 1e-3 * rng.matrix(4, 2);
        CHECK_FALSE(recognize_quasifree(hp_generator(H, Lbad, eye(8)), sigma0).has_value());
    }

    SUBCASE("perturbing the conjugate rows defeats recognition") {
        auto sigma = make_amplitude(rng.positive(2, 0.2, 0.8));
        auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
        CMat L = g.L;
        L.bottomRows(4) += 1e-3 * rng.matrix(4, 2);
        auto F = hp_generator(g.H(), L, eye(8));
        CHECK_FALSE(recognize_quasifree(F, sigma).has_value());
    }

    SUBCASE("commutator identity linking Q to the lifted creation block") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.9));
        auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
        for (int i = 0; i < 4; ++i) {
            CVec x = (i < 2) ? CVec(CVec::Unit(2, i)) : CVec(rng.vector(2));
            CMat lhsHalf = slice_bra(x, g.Q, 2);
            CMat lhs = lhsHalf - lhsHalf.adjoint();
            CVec z = sigma.sigmaBlocks * doubling(x);
            CMat rhsHalf = slice_bra(z, g.L, 2);
            CHECK(maxAbs(lhs - (rhsHalf - rhsHalf.adjoint())) <= 1e-12);
        }
    }

    SUBCASE("preconditions") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.9));
        auto squeezed = make_amplitude(rng.positive(2, 0.1, 0.9), random_triple(rng, 2, 0.2, 0.8));
        auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
        auto F = sigma_lift(g);
        CHECK_THROWS_AS(recognize_quasifree(F, squeezed), std::invalid_argument);

        auto notGaussian = hp_generator(rng.selfadjoint(2), rng.matrix(8, 2), rng.unitary(8));
        CHECK_THROWS_AS(recognize_quasifree(notGaussian, sigma), std::invalid_argument);

        auto odd = hp_generator(rng.selfadjoint(2), rng.matrix(6, 2), eye(6));
        CHECK_THROWS_AS(recognize_quasifree(odd, sigma), std::invalid_argument);
    }
}

TEST_CASE("change of variables under squeezing") {
    Rng rng(431);

    SUBCASE("identity squeeze leaves the data unchanged") {
        auto sigma = random_amplitude(rng, 2, true);
        auto G = qf_integrand(rng.matrix(2, 2), rng.matrix(4, 2), rng.matrix(2, 4));
        SymplecticTriple id{eye(2), Conjugation::entrywise(2), CMat::Zero(2, 2)};
        auto out = change_of_variables(G, sigma, id);
        CHECK(maxAbs(out.transformed.Q - G.Q) <= 1e-14);
        CHECK(maxAbs(out.transformed.R - G.R) <= 1e-14);
        CHECK(maxAbs(out.sigmaNew.sigmaBlocks - sigma.sigmaBlocks) <= 1e-14);
    }

    SUBCASE("the amplitude image of the column pair is preserved") {
        for (int trial = 0; trial < 10; ++trial) {
            auto sigma = random_amplitude(rng, 2, trial % 2 == 0);
            auto M = random_triple(rng, 2, 0.2, 1.0);
            auto G = qf_integrand(rng.matrix(2, 2), rng.matrix(4, 2), rng.matrix(2, 4));
            auto out = change_of_variables(G, sigma, M);

            CMat lhs = kron(out.sigmaNew.sigmaBlocks, eye(2)) * column_pair(out.transformed);
            CMat rhs = kron(sigma.sigmaBlocks, eye(2)) * column_pair(G);
            CHECK(maxAbs(lhs - rhs) <= 1e-12);

            // Equivalent form: the squeeze matrix undoes the transformation.
            CMat M2 = kron(squeezing_matrix(build_symplectic(M)), eye(2));
            CHECK(maxAbs(M2 * column_pair(out.transformed) - column_pair(G)) <= 1e-11);
        }
    }

    SUBCASE("transformed witnesses follow the conjugation rules") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.8));
        auto M = random_triple(rng, 2, 0.2, 0.9);
        auto G = qf_integrand(rng.matrix(2, 2), rng.matrix(4, 2), rng.matrix(2, 4));
        auto out = change_of_variables(G, sigma, M);
        CMat c = cosh_sa(M.P), s = sinh_sa(M.P);
        const CMat& V = M.V;
        const CMat& Cm = M.C.matrix;

        CMat rstarc = kron(CMat(c.conjugate() * V.transpose()), eye(2)) * G.Rstarc -
                      kron(CMat(s.conjugate() * Cm.conjugate() * V.adjoint()), eye(2)) * G.Q;
        CHECK(maxAbs(out.transformed.Rstarc - rstarc) <= 1e-13);

        CMat qc = kron(CMat(c.conjugate() * V.transpose()), eye(2)) * G.Qc -
                  kron(CMat(Cm.conjugate() * s * V.adjoint()), eye(2)) * CMat(G.R.adjoint());
        CHECK(maxAbs(out.transformed.Qc - qc) <= 1e-13);

        CMat rstar = kron(CMat(c * V.adjoint()), eye(2)) * CMat(G.R.adjoint()) -
                     kron(CMat(s * Cm * V.transpose()), eye(2)) * G.Qc;
        CHECK(maxAbs(out.transformed.R.adjoint() - rstar) <= 1e-13);
    }

    SUBCASE("generators stay generators and lift identically") {
        for (int trial = 0; trial < 6; ++trial) {
            auto sigma = random_amplitude(rng, 2, trial % 2 == 0);
            auto M = random_triple(rng, 2, 0.2, 1.0);
            auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
            auto out = change_of_variables(g.integrand(), sigma, M);
            CHECK(maxAbs(out.transformed.R + out.transformed.Q.adjoint()) <= 1e-13);
            auto gt = qf_generator_checked(g.K, out.transformed.Q, out.transformed.R,
                                           out.sigmaNew);
            CHECK(maxAbs(sigma_lift(gt).F - sigma_lift(g).F) <= 1e-12);
        }
    }

    SUBCASE("the inverse squeeze restores the data") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.8));
        auto M = random_triple(rng, 2, 0.2, 0.9);
        auto G = qf_integrand(rng.matrix(2, 2), rng.matrix(4, 2), rng.matrix(2, 4));
        auto out = change_of_variables(G, sigma, M);

        SymplecticTriple inv{CMat(M.V.adjoint()),
                             Conjugation{CMat(-M.V * M.C.matrix * M.V.transpose())},
                             CMat(M.V * M.P * M.V.adjoint())};
        auto back = change_of_variables(out.transformed, out.sigmaNew, inv);
        CHECK(maxAbs(back.transformed.Q - G.Q) <= 1e-10);
        CHECK(maxAbs(back.transformed.R - G.R) <= 1e-10);
        CHECK(maxAbs(back.sigmaNew.sigmaBlocks - sigma.sigmaBlocks) <= 1e-10);
    }
}

TEST_CASE("gauge-part uniqueness sets") {
    Rng rng(443);

    SUBCASE("trivial degeneracy forces a singleton") {
        CMat A0 = rng.positive(2, 0.1, 0.8);
        auto sigma = make_amplitude(A0);
        auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
        auto set = amplitude_set(sigma_lift(g), A0);
        CHECK(set.singleton());
        CHECK(set.degeneracyQ.cols() == 0);
        CHECK(set.contains(A0));
        CHECK_FALSE(set.contains(CMat(A0 + 0.05 * eye(2))));
    }

    SUBCASE("zero creation block admits every gauge part") {
        CMat A0 = rng.positive(2, 0.1, 0.8);
        auto sigma = make_amplitude(A0);
        auto g = qf_generator(rng.selfadjoint(2), CMat::Zero(4, 2), sigma);
        auto set = amplitude_set(sigma_lift(g), A0);
        CHECK(set.degeneracyL1.cols() == 2);
        CHECK(set.degeneracyQ.cols() == 2);
        CHECK(set.contains(rng.positive(2, 0.0, 1.2)));
        CHECK_FALSE(set.contains(CMat(-0.5 * eye(2))));
        CHECK_FALSE(set.contains(rng.matrix(2, 2)));
    }

    SUBCASE("one-dimensional degeneracy admits exactly the matching shifts") {
        CMat B = rng.matrix(2, 2);
        CMat Q = kron(CVec(CVec::Unit(2, 0)), B);
        CMat A0 = CMat::Zero(2, 2);
        A0(0, 0) = 0.6;
        A0(1, 1) = 0.3;
        auto sigma = make_amplitude(A0);
        auto g = qf_generator(rng.selfadjoint(2), Q, sigma);
        auto F = sigma_lift(g);
        auto set = amplitude_set(F, A0);
        REQUIRE(set.degeneracyL1.cols() == 1);
        CHECK(std::abs(std::abs(set.degeneracyL1(1, 0)) - 1.0) <= 1e-10);
        CHECK(set.degeneracyQ.cols() == 1);

        // Shift tanh along the degenerate direction and re-verify directly.
        CMat At = A0;
        At(1, 1) = std::atanh(std::tanh(0.3) + 0.2);
        CHECK(set.contains(At));
        CHECK(recognize_quasifree(F, make_amplitude(At)).has_value());

        CMat Abad = A0;
        Abad(0, 0) = std::atanh(std::tanh(0.6) + 0.2);
        CHECK_FALSE(set.contains(Abad));
        CHECK_FALSE(recognize_quasifree(F, make_amplitude(Abad)).has_value());
    }

    SUBCASE("rejects generators that are not quasifree for the gauge part") {
        CMat A0 = rng.positive(2, 0.2, 0.8);
        CMat L = rng.matrix(8, 2);
        auto F = hp_generator(rng.selfadjoint(2), L, eye(8));
        CHECK_THROWS_AS(amplitude_set(F, A0), std::invalid_argument);
    }
}

TEST_CASE("flow equality witnesses over a fixed amplitude") {
    Rng rng(457);
    auto sigma = make_amplitude(rng.positive(2, 0.1, 0.8));
    auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);

    SUBCASE("a generator matches itself with the zero witness") {
        auto wit = same_flow_qf(g, g);
        REQUIRE(wit.has_value());
        CHECK(wit->x.norm() <= 1e-14);
        CHECK(std::abs(wit->alpha) <= 1e-14);
    }

    SUBCASE("drift and creation shifts are recovered") {
        CVec x = rng.vector(2);
        const double alpha = -0.83;
        CMat Q2 = g.Q + kron(x, eye(2));
        CMat cross = slice_bra(x, g.Q, 2);
        CMat H2 = g.H() + cplx(0, 0.5) * (cross - cross.adjoint()) + alpha * eye(2);
        auto g2 = qf_generator(H2, Q2, sigma);

        auto wit = same_flow_qf(g, g2);
        REQUIRE(wit.has_value());
        CHECK((wit->x - x).norm() <= 1e-10);
        CHECK(std::abs(wit->alpha - alpha) <= 1e-10);

        // The lifted generators admit the corresponding pure-noise witness.
        auto lifted = same_flow(sigma_lift(g), sigma_lift(g2));
        REQUIRE(lifted.has_value());
        CHECK(maxAbs(lifted->w - eye(4)) <= 1e-8);
        CHECK((lifted->z - sigma.sigmaBlocks * doubling(x)).norm() <= 1e-8);
        CHECK(std::abs(lifted->alpha - alpha) <= 1e-8);
    }

    SUBCASE("non-scalar perturbations are rejected") {
        CMat Q2 = g.Q;
        Q2(0, 1) += 0.3;
        Q2(2, 0) -= 0.2;
        auto g2 = qf_generator(g.H(), Q2, sigma);
        CHECK_FALSE(same_flow_qf(g, g2).has_value());
    }

    SUBCASE("amplitude mismatch is a precondition failure") {
        auto other = make_amplitude(rng.positive(2, 0.3, 1.0));
        auto g2 = qf_generator(g.H(), g.Q, other);
        CHECK_THROWS_AS(same_flow_qf(g, g2), std::invalid_argument);
    }
}

TEST_CASE("flow generator integrand") {
    Rng rng(461);

    SUBCASE("the lift of psi is theta of the lifted generator") {
        for (int trial = 0; trial < 8; ++trial) {
            auto sigma = random_amplitude(rng, 2, trial % 2 == 0);
            auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
            CMat a = rng.matrix(2, 2);
            auto psi = qf_flow_psi(g, a);
            CHECK(maxAbs(sigma_lift_integrand(psi, sigma) - theta(sigma_lift(g), a)) <= 1e-12);
        }
    }

    SUBCASE("unital and adjoint behaviour") {
        auto sigma = make_amplitude(rng.positive(2, 0.1, 0.8));
        auto g = qf_generator(rng.selfadjoint(2), rng.matrix(4, 2), sigma);
        CHECK(maxAbs(qf_flow_psi(g, eye(2)).blockMatrix()) <= 1e-13);

        CMat a = rng.matrix(2, 2);
        auto psi = qf_flow_psi(g, a);
        auto psiStar = qf_flow_psi(g, CMat(a.adjoint()));
        CHECK(maxAbs(CMat(psi.R.adjoint()) - psiStar.Q) <= 1e-13);
        CHECK(maxAbs(CMat(psi.K.adjoint()) - psiStar.K) <= 1e-13);
    }
}

TEST_CASE("matrix elements of lifted integrals") {
    Rng rng(467);

    SUBCASE("direct evaluation through the conjugated test values") {
        for (int trial = 0; trial < 4; ++trial) {
            auto sigma = random_amplitude(rng, 1, trial % 2 == 1);
            auto G = qf_integrand(rng.matrix(2, 2), rng.matrix(2, 2), rng.matrix(2, 2));
            CMat lifted = sigma_lift_integrand(G, sigma);
            auto F = SimpleIntegrand::make(2, 2, {{1.5, lifted}});

            StepFunction f = two_steps(2, rng.vector(2), rng.vector(2));
            StepFunction gf = two_steps(2, rng.vector(2), rng.vector(2));
            CVec u = rng.vector(2), v = rng.vector(2);
            const double t = 0.9;

            cplx lhs = integral_element(F, f, gf, u, v, t);

            CMat sigmaAdj = sigma.sigmaBlocks.adjoint();
            cplx sum = 0.0;
            auto cuts = merged_cuts(f, gf, t);
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                double mid = 0.5 * (cuts[j] + cuts[j + 1]);
                CVec xu = kron(hat_vec(sigmaAdj * f.value(mid)), u);
                CVec yv = kron(hat_vec(sigmaAdj * gf.value(mid)), v);
                sum += (cuts[j + 1] - cuts[j]) * xu.dot(G.doubled() * yv);
            }
            cplx rhs = std::exp(f.inner(gf)) * sum;
            CHECK(std::abs(lhs - rhs) <= 1e-10);
        }
    }

    SUBCASE("compression onto the kernel of the gauge part") {
        CMat A = CMat::Zero(2, 2);
        A(1, 1) = 0.7;
        auto sigma = make_amplitude(A);
        auto G = qf_integrand(rng.matrix(2, 2), rng.matrix(4, 2), rng.matrix(2, 4));
        auto F4 = SimpleIntegrand::make(4, 2, {{1.5, sigma_lift_integrand(G, sigma)}});

        // The kernel direction is the first noise coordinate; the compressed
        // integrand keeps the matching row and column blocks only.
        CMat G0 = CMat::Zero(4, 4);
        G0.topLeftCorner(2, 2) = G.K;
        G0.topRightCorner(2, 2) = G.R.leftCols(2);
        G0.bottomLeftCorner(2, 2) = G.Q.topRows(2);
        auto F1 = SimpleIntegrand::make(1, 2, {{1.5, G0}});

        cplx z1 = rng.cgauss(), z2 = rng.cgauss(), w1 = rng.cgauss(), w2 = rng.cgauss();
        CVec e0 = CVec::Unit(4, 0);
        StepFunction fWide = two_steps(4, CVec(z1 * e0), CVec(z2 * e0));
        StepFunction gWide = two_steps(4, CVec(w1 * e0), CVec(w2 * e0));
        CVec s1(1), s2(1), r1(1), r2(1);
        s1 << z1;
        s2 << z2;
        r1 << w1;
        r2 << w2;
        StepFunction fThin = two_steps(1, s1, s2);
        StepFunction gThin = two_steps(1, r1, r2);

        CVec u = rng.vector(2), v = rng.vector(2);
        for (double t : {0.5, 1.1}) {
            cplx wide = integral_element(F4, fWide, gWide, u, v, t);
            cplx thin = integral_element(F1, fThin, gThin, u, v, t);
            CHECK(std::abs(wide - thin) <= 1e-10);
        }
    }
}

TEST_CASE("the doubling map of a squeezed amplitude has trivial kernel") {
    Rng rng(479);
    const Eigen::Index dk = 2, dh = 2;
    for (int trial = 0; trial < 4; ++trial) {
        auto sigma = make_amplitude(rng.positive(dk, 0.0, 0.8),
                                    random_triple(rng, dk, 0.2, 1.0));
        const Eigen::Index n = dk * dh * dh;
        RMat realified(4 * n, 2 * n);
        Eigen::Index colIdx = 0;
        for (Eigen::Index col = 0; col < dk * dh * dh; ++col)
            for (cplx phase : {cplx(1, 0), cplx(0, 1)}) {
                CMat D = CMat::Zero(dk * dh, dh);
                D(col % (dk * dh), col / (dk * dh)) = phase;
                CMat stacked(2 * dk * dh, dh);
                stacked.topRows(dk * dh) = D;
                stacked.bottomRows(dk * dh) = partial_conjugate(D, dk, dh, dh).Yc;
                CVec img = vec(CMat(kron(sigma.sigmaBlocks, eye(dh)) * stacked));
                realified.col(colIdx).head(2 * n) = img.real();
                realified.col(colIdx).tail(2 * n) = img.imag();
                ++colIdx;
            }
        CHECK(smallest_singular_value(realified.cast<cplx>()) >
              1e-10 * opnorm(sigma.sigmaBlocks));
    }
}

TEST_CASE("quasifree invariant suite stays green") {
    auto rows = suite_report("quasifree", 5150, 0.0);
    CHECK(!rows.empty());
    for (const auto& row : rows) {
        INFO(row.id << ": " << row.quantity << " residual " << row.residual
                    << " tol " << row.tol);
        CHECK(row.pass);
    }
}
