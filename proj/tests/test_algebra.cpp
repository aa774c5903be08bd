#include <gtest/gtest.h>

#include <random>

#include "h6/algebra.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace h6;
using G = GeneratorId;

TEST(MultiPoly, CanonicalFormDropsZeros) {
    const auto& v = generator_vars();
    MultiPoly a = gen(G::K) + gen(G::Ap);
    a -= gen(G::Ap);
    EXPECT_EQ(a, gen(G::K));
    EXPECT_EQ(a.size(), 1u);
    EXPECT_TRUE((gen(G::K) - gen(G::K)).is_zero());
    EXPECT_EQ(MultiPoly::constant(v, 0).size(), 0u);
}

TEST(MultiPoly, GradedOrderIsDeterministic) {
    const MultiPoly p = gen(G::K) + gen(G::Ap) * gen(G::Ap) + Rational(3);
    EXPECT_EQ(p.to_string(), "Ap^2 + K + 3");
}

TEST(MultiPoly, RingMismatchRejected) {
    const auto a = MultiPoly::variable(phase_vars(1), 0);
    EXPECT_THROW(a + gen(G::K), std::invalid_argument);
}

TEST(MultiPoly, ComposeSubstitutes) {
    const auto v = phase_vars(1);
    const auto q = MultiPoly::variable(v, 0), p = MultiPoly::variable(v, 1);
    const MultiPoly f = gen(G::K) * gen(G::M);
    const auto r = f.compose({q, p, q, p, q, MultiPoly::constant(v, 2)});
    EXPECT_EQ(r, Rational(2) * q);
}

TEST(LiePoisson, TableExamples) {
    EXPECT_EQ(lie_poisson_bracket(gen(G::K), gen(G::Ap)), gen(G::Ap));
    EXPECT_TRUE(lie_poisson_bracket(gen(G::M), gen(G::Bp)).is_zero());
    EXPECT_EQ(lie_poisson_bracket(gen(G::Bm), gen(G::Bp)), Rational(4) * gen(G::K) + Rational(2) * gen(G::M));
    EXPECT_EQ(lie_poisson_bracket(gen(G::Am), gen(G::Ap)), gen(G::M));
    EXPECT_EQ(lie_poisson_bracket(gen(G::Ap), gen(G::Bm)), Rational(-2) * gen(G::Am));
}

TEST(LiePoisson, MIsCentral) {
    for (int i = 0; i < 6; ++i) EXPECT_TRUE(lie_poisson_bracket(gen(G::M), gen(static_cast<G>(i))).is_zero());
}

TEST(LiePoisson, RejectsForeignVariables) {
    const auto q = MultiPoly::variable(phase_vars(1), 0);
    EXPECT_THROW(lie_poisson_bracket(q, gen(G::K)), std::invalid_argument);
}

TEST(LiePoisson, AxiomsOnRandomTriples) {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        const auto f = test::random_generator_poly(rng, 3), g = test::random_generator_poly(rng, 3), h = test::random_generator_poly(rng, 2);
        EXPECT_EQ(lie_poisson_bracket(f, g), -lie_poisson_bracket(g, f));
        EXPECT_EQ(lie_poisson_bracket(f, g * h), lie_poisson_bracket(f, g) * h + g * lie_poisson_bracket(f, h));
        const auto jac = lie_poisson_bracket(f, lie_poisson_bracket(g, h)) + lie_poisson_bracket(g, lie_poisson_bracket(h, f)) +
                         lie_poisson_bracket(h, lie_poisson_bracket(f, g));
        EXPECT_TRUE(jac.is_zero());
    }
}

TEST(LiePoisson, CasimirIsCentral) {
    const auto C = casimir_polynomial();
    for (int i = 0; i < 6; ++i) EXPECT_TRUE(lie_poisson_bracket(C, gen(static_cast<G>(i))).is_zero()) << i;
}

TEST(Canonical, Examples) {
    const auto v = phase_vars(2);
    const auto q1 = MultiPoly::variable(v, "q1"), q2 = MultiPoly::variable(v, "q2"), p1 = MultiPoly::variable(v, "p1");
    EXPECT_EQ(canonical_bracket(q1, p1), MultiPoly::constant(v, 1));
    EXPECT_TRUE(canonical_bracket(q1, q2).is_zero());
    const std::vector<Rational> lam{Rational(1), Rational(1, 2)};
    const auto D = realization_images(lam);
    EXPECT_EQ(canonical_bracket(D[2], D[1]), MultiPoly::constant(v, Rational(5, 4)));
}

TEST(Canonical, MismatchRejected) {
    const auto a = MultiPoly::variable(phase_vars(1), 0), b = MultiPoly::variable(phase_vars(2), 0);
    EXPECT_THROW(canonical_bracket(a, b), std::invalid_argument);
    EXPECT_THROW(canonical_bracket(gen(G::K), gen(G::K)), std::invalid_argument);
}

TEST(Realize, Examples) {
    const auto g = realize(PhasePoint{{1}, {1}}, ModelContext{{1}, 1});
    EXPECT_DOUBLE_EQ(g.K, 0.5);
    EXPECT_DOUBLE_EQ(g.Ap, 1);
    EXPECT_DOUBLE_EQ(g.Am, 1);
    EXPECT_DOUBLE_EQ(g.Bp, 1);
    EXPECT_DOUBLE_EQ(g.Bm, 1);
    EXPECT_DOUBLE_EQ(g.M, 1);
    const auto z = realize(PhasePoint{{0, 0}, {0, 0}}, ModelContext{{1, 2}, 1});
    EXPECT_DOUBLE_EQ(z.K, -2.5);
    EXPECT_DOUBLE_EQ(z.M, 5);
    EXPECT_THROW(realize(PhasePoint{{0}, {0, 0}}, ModelContext{{1, 2}, 1}), std::invalid_argument);
}

TEST(Realize, ExactOracle) {
    const auto lam = test::rationals(oracle::lambda), q = test::rationals(oracle::q), p = test::rationals(oracle::p);
    const auto g = realize<Rational, Rational>(q, p, lam);
    EXPECT_EQ(g.K, Rational(oracle::K));
    EXPECT_EQ(g.Ap, Rational(oracle::Ap));
    EXPECT_EQ(g.Am, Rational(oracle::Am));
    EXPECT_EQ(g.Bp, Rational(oracle::Bp));
    EXPECT_EQ(g.Bm, Rational(oracle::Bm));
    EXPECT_EQ(g.M, Rational(oracle::M));
    EXPECT_EQ(casimir(g), Rational(oracle::C));
}

TEST(Realize, NaiveLoopsAgree) {
    std::mt19937_64 rng(3);
    const ModelContext ctx{default_lambda(3), 1};
    const auto x = test::random_point(rng, 3);
    const auto g = realize(x, ctx);
    double ap = 0, am = 0, bp = 0, bm = 0, qp = 0, m = 0;
    for (int k = 0; k < 3; ++k) {
        ap += ctx.lambda[k] * x.p[k];
        am += ctx.lambda[k] * x.q[k];
        bp += x.p[k] * x.p[k];
        bm += x.q[k] * x.q[k];
        qp += x.q[k] * x.p[k];
        m += ctx.lambda[k] * ctx.lambda[k];
    }
    EXPECT_NEAR(g.Ap, ap, 1e-15);
    EXPECT_NEAR(g.Am, am, 1e-15);
    EXPECT_NEAR(g.Bp, bp, 1e-15);
    EXPECT_NEAR(g.Bm, bm, 1e-15);
    EXPECT_NEAR(g.K, qp - m / 2, 1e-15);
}

TEST(Realize, PoissonMorphismOnQuadraticMonomials) {
    std::vector<MultiPoly> mons;
    for (int i = 0; i < 6; ++i) mons.push_back(gen(static_cast<G>(i)));
    for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) mons.push_back(gen(static_cast<G>(i)) * gen(static_cast<G>(j)));
    const std::vector<Rational> lam{Rational(1), Rational(-2, 3)};
    const auto D = realization_images(lam);
    for (std::size_t a = 0; a < mons.size(); a += 3)
        for (std::size_t b = 0; b < mons.size(); b += 2)
            EXPECT_EQ(canonical_bracket(mons[a].compose(D), mons[b].compose(D)), lie_poisson_bracket(mons[a], mons[b]).compose(D));
}

TEST(Casimir, TrivialForOneAndTwoBodies) {
    for (std::size_t n : {1u, 2u}) {
        std::vector<Rational> lam;
        for (std::size_t i = 0; i < n; ++i) lam.push_back(Rational(2 * i + 1, 3));
        EXPECT_TRUE(realize_poly(casimir_polynomial(), lam).is_zero());
    }
}

TEST(Casimir, LeftAndRightMatchTotal) {
    std::mt19937_64 rng(5);
    const ModelContext ctx{default_lambda(4), 1};
    const auto x = test::random_point(rng, 4);
    const double c = casimir(realize(x, ctx));
    EXPECT_NEAR(left_casimir(4, x, ctx), c, 1e-13);
    EXPECT_NEAR(right_casimir(4, x, ctx), c, 1e-13);
    EXPECT_EQ(left_casimir(2, x, ctx), 0.0);
    EXPECT_THROW(left_casimir(5, x, ctx), std::out_of_range);
    EXPECT_THROW(right_casimir(1, x, ctx), std::out_of_range);
}

TEST(Casimir, ThreeBodyEqualsLeftCasimir) {
    std::mt19937_64 rng(6);
    const ModelContext ctx{default_lambda(3), 1};
    const auto x = test::random_point(rng, 3);
    EXPECT_NEAR(casimir(realize(x, ctx)), left_casimir(3, x, ctx), 1e-13);
}

TEST(Casimir, TripleLoopOracle) {
    std::mt19937_64 rng(7);
    const ModelContext ctx{default_lambda(4), 1};
    const auto x = test::random_point(rng, 4);
    const auto& l = ctx.lambda;
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (int k = j + 1; k < 3; ++k) {
                const double t = l[i] * (x.p[j] * x.q[k] - x.p[k] * x.q[j]) + l[j] * (x.p[k] * x.q[i] - x.p[i] * x.q[k]) +
                                 l[k] * (x.p[i] * x.q[j] - x.p[j] * x.q[i]);
                s += t * t;
            }
    EXPECT_NEAR(left_casimir(3, x, ctx), s, 1e-15);
}

TEST(Casimir, Locality) {
    std::mt19937_64 rng(8);
    const std::size_t n = 5;
    const ModelContext ctx{default_lambda(n), 1};
    const auto x = test::random_point(rng, n);
    for (std::size_t m = 2; m <= n; ++m)
        for (std::size_t k = 0; k < n; ++k) {
            auto y = x;
            y.q[k] += 0.37;
            y.p[k] -= 0.21;
            if (k >= m) {
                EXPECT_EQ(left_casimir(m, y, ctx), left_casimir(m, x, ctx));
            }
            if (k < n - m) {
                EXPECT_EQ(right_casimir(m, y, ctx), right_casimir(m, x, ctx));
            }
        }
}
