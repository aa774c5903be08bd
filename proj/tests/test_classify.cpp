#include <gtest/gtest.h>

#include <random>

#include "h6/classify.hpp"
#include "subspace.hpp"
#include "support.hpp"

using namespace h6;

TEST(MnDet, TwoByTwo) {
    const Rational mu(3, 7), nu(-2, 5);
    const auto d = mn_det(2, mu, nu);
    EXPECT_EQ(d.closed_form, (mu - nu) * (mu + nu));
    EXPECT_EQ(d.elimination, d.closed_form);
}

TEST(MnDet, ThreeByThreeFromRankArgument) {
    const auto d = mn_det(3, -3, 1);
    EXPECT_EQ(d.closed_form, -16);
    EXPECT_EQ(d.elimination, -16);
}

TEST(MnDet, RoutesAgreeOnRandomRationals) {
    std::mt19937_64 rng(1);
    for (int n = 1; n <= 10; ++n)
        for (int t = 0; t < 10; ++t) {
            const auto d = mn_det(n, test::random_rational(rng), test::random_rational(rng));
            EXPECT_EQ(d.closed_form, d.elimination) << n;
        }
    const auto singular = mn_det(4, 2, 2);
    EXPECT_EQ(singular.closed_form, 0);
    EXPECT_EQ(singular.elimination, 0);
    EXPECT_THROW(mn_det_closed(0, 1, 1), std::invalid_argument);
}

TEST(CalM, RankAtDegeneratePoint) {
    for (std::size_t n = 3; n <= 8; ++n) {
        std::vector<double> q(n, 1.0), l(n, 0.0);
        l[0] = 1.0;
        EXPECT_EQ(numerical_rank(calM(q, l), 1e-10), static_cast<int>(n) - 2) << n;
    }
}

TEST(CalM, AnnihilatesLinearPotentialGradient) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto x = test::random_point(rng, 5);
        const auto l = test::random_point(rng, 5).q;
        const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(l.data(), 5);
        const Eigen::VectorXd r = calM(x.q, l) * g;
        EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, calM(x.q, l).cwiseAbs().maxCoeff()));
    }
}

TEST(CalM, RankBoundsAtRandomPoints) {
    std::mt19937_64 rng(3);
    for (std::size_t n = 3; n <= 8; ++n)
        for (int t = 0; t < 100; ++t) {
            const auto x = test::random_point(rng, n);
            const int r = numerical_rank(calM(x.q, x.p), 1e-10);
            EXPECT_GE(r, static_cast<int>(n) - 2);
            EXPECT_LE(r, static_cast<int>(n));
        }
}

TEST(Pde, LinearAndQuadraticRawPotentialsSolve) {
    std::mt19937_64 rng(4);
    const ModelContext ctx{default_lambda(4), 1};
    const auto lin = parse_expr("q1 + q2/2 + q3/3 + q4/4", raw_vars(4));
    const auto quad = parse_expr("q1^2 + q2^2 + q3^2 + q4^2", raw_vars(4));
    for (int t = 0; t < 10; ++t) {
        const auto q = test::random_point(rng, 4).q;
        EXPECT_LT(pde_residual(lin, q, ctx).relative(), 1e-10);
        EXPECT_LT(pde_residual(quad, q, ctx).relative(), 1e-10);
    }
}

TEST(Pde, CubicInFirstCoordinateFails) {
    const ModelContext ctx{{1, 2, 0.5}, 1};
    const auto r = pde_residual(parse_expr("q1^3", raw_vars(3)), {1, 1, -0.5}, ctx);
    EXPECT_GT(std::abs(r.nonlinear), 1e-3);
}

TEST(Pde, TwoBodySystemIsVacuous) {
    const ModelContext ctx{{1, 2}, 1};
    const auto r = pde_residual(parse_expr("q1^3", raw_vars(2)), {1, 1}, ctx);
    EXPECT_LT(std::abs(r.nonlinear), 1e-8);
}

TEST(Pde, ClassifiedFamiliesSolve) {
    std::mt19937_64 rng(5);
    const ModelContext ctx{default_lambda(5), 1};
    const std::vector<PotentialSpec> specs{V1{0.3, 1.1},
                                           V2I{0.7},
                                           V2II{0.4, -0.2, 0.9},
                                           V1s{parse_expr("sin(Y) + X*Y^2/10")},
                                           V2Is{0.8, parse_expr("Y^3/5 - X*Y")},
                                           V2IIs{0.6, 0.25, parse_expr("exp(Y/4) + X")},
                                           DPIN{0.9},
                                           make_custom("Am*Bm^2 + cos(Am)")};
    for (const auto& s : specs)
        for (int t = 0; t < 10; ++t)
            EXPECT_LT(pde_residual(s, sample_point(rng, 5, needs_positive_bm(s)), ctx).relative(), 1e-10) << family_name(s);
}

TEST(ClosureProbe, IdentityAndScaling) {
    std::mt19937_64 rng(6);
    const auto x = test::random_point(rng, 4);
    EXPECT_LT(closure_probe(Ell{EllVariant::Identity, 0.1, {}}, x.q, x.p), 1e-12);
    Ell twice{EllVariant::User, 0.1, parse_expr("2*X", {"X"})};
    EXPECT_LT(closure_probe(twice, x.q, x.p), 1e-12);
}

TEST(ClosureProbe, QuadraticBreaksClosure) {
    EXPECT_GT(closure_probe(Ell{EllVariant::Quadratic, 0.1, {}}, {0.7, -0.4, 0.5}, {0.3, 0.8, -0.6}), 1e-3);
}

TEST(ClosureProbe, NonInvertibleEll) {
    Ell flat{EllVariant::User, 0.1, parse_expr("X^2", {"X"})};
    EXPECT_THROW(closure_probe(flat, {0.0, 1.0}, {0.5, 0.5}), DomainError);
}

TEST(Search, LinearInvariantOfV1) {
    const ModelContext ctx{default_lambda(4), 1};
    const auto r = invariant_search(V1{1, 1}, 1, ctx, 40, 7);
    ASSERT_EQ(r.dimension(), 1u);
    const auto& v = r.nullspace[0];
    const std::vector<double> want{1, 1, 1, 1, 1};
    EXPECT_LT(test::direction_distance(v, want), 1e-8);
    EXPECT_LT(r.residuals[0], 1e-10);
}

TEST(Search, QuadraticPlaneOfV2II) {
    const ModelContext ctx{default_lambda(4), 1};
    const auto r = invariant_search(V2II{1, 1, 1}, 2, ctx, 60, 8);
    const double M = dot(ctx.lambda, ctx.lambda);
    // over (Bp, Bm, K, Ap*Am, Ap, Am, Ap^2, Am^2)
    const std::vector<double> a{M, M, M, -1, 0, 0, -1, -1};
    const std::vector<double> b{0, 0, 0, M + 1, M, M, 1, 1};
    EXPECT_GE(r.dimension(), 2u);
    EXPECT_LT(test::max_principal_angle(r.nullspace, {a, b}), 1e-6);
}

TEST(Search, I1sDirectionForV2I) {
    const ModelContext ctx{default_lambda(4), 1};
    const auto r = invariant_search(V2I{0}, 1, ctx, 40, 9);
    EXPECT_LT(test::max_principal_angle(r.nullspace, {{0, 1, -1, 0, 0}}), 1e-6);
}

TEST(Search, ScaleEquivariantDimension) {
    const ModelContext ctx{default_lambda(3), 1};
    for (double s : {0.5, 2.0}) {
        EXPECT_EQ(invariant_search(V1{s, s}, 1, ctx, 40, 10).dimension(), invariant_search(V1{1, 1}, 1, ctx, 40, 10).dimension());
        EXPECT_EQ(invariant_search(V2II{s, s, 1}, 2, ctx, 60, 10).dimension(), invariant_search(V2II{1, 1, 1}, 2, ctx, 60, 10).dimension());
    }
}

TEST(Search, ZeroPotentialWarns) {
    const ModelContext ctx{default_lambda(3), 1};
    const auto r = invariant_search(V1{0, 0}, 1, ctx, 40, 11);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Search, Preconditions) {
    const ModelContext ctx{default_lambda(3), 1};
    EXPECT_THROW(invariant_search(V1{1, 1}, 1, ctx, 10, 1), std::invalid_argument);
    EXPECT_THROW(invariant_search(V1{1, 1}, 3, ctx, 100, 1), std::invalid_argument);
}

TEST(Search, Deterministic) {
    const ModelContext ctx{default_lambda(3), 1};
    const auto a = invariant_search(V2II{0.5, 0.2, 0.3}, 2, ctx, 60, 12), b = invariant_search(V2II{0.5, 0.2, 0.3}, 2, ctx, 60, 12);
    EXPECT_EQ(a.singular_values, b.singular_values);
    EXPECT_EQ(a.nullspace, b.nullspace);
}
