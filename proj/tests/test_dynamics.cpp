#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "h6/dynamics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace h6;

namespace {

struct Case {
    std::string name;
    PotentialSpec spec;
};

std::vector<Case> classified() {
    return {{"V1", V1{0.3, 1.1}},
            {"V2I", V2I{0.7}},
            {"V2II", V2II{0.4, -0.2, 0.9}},
            {"V1s", V1s{parse_expr("sin(Y)/10 - Y^2/50")}},
            {"V2Is", V2Is{0.8, parse_expr("Y^3/5 - X*Y")}},
            {"V2IIs", V2IIs{0.6, 0.25, parse_expr("exp(Y/4) + X")}},
            {"dPIN", DPIN{0.9}}};
}

PhasePoint sample_for(std::mt19937_64& rng, const PotentialSpec& s, std::size_t n) {
    return sample_point(rng, n, needs_positive_bm(s));
}

Eigen::VectorXd flat(const PhasePoint& x) {
    const auto n = x.q.size();
    Eigen::VectorXd v(2 * n);
    for (std::size_t k = 0; k < n; ++k) v[k] = x.q[k], v[n + k] = x.p[k];
    return v;
}

PhasePoint swap(const PhasePoint& x) { return {x.p, x.q}; }

}  // namespace

TEST(Step, V1LinearExample) {
    std::mt19937_64 rng(1);
    const ModelContext ctx{default_lambda(3), 1};
    const auto x = test::random_point(rng, 3);
    const auto y = step_phase(x, V1{0, -2}, ctx);
    for (int k = 0; k < 3; ++k) {
        EXPECT_DOUBLE_EQ(y.q[k], 2 * x.q[k] - x.p[k]);
        EXPECT_EQ(y.p[k], x.q[k]);
    }
}

TEST(Step, V2IIOriginFixed) {
    const ModelContext ctx{default_lambda(4), 1};
    const PhasePoint o{std::vector<double>(4, 0.0), std::vector<double>(4, 0.0)};
    const auto y = step_phase(o, V2II{0.7, 0, 1.3}, ctx);
    EXPECT_EQ(y.q, o.q);
    EXPECT_EQ(y.p, o.p);
}

TEST(Step, DPINScalarOracle) {
    const ModelContext ctx{{1, 1}, 1};
    const auto y = step_phase(PhasePoint{{1, 0.5}, {0, 0}}, DPIN{1}, ctx);
    EXPECT_NEAR(y.q[0], oracle::dPIN_step_q[0], 1e-15);
    EXPECT_NEAR(y.q[1], oracle::dPIN_step_q[1], 1e-15);
}

TEST(Step, ExactV1Oracle) {
    const ModelContext ctx{test::doubles(oracle::lambda), 1};
    const PhasePoint x{test::doubles(oracle::q), test::doubles(oracle::p)};
    const auto y = step_phase(x, V1{0.5, 1}, ctx);
    const auto want = test::doubles(oracle::V1_step_q);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(y.q[k], want[k], 1e-15);
}

TEST(Step, DomainErrorReportsCoordinates) {
    const ModelContext ctx{{1, 1}, 1};
    try {
        step_phase(PhasePoint{{0, 0}, {1, 1}}, DPIN{1}, ctx);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("q = (0, 0)"), std::string::npos) << e.what();
    }
}

TEST(StepGenerators, MAndShiftsPreserved) {
    std::mt19937_64 rng(2);
    for (const auto& c : classified()) {
        const ModelContext ctx{default_lambda(3), 1};
        const auto g = realize(sample_for(rng, c.spec, 3), ctx);
        const auto n = step_generators(g, c.spec);
        EXPECT_EQ(n.M, g.M) << c.name;
        EXPECT_EQ(n.Ap, g.Am) << c.name;
        EXPECT_EQ(n.Bp, g.Bm) << c.name;
    }
}

TEST(Closure, CommutingDiagramAllFamilies) {
    std::mt19937_64 rng(3);
    for (const auto& c : classified())
        for (std::size_t n : {1u, 3u, 5u}) {
            const ModelContext ctx{default_lambda(n), 1};
            for (int i = 0; i < 20; ++i) EXPECT_LT(closure_check(sample_for(rng, c.spec, n), c.spec, ctx).relative(), 1e-10) << c.name;
        }
}

TEST(Closure, CustomValidForm) {
    std::mt19937_64 rng(4);
    const ModelContext ctx{default_lambda(4), 1};
    const auto s = make_custom("Am*Bm");
    for (int i = 0; i < 20; ++i) EXPECT_LT(closure_check(test::random_point(rng, 4), s, ctx).relative(), 1e-10);
}

TEST(Closure, RawFunctionOfFirstCoordinateBreaks) {
    std::mt19937_64 rng(5);
    const ModelContext ctx{default_lambda(4), 1};
    const RawGradient broken = [](const std::vector<double>& q) {
        std::vector<double> g(q.size(), 0.0);
        g[0] = 3 * q[0] * q[0];
        return g;
    };
    const RawGradient fine = [&](const std::vector<double>& q) {
        std::vector<double> g(q.size());
        for (std::size_t k = 0; k < q.size(); ++k) g[k] = 0.4 * ctx.lambda[k] - 1.2 * q[k];
        return g;
    };
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const auto x = test::random_point(rng, 4);
        worst = std::max(worst, closure_check_raw(x, broken, ctx).relative());
        EXPECT_LT(closure_check_raw(x, fine, ctx).relative(), 1e-12);
    }
    EXPECT_GT(worst, 1e-2);
}

TEST(Symplectic, FiniteDifferenceJacobian) {
    std::mt19937_64 rng(6);
    const std::size_t n = 3;
    const ModelContext ctx{default_lambda(n), 1};
    Eigen::MatrixXd Omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Omega.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    Omega.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    for (const auto& c : classified()) {
        for (int s = 0; s < 5; ++s) {
            const auto x = sample_for(rng, c.spec, n);
            Eigen::MatrixXd J(2 * n, 2 * n);
            const double d = 1e-6;
            for (std::size_t j = 0; j < 2 * n; ++j) {
                auto xp = x, xm = x;
                auto& cp = j < n ? xp.q[j] : xp.p[j - n];
                auto& cm = j < n ? xm.q[j] : xm.p[j - n];
                cp += d;
                cm -= d;
                J.col(j) = (flat(step_phase(xp, c.spec, ctx)) - flat(step_phase(xm, c.spec, ctx))) / (2 * d);
            }
            const Eigen::MatrixXd D = J.transpose() * Omega * J - Omega;
            EXPECT_LT(D.cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, J.cwiseAbs().maxCoeff() * J.cwiseAbs().maxCoeff())) << c.name;
        }
    }
}

TEST(TimeReversal, SwapStepSwapStepIsIdentity) {
    std::mt19937_64 rng(7);
    const ModelContext ctx{default_lambda(4), 1};
    for (const auto& c : classified())
        for (int s = 0; s < 10; ++s) {
            const auto x = sample_for(rng, c.spec, 4);
            const auto back = swap(step_phase(swap(step_phase(x, c.spec, ctx)), c.spec, ctx));
            for (int k = 0; k < 4; ++k) {
                EXPECT_NEAR(back.q[k], x.q[k], 1e-12) << c.name;
                EXPECT_NEAR(back.p[k], x.p[k], 1e-12) << c.name;
            }
        }
}

TEST(Trajectory, ZeroStepsSingleEntry) {
    const ModelContext ctx{default_lambda(2), 1};
    const auto t = trajectory(PhasePoint{{0.1, 0.2}, {0, 0}}, V1{0, 1}, ctx, 0, {}, {});
    ASSERT_EQ(t.entries.size(), 1u);
    EXPECT_EQ(t.entries[0].step, 0u);
}

TEST(Trajectory, EllipticV1StaysBounded) {
    const ModelContext ctx{default_lambda(3), 1};
    const auto t = trajectory(PhasePoint{{0.5, -0.3, 0.2}, {0.1, 0.4, -0.6}}, V1{0.5, 1.0}, ctx, 10000, {}, {});
    double worst = 0;
    for (const auto& e : t.entries)
        for (double v : e.point.q) worst = std::max(worst, std::abs(v));
    EXPECT_LT(worst, 10.0);
}

TEST(Trajectory, CasimirPreserved) {
    std::mt19937_64 rng(8);
    const ModelContext ctx{default_lambda(4), 1};
    const InvariantFn C = [&](const PhasePoint& x) { return casimir(realize(x, ctx)); };
    for (const auto& c : classified()) {
        const auto t = trajectory(sample_for(rng, c.spec, 4), c.spec, ctx, 20, {"C"}, {C});
        const double c0 = t.entries.front().invariants[0];
        for (const auto& e : t.entries) EXPECT_NEAR(e.invariants[0], c0, 1e-9 * std::max(1.0, std::abs(c0))) << c.name;
    }
}

TEST(Trajectory, HyperbolicDiverges) {
    const ModelContext ctx{default_lambda(2), 1};
    try {
        trajectory(PhasePoint{{0.1, 0.2}, {0, 0}}, V1{0, 3}, ctx, 100000, {}, {});
        FAIL();
    } catch (const DivergenceError& e) {
        EXPECT_GT(e.step, 10u);
        EXPECT_LT(e.step, 100u);
    }
}

TEST(Trajectory, CsvLayout) {
    const ModelContext ctx{default_lambda(2), 1};
    const InvariantFn one = [](const PhasePoint&) { return 1.0 / 3.0; };
    const auto t = trajectory(PhasePoint{{0.1, 0.2}, {0, 0}}, V1{0, 1}, ctx, 2, {"X"}, {one});
    std::ostringstream os;
    write_csv(os, t);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "step,q1,q2,p1,p2,K,Ap,Am,Bp,Bm,M,X");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_NE(line.find("0.33333333333333331"), std::string::npos);
    }
    EXPECT_EQ(rows, 3);
}
