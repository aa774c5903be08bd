#pragma once

// The discrete map in Darboux coordinates and the induced map on the
// generators.
//
//   q_k(t+h) = V_A lambda_k + 2 V_B q_k - p_k,   p_k(t+h) = q_k
//
// Squaring and dotting the first line gives the closed generator update:
//
//   K'  = -K + A- V_A + 2 B- V_B - M
//   A+' = A-
//   A-' = M V_A + 2 A- V_B - A+
//   B+' = B-
//   B-' = M V_A^2 + 4 A- V_A V_B - 4 (K + M/2) V_B + 4 B- V_B^2 - 2 A+ V_A + B+
//   M'  = M

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "h6/potentials.hpp"

namespace h6 {

struct DivergenceError : std::runtime_error {
    std::size_t step;
    DivergenceError(const std::string& msg, std::size_t s) : std::runtime_error(msg), step(s) {}
};

inline constexpr double kDivergenceBound = 1e12;

inline PhasePoint step_with(const PhasePoint& x, const ModelContext& ctx, double va, double vb) {
    PhasePoint y{std::vector<double>(ctx.N()), x.q};
    for (std::size_t k = 0; k < ctx.N(); ++k) y.q[k] = va * ctx.lambda[k] + 2.0 * vb * x.q[k] - x.p[k];
    return y;
}

inline PhasePoint step_phase(const PhasePoint& x, const PotentialSpec& spec, const ModelContext& ctx) {
    const auto g = realize(x, ctx);
    PotentialValue v;
    try {
        v = eval_potential(spec, g);
    } catch (const DomainError& e) {
        std::string at = " at q = (";
        for (std::size_t k = 0; k < x.q.size(); ++k) at += (k ? ", " : "") + format_double(x.q[k]);
        throw DomainError(e.what() + at + ")");
    }
    return step_with(x, ctx, v.dA, v.dB);
}

inline GeneratorState step_generators_with(const GeneratorState& g, double va, double vb) {
    GeneratorState n;
    const double kh = g.K + g.M / 2;
    n.K = -g.K + g.Am * va + 2.0 * g.Bm * vb - g.M;
    n.Ap = g.Am;
    n.Am = g.M * va + 2.0 * g.Am * vb - g.Ap;
    n.Bp = g.Bm;
    n.Bm = g.M * va * va + 4.0 * g.Am * va * vb - 4.0 * kh * vb + 4.0 * g.Bm * vb * vb - 2.0 * g.Ap * va + g.Bp;
    n.M = g.M;
    return n;
}

inline GeneratorState step_generators(const GeneratorState& g, const PotentialSpec& spec) {
    const auto v = eval_potential(spec, g);
    return step_generators_with(g, v.dA, v.dB);
}

inline double max_abs_diff(const GeneratorState& a, const GeneratorState& b) {
    return std::max({std::abs(a.K - b.K), std::abs(a.Ap - b.Ap), std::abs(a.Am - b.Am), std::abs(a.Bp - b.Bp),
                     std::abs(a.Bm - b.Bm), std::abs(a.M - b.M)});
}

inline double max_abs(const GeneratorState& a) {
    return std::max({std::abs(a.K), std::abs(a.Ap), std::abs(a.Am), std::abs(a.Bp), std::abs(a.Bm), std::abs(a.M)});
}

struct ClosureResult {
    double discrepancy;  // infinity norm of the difference
    double scale;        // max(1, infinity norm of realize(step_phase(x)))
    double relative() const { return discrepancy / scale; }
};

inline ClosureResult closure_check(const PhasePoint& x, const PotentialSpec& spec, const ModelContext& ctx) {
    const auto via_phase = realize(step_phase(x, spec, ctx), ctx);
    const auto via_gens = step_generators(realize(x, ctx), spec);
    return {max_abs_diff(via_phase, via_gens), std::max(1.0, max_abs(via_phase))};
}

using RawGradient = std::function<std::vector<double>(const std::vector<double>&)>;

// Closure for a potential given only as a raw gradient in q. The generator
// route uses the least-squares coefficients of grad V on (lambda, 2q); they
// reproduce grad V exactly iff it lies in that span.
inline ClosureResult closure_check_raw(const PhasePoint& x, const RawGradient& grad, const ModelContext& ctx) {
    const auto gv = grad(x.q);
    PhasePoint y{std::vector<double>(ctx.N()), x.q};
    for (std::size_t k = 0; k < ctx.N(); ++k) y.q[k] = gv[k] - x.p[k];
    const auto via_phase = realize(y, ctx);

    std::vector<double> q2(ctx.N());
    for (std::size_t k = 0; k < ctx.N(); ++k) q2[k] = 2.0 * x.q[k];
    const double a11 = dot(ctx.lambda, ctx.lambda), a12 = dot(ctx.lambda, q2), a22 = dot(q2, q2);
    const double b1 = dot(ctx.lambda, gv), b2 = dot(q2, gv);
    const double det = a11 * a22 - a12 * a12;
    double va, vb;
    if (std::abs(det) > 1e-14 * a11 * std::max(a22, 1e-300)) {
        va = (b1 * a22 - b2 * a12) / det;
        vb = (a11 * b2 - a12 * b1) / det;
    } else {
        va = b1 / a11;
        vb = 0.0;
    }
    const auto via_gens = step_generators_with(realize(x, ctx), va, vb);
    return {max_abs_diff(via_phase, via_gens), std::max(1.0, max_abs(via_phase))};
}

using InvariantFn = std::function<double(const PhasePoint&)>;

struct TrajectoryEntry {
    std::size_t step;
    PhasePoint point;
    GeneratorState gens;
    std::vector<double> invariants;
};

struct Trajectory {
    std::vector<std::string> invariant_names;
    std::vector<TrajectoryEntry> entries;
};

inline bool finite_and_bounded(const PhasePoint& x) {
    for (const auto* v : {&x.q, &x.p})
        for (double c : *v)
            if (!std::isfinite(c) || std::abs(c) > kDivergenceBound) return false;
    return true;
}

inline Trajectory trajectory(const PhasePoint& x0, const PotentialSpec& spec, const ModelContext& ctx, std::size_t steps,
                             const std::vector<std::string>& names, const std::vector<InvariantFn>& invariants) {
    validate(x0, ctx);
    if (names.size() != invariants.size()) throw std::invalid_argument("invariant names and evaluators differ in length");
    Trajectory t{names, {}};
    t.entries.reserve(steps + 1);
    PhasePoint x = x0;
    for (std::size_t s = 0;; ++s) {
        if (!finite_and_bounded(x))
            throw DivergenceError("orbit left the finite region at step " + std::to_string(s), s);
        TrajectoryEntry e{s, x, realize(x, ctx), {}};
        for (const auto& f : invariants) e.invariants.push_back(f(x));
        t.entries.push_back(std::move(e));
        if (s == steps) break;
        x = step_phase(x, spec, ctx);
    }
    return t;
}

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(std::ostream& os, const Trajectory& t) {
    const std::size_t n = t.entries.empty() ? 0 : t.entries.front().point.q.size();
    os << "step";
    for (std::size_t k = 1; k <= n; ++k) os << ",q" << k;
    for (std::size_t k = 1; k <= n; ++k) os << ",p" << k;
    os << ",K,Ap,Am,Bp,Bm,M";
    for (const auto& name : t.invariant_names) os << "," << name;
    os << "\n";
    for (const auto& e : t.entries) {
        os << e.step;
        for (double v : e.point.q) os << "," << fmt17(v);
        for (double v : e.point.p) os << "," << fmt17(v);
        for (double v : {e.gens.K, e.gens.Ap, e.gens.Am, e.gens.Bp, e.gens.Bm, e.gens.M}) os << "," << fmt17(v);
        for (double v : e.invariants) os << "," << fmt17(v);
        os << "\n";
    }
}

}  // namespace h6
