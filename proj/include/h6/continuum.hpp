#pragma once

// Continuum limit of the discrete maps.
//
// Under the scalings below every family's map becomes the two-step scheme
// q(t+h) - 2q(t) + q(t-h) = h^2 a(q(t)), whose limit is Q'' = a(Q):
//
//   V1     kappa~ = w^2h^2-2, a+ = g h^2            a = -w^2 Q - g lambda
//   V2I    kappa  = w^2h^2-2                        a = -w^2 Q + w^2 (l.Q) lambda / M
//   V2II   kappa  = w^2h^2-2, zeta = g h^2, eta = d h^2
//                                                   a = -w^2 Q - lambda (g + d l.Q)
//   V1s    F = h^2 f                                a = 2 f_Y (M Q - (l.Q) lambda)
//   V2Is   alpha = w^2h^2-2, G = h^2 g              a = -w^2 Q + g_Y(M, l.Q) lambda
//   V2IIs  alpha = w^2h^2-2, a+ = g h^2, F = h^2 f  a = -w^2 Q - (g/M) lambda + 2 f_Y (M Q - (l.Q) lambda)
//
// with M = lambda^2 and Y = M Q^2 - (l.Q)^2 inside f.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "h6/invariants.hpp"

namespace h6 {

enum class Family { V1, V2I, V2II, V1s, V2Is, V2IIs };

inline Family parse_family(const std::string& s) {
    static const std::pair<const char*, Family> all[] = {{"V1", Family::V1},   {"V2I", Family::V2I},   {"V2II", Family::V2II},
                                                         {"V1s", Family::V1s}, {"V2Is", Family::V2Is}, {"V2IIs", Family::V2IIs}};
    for (const auto& [n, f] : all)
        if (s == n) return f;
    throw std::invalid_argument("no continuum scaling for family '" + s + "'");
}

inline std::string family_label(Family f) {
    static const char* n[] = {"V1", "V2I", "V2II", "V1s", "V2Is", "V2IIs"};
    return n[static_cast<int>(f)];
}

struct ScalingRule {
    Family family = Family::V1;
    double omega = 1.0, gamma = 0.0, delta = 0.0;
    ExprTree f, g;  // in X (= lambda^2) and Y
};

inline PotentialSpec scaled_spec(const ScalingRule& r, double h) {
    if (!(h > 0)) throw std::invalid_argument("scaled_spec: h must be positive");
    const double h2 = h * h, k = r.omega * r.omega * h2 - 2.0;
    switch (r.family) {
    case Family::V1: return V1{r.gamma * h2, k};
    case Family::V2I: return V2I{k};
    case Family::V2II: return V2II{r.delta * h2, r.gamma * h2, k};
    case Family::V1s: return V1s{r.f.scaled(h2)};
    case Family::V2Is: return V2Is{k, r.g.scaled(h2)};
    case Family::V2IIs: return V2IIs{k, r.gamma * h2, r.f.scaled(h2)};
    }
    throw std::logic_error("unreachable");
}

using Vec = std::vector<double>;

inline double y_partial(const ExprTree& e, double x, double y) { return e.eval(std::vector<Dual2>{Dual2(x), Dual2(y, 0.0, 1.0)}).dy; }

inline Vec acceleration(const ScalingRule& r, const Vec& lambda, const Vec& Q) {
    const std::size_t n = Q.size();
    const double M = dot(lambda, lambda), lq = dot(lambda, Q), w2 = r.omega * r.omega;
    Vec a(n, 0.0);
    auto add_harmonic = [&] {
        for (std::size_t k = 0; k < n; ++k) a[k] -= w2 * Q[k];
    };
    auto add_f = [&] {
        const double fy = y_partial(r.f, M, M * dot(Q, Q) - lq * lq);
        for (std::size_t k = 0; k < n; ++k) a[k] += 2.0 * fy * (M * Q[k] - lq * lambda[k]);
    };
    switch (r.family) {
    case Family::V1:
        add_harmonic();
        for (std::size_t k = 0; k < n; ++k) a[k] -= r.gamma * lambda[k];
        break;
    case Family::V2I:
        add_harmonic();
        for (std::size_t k = 0; k < n; ++k) a[k] += w2 * lq * lambda[k] / M;
        break;
    case Family::V2II:
        add_harmonic();
        for (std::size_t k = 0; k < n; ++k) a[k] -= lambda[k] * (r.gamma + r.delta * lq);
        break;
    case Family::V1s: add_f(); break;
    case Family::V2Is: {
        add_harmonic();
        const double gy = y_partial(r.g, M, lq);
        for (std::size_t k = 0; k < n; ++k) a[k] += gy * lambda[k];
        break;
    }
    case Family::V2IIs:
        add_harmonic();
        for (std::size_t k = 0; k < n; ++k) a[k] -= r.gamma / M * lambda[k];
        add_f();
        break;
    }
    return a;
}

inline double hamiltonian_eval(const ScalingRule& r, const Vec& lambda, const Vec& Q, const Vec& P) {
    const double M = dot(lambda, lambda), lq = dot(lambda, Q), w2 = r.omega * r.omega;
    const double kin = 0.5 * dot(P, P), osc = 0.5 * w2 * dot(Q, Q);
    const double Y = M * dot(Q, Q) - lq * lq;
    switch (r.family) {
    case Family::V1: return kin + osc + r.gamma * lq;
    case Family::V2I: return kin + osc - w2 * lq * lq / (2.0 * M);
    case Family::V2II: return kin + osc + r.gamma * lq + 0.5 * r.delta * lq * lq;
    case Family::V1s: return kin - r.f.eval(Vec{M, Y});
    case Family::V2Is: return kin + osc - r.g.eval(Vec{M, lq});
    case Family::V2IIs: return kin + osc + r.gamma * lq / M - r.f.eval(Vec{M, Y});
    }
    throw std::logic_error("unreachable");
}

// Force of H = P^2/2 + d1 Q^2 + F(lambda^2, Y) + G(lambda^2, lambda.Q) with
// the identifications d1 = 0|w^2/2, F = -f, G = -g | gamma Y / X.
inline Vec blasco_force(const ScalingRule& r, const Vec& lambda, const Vec& Q) {
    const std::size_t n = Q.size();
    const double M = dot(lambda, lambda), lq = dot(lambda, Q), w2 = r.omega * r.omega;
    double d1 = 0.0;
    std::optional<ExprTree> F, G;
    switch (r.family) {
    case Family::V1s: F = r.f.scaled(-1.0); break;
    case Family::V2Is:
        d1 = w2 / 2;
        G = r.g.scaled(-1.0);
        break;
    case Family::V2IIs:
        d1 = w2 / 2;
        F = r.f.scaled(-1.0);
        G = parse_expr(format_double(r.gamma) + "*Y/X");
        break;
    default: throw std::invalid_argument("blasco_force: singular families only");
    }
    const double fy = F ? y_partial(*F, M, M * dot(Q, Q) - lq * lq) : 0.0;
    const double gy = G ? y_partial(*G, M, lq) : 0.0;
    Vec out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = -2.0 * d1 * Q[k] - fy * 2.0 * (M * Q[k] - lq * lambda[k]) - gy * lambda[k];
    return out;
}

struct State {
    Vec Q, P;
};

inline State rk4_step(const ScalingRule& r, const Vec& lambda, const State& s, double dt) {
    const std::size_t n = s.Q.size();
    auto axpy = [&](const Vec& x, const Vec& y, double c) {
        Vec z(n);
        for (std::size_t k = 0; k < n; ++k) z[k] = x[k] + c * y[k];
        return z;
    };
    const Vec k1q = s.P, k1p = acceleration(r, lambda, s.Q);
    const Vec q2 = axpy(s.Q, k1q, dt / 2), p2 = axpy(s.P, k1p, dt / 2);
    const Vec k2q = p2, k2p = acceleration(r, lambda, q2);
    const Vec q3 = axpy(s.Q, k2q, dt / 2), p3 = axpy(s.P, k2p, dt / 2);
    const Vec k3q = p3, k3p = acceleration(r, lambda, q3);
    const Vec q4 = axpy(s.Q, k3q, dt), p4 = axpy(s.P, k3p, dt);
    const Vec k4q = p4, k4p = acceleration(r, lambda, q4);
    State o{Vec(n), Vec(n)};
    for (std::size_t k = 0; k < n; ++k) {
        o.Q[k] = s.Q[k] + dt / 6 * (k1q[k] + 2 * k2q[k] + 2 * k3q[k] + k4q[k]);
        o.P[k] = s.P[k] + dt / 6 * (k1p[k] + 2 * k2p[k] + 2 * k3p[k] + k4p[k]);
        if (!std::isfinite(o.Q[k]) || !std::isfinite(o.P[k])) throw DivergenceError("reference solution became non-finite", 0);
    }
    return o;
}

// Samples at t = n*h, n = 0..steps, each interval split into `substeps`
// classical order-4 steps. Negative h integrates backwards.
inline std::vector<State> reference_solve(const ScalingRule& r, const Vec& lambda, const State& s0, double h, std::size_t steps,
                                          std::size_t substeps) {
    if (substeps == 0) throw std::invalid_argument("reference_solve: substeps must be positive");
    std::vector<State> out{s0};
    State s = s0;
    const double dt = h / static_cast<double>(substeps);
    for (std::size_t i = 0; i < steps; ++i) {
        for (std::size_t j = 0; j < substeps; ++j) s = rk4_step(r, lambda, s, dt);
        out.push_back(s);
    }
    return out;
}

// Reference step no larger than h^2.
inline std::size_t substeps_for(double h) { return static_cast<std::size_t>(std::ceil(std::abs(h) / (h * h) - 1e-9)); }

inline double loglog_slope(const Vec& h, const Vec& e) {
    const std::size_t n = h.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(e[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline void check_h_list(const Vec& hs) {
    if (hs.size() < 4) throw std::invalid_argument("h-list needs at least 4 values");
    for (double h : hs)
        if (!(h > 0)) throw std::invalid_argument("h values must be positive");
}

struct ConvergenceResult {
    Vec h, max_err;
    double slope;
};

inline ConvergenceResult convergence_order(const ScalingRule& r, const Vec& lambda, const Vec& Q0, const Vec& P0, double T, const Vec& hs) {
    check_h_list(hs);
    ConvergenceResult res{hs, {}, 0.0};
    const ModelContext base{lambda, 1.0};
    for (double h : hs) {
        const auto steps = static_cast<std::size_t>(std::llround(T / h));
        const std::size_t sub = substeps_for(h);
        const auto ref = reference_solve(r, lambda, {Q0, P0}, h, steps, sub);
        const auto back = reference_solve(r, lambda, {Q0, P0}, -h, 1, sub);
        const auto spec = scaled_spec(r, h);
        ModelContext ctx = base;
        ctx.h = h;
        PhasePoint x{Q0, back.back().Q};
        double err = 0.0;
        for (std::size_t n = 1; n <= steps; ++n) {
            x = step_phase(x, spec, ctx);
            if (!finite_and_bounded(x)) throw DivergenceError("discrete orbit diverged", n);
            for (std::size_t k = 0; k < Q0.size(); ++k) err = std::max(err, std::abs(x.q[k] - ref[n].Q[k]));
        }
        res.max_err.push_back(err);
    }
    res.slope = loglog_slope(res.h, res.max_err);
    return res;
}

// Expected expansion I(h) = c + h^power * limit + ..., evaluated at q = Q,
// p = Q(-h).
struct ExpansionRule {
    int power;
    std::function<Rational(const Rational& M)> leading;
    std::function<double(const ScalingRule&, const Vec& lambda, const Vec& Q, const Vec& P)> limit;
};

inline double h2_IIa(const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) {
    const double M = dot(l, l), w2 = r.omega * r.omega, lq = dot(l, Q), lp = dot(l, P);
    return M * (dot(P, P) + w2 * dot(Q, Q) - w2 * M / 2) - w2 * lq * lq - lp * lp;
}

inline double h2_IIb(const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) {
    const double M = dot(l, l), w2 = r.omega * r.omega, lq = dot(l, Q), lp = dot(l, P);
    return lp * lp + w2 * lq * lq + M * (r.delta * lq * lq + 2 * r.gamma * lq);
}

inline std::optional<ExpansionRule> expansion_rule(const InvariantId& id, Family fam) {
    using K = InvKind;
    auto ham = [](const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) { return hamiltonian_eval(r, l, Q, P); };
    switch (id.kind) {
    case K::C:
    case K::Cleft:
    case K::Cright:
        return ExpansionRule{2, [](const Rational&) { return Rational(0); },
                             [id](const ScalingRule&, const Vec& l, const Vec& Q, const Vec& P) {
                                 return phase_form<double, double>(id, Q, P, l, Coeffs<double>{});
                             }};
    case K::I1:
        if (fam != Family::V1) return std::nullopt;
        return ExpansionRule{2, [](const Rational& M) { return M; },
                             [ham](const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) {
                                 return 2 * ham(r, l, Q, P) - r.omega * r.omega * dot(l, l) / 2;
                             }};
    case K::J1:
        if (fam != Family::V1) return std::nullopt;
        return ExpansionRule{2, [](const Rational& M) { return Rational(M * M); },
                             [ham](const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) {
                                 const double M = dot(l, l);
                                 return M * (4 * ham(r, l, Q, P) - r.omega * r.omega * M);
                             }};
    case K::J1hat:
        if (fam != Family::V1) return std::nullopt;
        return ExpansionRule{2, [](const Rational& M) { return Rational(M * M); },
                             [ham](const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) {
                                 const double M = dot(l, l);
                                 return M * (2 * ham(r, l, Q, P) - r.omega * r.omega * M / 4);
                             }};
    case K::I2I:
        if (fam != Family::V2I) return std::nullopt;
        return ExpansionRule{2, [](const Rational& M) { return M; },
                             [ham](const ScalingRule& r, const Vec& l, const Vec& Q, const Vec& P) {
                                 return 2 * ham(r, l, Q, P) - r.omega * r.omega * dot(l, l) / 2;
                             }};
    case K::I1s:
        if (fam != Family::V2I && fam != Family::V1s) return std::nullopt;
        return ExpansionRule{1, [](const Rational&) { return Rational(0); },
                             [](const ScalingRule&, const Vec& l, const Vec&, const Vec& P) { return -dot(l, P); }};
    case K::I2IIa:
        if (fam != Family::V2II) return std::nullopt;
        return ExpansionRule{2, [](const Rational& M) { return Rational(M * M); }, h2_IIa};
    case K::I2IIb:
        if (fam != Family::V2II) return std::nullopt;
        return ExpansionRule{2, [](const Rational&) { return Rational(0); }, h2_IIb};
    default: return std::nullopt;
    }
}

struct ExpansionResult {
    Vec h, residual;
    double order = 0.0;
    bool leading_exact = false;   // I at h = 0 equals the leading constant exactly
    bool monotone = false;        // residual decreases with h
    bool exact = false;           // residual at rounding level for every h
    std::string leading;          // exact leading constant

    bool passed() const { return leading_exact && (exact || (order >= 0.9 && monotone)); }
};

// Parameters of the scaled family at h = 0, as exact rationals.
inline InvariantParams params_at_zero(Family f) {
    InvariantParams p;
    switch (f) {
    case Family::V1: p.varkappa = -2.0, p.alpha_plus = 0.0; break;
    case Family::V2I: p.kappa = -2.0; break;
    case Family::V2II: p.kappa = -2.0, p.eta = 0.0, p.zeta = 0.0; break;
    case Family::V1s: break;
    case Family::V2Is: p.alpha = -2.0; break;
    case Family::V2IIs: p.alpha = -2.0, p.alpha_plus = 0.0; break;
    }
    return p;
}

inline ExpansionResult expansion_check(const InvariantId& id, const ScalingRule& r, const Vec& lambda, const Vec& hs, const Vec& Q,
                                       const Vec& P) {
    check_h_list(hs);
    const auto rule = expansion_rule(id, r.family);
    if (!rule) throw std::invalid_argument("no expansion registered for " + id.name() + " on " + family_label(r.family));
    ExpansionResult res;
    res.h = hs;

    const auto lam = exact_vector(lambda);
    Rational M = 0;
    for (const auto& l : lam) M += l * l;
    const Rational c = rule->leading(M);
    res.leading = c.get_str();
    const auto Qx = exact_vector(Q);
    const auto c0 = coeffs_for<Rational>(id, params_at_zero(r.family));
    res.leading_exact = phase_form<Rational, Rational>(id, Qx, Qx, lam, c0) == c;

    const double target = rule->limit(r, lambda, Q, P);
    const double cd = c.get_d();
    for (double h : hs) {
        const auto back = reference_solve(r, lambda, {Q, P}, -h, 1, substeps_for(h));
        const PhasePoint x{Q, back.back().Q};
        const auto spec = scaled_spec(r, h);
        const double I = eval_invariant(id, x, ModelContext{lambda, h}, params_from(spec));
        res.residual.push_back(std::abs((I - cd) / std::pow(h, rule->power) - target));
    }
    res.exact = *std::max_element(res.residual.begin(), res.residual.end()) < 1e-10;
    res.order = res.exact ? std::numeric_limits<double>::infinity() : loglog_slope(res.h, res.residual);
    res.monotone = true;
    for (std::size_t i = 1; i < hs.size(); ++i)
        if ((hs[i] < hs[i - 1]) != (res.residual[i] < res.residual[i - 1])) res.monotone = false;
    return res;
}

}  // namespace h6
