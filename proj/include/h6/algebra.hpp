#pragma once

// The h6 Lie-Poisson algebra, its N-body symplectic realization, and the
// Casimir functions (total, left and right).
//
// Brackets between generators use the same structure constants as the
// commutator table:
//
//   {K,A+} = A+     {K,A-} = -A-     {A-,A+} = M
//   {K,B+} = 2B+    {K,B-} = -2B-    {B-,B+} = 4K + 2M
//   {A+,B-} = -2A-  {A-,B+} = 2A+    {A+,B+} = {A-,B-} = 0
//   M central.
//
// With this choice the realization A+ = lambda.p, A- = lambda.q,
// K = q.p - lambda^2/2, B+ = p^2, B- = q^2, M = lambda^2 is a Poisson map
// for {q_i, p_j} = delta_ij, and the Casimir below is central.

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "h6/multipoly.hpp"

namespace h6 {

enum class GeneratorId { K = 0, Ap = 1, Am = 2, Bp = 3, Bm = 4, M = 5 };

inline const std::vector<std::string>& generator_vars() {
    static const std::vector<std::string> v{"K", "Ap", "Am", "Bp", "Bm", "M"};
    return v;
}

inline MultiPoly gen(GeneratorId g) { return MultiPoly::variable(generator_vars(), static_cast<std::size_t>(g)); }

// {J_i, J_j} as linear polynomials in the generators.
inline const std::array<std::array<MultiPoly, 6>, 6>& structure_table() {
    static const auto table = [] {
        using G = GeneratorId;
        std::array<std::array<MultiPoly, 6>, 6> t;
        const auto& v = generator_vars();
        for (auto& row : t)
            for (auto& e : row) e = MultiPoly(v);
        auto set = [&](G a, G b, const MultiPoly& val) {
            t[static_cast<int>(a)][static_cast<int>(b)] = val;
            t[static_cast<int>(b)][static_cast<int>(a)] = -val;
        };
        set(G::K, G::Ap, gen(G::Ap));
        set(G::K, G::Am, -gen(G::Am));
        set(G::Am, G::Ap, gen(G::M));
        set(G::K, G::Bp, Rational(2) * gen(G::Bp));
        set(G::K, G::Bm, Rational(-2) * gen(G::Bm));
        set(G::Bm, G::Bp, Rational(4) * gen(G::K) + Rational(2) * gen(G::M));
        set(G::Ap, G::Bm, Rational(-2) * gen(G::Am));
        set(G::Am, G::Bp, Rational(2) * gen(G::Ap));
        return t;
    }();
    return table;
}

inline MultiPoly lie_poisson_bracket(const MultiPoly& f, const MultiPoly& g) {
    const auto& v = generator_vars();
    for (const MultiPoly* x : {&f, &g})
        if (!x->vars().empty() && x->vars() != v)
            throw std::invalid_argument("lie_poisson_bracket: polynomial is not over (K, Ap, Am, Bp, Bm, M)");
    const auto& t = structure_table();
    MultiPoly r(v);
    std::array<MultiPoly, 6> df, dg;
    for (std::size_t i = 0; i < 6; ++i) {
        df[i] = f.is_zero() ? MultiPoly(v) : f.derivative(i);
        dg[i] = g.is_zero() ? MultiPoly(v) : g.derivative(i);
    }
    for (std::size_t i = 0; i < 5; ++i) {
        if (df[i].is_zero()) continue;
        for (std::size_t j = 0; j < 5; ++j) {
            if (i == j || dg[j].is_zero() || t[i][j].is_zero()) continue;
            r += df[i] * dg[j] * t[i][j];
        }
    }
    return r;
}

inline MultiPoly casimir_polynomial() {
    using G = GeneratorId;
    const MultiPoly K = gen(G::K), Ap = gen(G::Ap), Am = gen(G::Am), Bp = gen(G::Bp), Bm = gen(G::Bm), M = gen(G::M);
    const MultiPoly Kh = K + M / Rational(2);
    return M * Bp * Bm - Bp * Am * Am - Bm * Ap * Ap - M * Kh * Kh + Rational(2) * Am * Ap * Kh;
}

// Phase-space ring q1..qN, p1..pN.
inline std::vector<std::string> phase_vars(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back("q" + std::to_string(i));
    for (std::size_t i = 1; i <= n; ++i) v.push_back("p" + std::to_string(i));
    return v;
}

inline std::size_t phase_dim(const MultiPoly& f) {
    const auto& v = f.vars();
    if (v.size() % 2 != 0 || v != phase_vars(v.size() / 2))
        throw std::invalid_argument("canonical_bracket: polynomial is not over (q1..qN, p1..pN)");
    return v.size() / 2;
}

inline MultiPoly canonical_bracket(const MultiPoly& f, const MultiPoly& g) {
    if (f.vars() != g.vars()) throw std::invalid_argument("canonical_bracket: variable sets differ");
    const std::size_t n = phase_dim(f);
    MultiPoly r(f.vars());
    for (std::size_t i = 0; i < n; ++i) {
        r += f.derivative(i) * g.derivative(n + i);
        r -= f.derivative(n + i) * g.derivative(i);
    }
    return r;
}

// Phase coordinates as polynomial variables, for running the generic
// evaluators below with T = MultiPoly.
struct SymbolicPoint {
    std::vector<MultiPoly> q, p;
};

inline SymbolicPoint symbolic_point(std::size_t n) {
    const auto v = phase_vars(n);
    SymbolicPoint s;
    for (std::size_t i = 0; i < n; ++i) {
        s.q.push_back(MultiPoly::variable(v, i));
        s.p.push_back(MultiPoly::variable(v, n + i));
    }
    return s;
}

struct PhasePoint {
    std::vector<double> q, p;
};

struct ModelContext {
    std::vector<double> lambda;
    double h = 1.0;

    std::size_t N() const { return lambda.size(); }
};

inline std::vector<double> default_lambda(std::size_t n) {
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = 1.0 / static_cast<double>(i + 1);
    return l;
}

inline void validate(const PhasePoint& x, const ModelContext& ctx) {
    if (ctx.lambda.empty()) throw std::invalid_argument("N must be at least 1");
    if (x.q.size() != ctx.N() || x.p.size() != ctx.N()) throw std::invalid_argument("dimension mismatch between point and lambda");
}

// Generic dot product; T and S may be double, Rational, Jet or MultiPoly.
template <class A, class B>
auto dot(std::span<const A> a, std::span<const B> b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("dot: dimension mismatch");
    A acc = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

template <class A, class B>
auto dot(const std::vector<A>& a, const std::vector<B>& b) {
    return dot(std::span<const A>(a), std::span<const B>(b));
}

// The five dynamical generators take values in T, while M = lambda^2 is a
// constant of the scalar type S.
template <class T, class S = T>
struct Generators {
    T K, Ap, Am, Bp, Bm;
    S M;
};

using GeneratorState = Generators<double>;

template <class T, class S>
Generators<T, S> realize(const std::vector<T>& q, const std::vector<T>& p, const std::vector<S>& lambda) {
    if (q.size() != lambda.size() || p.size() != lambda.size() || lambda.empty())
        throw std::invalid_argument("realize: dimension mismatch");
    S m = lambda[0] * lambda[0];
    for (std::size_t i = 1; i < lambda.size(); ++i) m += lambda[i] * lambda[i];
    T k = dot(q, p);
    k -= m / S(2);
    return {k, dot(p, lambda), dot(q, lambda), dot(p, p), dot(q, q), m};
}

inline GeneratorState realize(const PhasePoint& x, const ModelContext& ctx) {
    validate(x, ctx);
    return realize<double, double>(x.q, x.p, ctx.lambda);
}

template <class T, class S>
T casimir(const Generators<T, S>& g) {
    T kh = g.K;
    kh += g.M / S(2);
    T r = g.Bp * g.Bm * g.M;
    r -= g.Bp * g.Am * g.Am;
    r -= g.Bm * g.Ap * g.Ap;
    r -= kh * kh * g.M;
    r += g.Am * g.Ap * kh * S(2);
    return r;
}

inline double casimir(const GeneratorState& g) { return casimir<double, double>(g); }

// Sum over i<j<k in [lo, hi) of the squared lambda-weighted 3x3 minors.
template <class T, class S>
T casimir_block(const std::vector<T>& q, const std::vector<T>& p, const std::vector<S>& lambda, std::size_t lo, std::size_t hi) {
    T acc = q[0] * S(0);
    for (std::size_t i = lo; i < hi; ++i)
        for (std::size_t j = i + 1; j < hi; ++j)
            for (std::size_t k = j + 1; k < hi; ++k) {
                T t = (p[j] * q[k] - p[k] * q[j]) * lambda[i];
                t += (p[k] * q[i] - p[i] * q[k]) * lambda[j];
                t += (p[i] * q[j] - p[j] * q[i]) * lambda[k];
                acc += t * t;
            }
    return acc;
}

inline void check_casimir_index(std::size_t m, std::size_t n) {
    if (m < 2 || m > n) throw std::out_of_range("Casimir index m must satisfy 2 <= m <= N");
}

template <class T, class S>
T left_casimir(std::size_t m, const std::vector<T>& q, const std::vector<T>& p, const std::vector<S>& lambda) {
    check_casimir_index(m, lambda.size());
    return casimir_block(q, p, lambda, 0, m);
}

template <class T, class S>
T right_casimir(std::size_t m, const std::vector<T>& q, const std::vector<T>& p, const std::vector<S>& lambda) {
    check_casimir_index(m, lambda.size());
    return casimir_block(q, p, lambda, lambda.size() - m, lambda.size());
}

inline double left_casimir(std::size_t m, const PhasePoint& x, const ModelContext& ctx) {
    validate(x, ctx);
    return left_casimir<double, double>(m, x.q, x.p, ctx.lambda);
}

inline double right_casimir(std::size_t m, const PhasePoint& x, const ModelContext& ctx) {
    validate(x, ctx);
    return right_casimir<double, double>(m, x.q, x.p, ctx.lambda);
}

// The realization D as a map from generator polynomials to phase polynomials.
inline std::vector<MultiPoly> realization_images(const std::vector<Rational>& lambda) {
    const auto s = symbolic_point(lambda.size());
    const auto g = realize<MultiPoly, Rational>(s.q, s.p, lambda);
    const auto v = phase_vars(lambda.size());
    return {g.K, g.Ap, g.Am, g.Bp, g.Bm, MultiPoly::constant(v, g.M)};
}

inline MultiPoly realize_poly(const MultiPoly& f, const std::vector<Rational>& lambda) {
    return f.compose(realization_images(lambda));
}

}  // namespace h6
