#pragma once

// Named invariants, their conservation along orbits, functional
// independence by numerical rank, and involutivity.
//
// Each invariant has a phase-space evaluator and, when it is a function of
// the generators, a generator-space evaluator. Both are templates over the
// value type T (double, Jet, MultiPoly) and scalar type S (double, Rational)
// so that numeric values, exact gradients and exact polynomials come from
// the same formulas.

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "h6/dynamics.hpp"
#include "h6/jet.hpp"

namespace h6 {

enum class InvKind { I1, I1s, I2I, I2IIa, I2IIb, I2Is, I2IIs, J1, J1hat, C, Cleft, Cright };

struct InvariantId {
    InvKind kind;
    std::size_t m = 0;  // Casimir index for Cleft/Cright

    std::string name() const {
        static const char* names[] = {"I1", "I1s", "I2I", "I2IIa", "I2IIb", "I2Is", "I2IIs", "J1", "J1hat", "C", "Cleft", "Cright"};
        std::string s = names[static_cast<int>(kind)];
        if (kind == InvKind::Cleft || kind == InvKind::Cright) s += std::to_string(m);
        return s;
    }

    bool generator_expressible() const { return kind != InvKind::Cleft && kind != InvKind::Cright; }

    bool operator==(const InvariantId&) const = default;
};

inline InvariantId parse_invariant(const std::string& s) {
    static const std::map<std::string, InvKind> simple{
        {"I1", InvKind::I1},       {"I1s", InvKind::I1s},     {"I2I", InvKind::I2I}, {"I2IIa", InvKind::I2IIa},
        {"I2IIb", InvKind::I2IIb}, {"I2Is", InvKind::I2Is},   {"I2IIs", InvKind::I2IIs}, {"J1", InvKind::J1},
        {"J1hat", InvKind::J1hat}, {"C", InvKind::C}};
    if (auto it = simple.find(s); it != simple.end()) return {it->second};
    for (auto [prefix, kind] : {std::pair{"Cleft", InvKind::Cleft}, std::pair{"Cright", InvKind::Cright}}) {
        const std::string p = prefix;
        if (s.rfind(p, 0) == 0 && s.size() > p.size()) {
            std::size_t pos = 0;
            const auto tail = s.substr(p.size());
            const unsigned long m = std::stoul(tail, &pos);
            if (pos == tail.size()) return {kind, m};
        }
    }
    throw std::invalid_argument("unknown invariant '" + s + "'");
}

struct InvariantParams {
    std::optional<double> varkappa, alpha_plus, kappa, eta, zeta, alpha;
};

inline InvariantParams params_from(const PotentialSpec& spec) {
    InvariantParams p;
    std::visit(detail::overloaded{
                   [&](const V1& s) { p.varkappa = s.varkappa, p.alpha_plus = s.alpha_plus; },
                   [&](const V2I& s) { p.kappa = s.kappa; },
                   [&](const V2II& s) { p.kappa = s.kappa, p.eta = s.eta, p.zeta = s.zeta; },
                   [&](const V1s&) {},
                   [&](const V2Is& s) { p.alpha = s.alpha; },
                   [&](const V2IIs& s) { p.alpha = s.alpha, p.alpha_plus = s.alpha_plus; },
                   [&](const DPIN& s) { p.alpha = s.alpha; },
                   [&](const Custom&) {},
               },
               spec);
    return p;
}

// Invariants each family is known to conserve, besides the Casimirs.
inline std::vector<InvariantId> family_invariants(const PotentialSpec& spec) {
    using K = InvKind;
    switch (spec.index()) {
    case 0: return {{K::I1}, {K::J1}, {K::J1hat}};
    case 1: return {{K::I2I}, {K::I1s}};
    case 2: return {{K::I2IIa}, {K::I2IIb}};
    case 3: return {{K::I1s}};
    case 4: return {{K::I2Is}};
    case 5: return {{K::I2IIs}};
    default: return {};
    }
}

inline std::vector<InvariantId> casimir_invariants(std::size_t n) {
    std::vector<InvariantId> v{{InvKind::C}};
    for (std::size_t m = 3; m <= n; ++m) v.push_back({InvKind::Cleft, m});
    for (std::size_t m = 3; m + 1 <= n; ++m) v.push_back({InvKind::Cright, m});
    return v;
}

template <class S>
struct Coeffs {
    S vk{}, ap{}, kappa{}, eta{}, zeta{}, alpha{};
};

template <class S>
S convert(double x) {
    if constexpr (std::is_same_v<S, Rational>) return exact(x);
    else return S(x);
}

template <class S>
Coeffs<S> coeffs_for(const InvariantId& id, const InvariantParams& p) {
    auto need = [&](const std::optional<double>& v, const char* what) {
        if (!v) throw std::invalid_argument("invariant " + id.name() + " needs parameter " + what);
        return convert<S>(*v);
    };
    Coeffs<S> c;
    switch (id.kind) {
    case InvKind::I1:
    case InvKind::J1:
    case InvKind::J1hat:
        c.vk = need(p.varkappa, "varkappa");
        c.ap = need(p.alpha_plus, "alpha_plus");
        break;
    case InvKind::I2I:
    case InvKind::I2IIa: c.kappa = need(p.kappa, "kappa"); break;
    case InvKind::I2IIb:
        c.kappa = need(p.kappa, "kappa");
        c.eta = need(p.eta, "eta");
        c.zeta = need(p.zeta, "zeta");
        break;
    case InvKind::I2Is: c.alpha = need(p.alpha, "alpha"); break;
    case InvKind::I2IIs:
        c.alpha = need(p.alpha, "alpha");
        c.ap = need(p.alpha_plus, "alpha_plus");
        break;
    default: break;
    }
    return c;
}

template <class T, class S>
T generator_form(const InvariantId& id, const Generators<T, S>& g, const Coeffs<S>& c) {
    const S M = g.M;
    switch (id.kind) {
    case InvKind::I1: return g.K * c.vk + (g.Ap + g.Am) * c.ap + g.Bp + g.Bm;
    case InvKind::I1s: return g.Ap - g.Am;
    case InvKind::I2I: {
        const S w = -(S(1) + c.kappa / S(2)) / M;
        return (g.Ap * g.Ap + g.Am * g.Am) * w + g.K * c.kappa + g.Bp + g.Bm;
    }
    case InvKind::I2IIa:
        return (g.K * M - g.Ap * g.Am) * c.kappa - (g.Am * g.Am + g.Ap * g.Ap) + (g.Bm + g.Bp) * M;
    case InvKind::I2IIb: {
        const S w = c.eta * M + c.kappa, z = c.zeta * M;
        return g.Ap * g.Am * w + (g.Ap + g.Am) * z + g.Ap * g.Ap + g.Am * g.Am;
    }
    case InvKind::I2Is: {
        const S inv = S(1) / c.alpha;
        return g.Ap * g.Am + (g.Am * g.Am + g.Ap * g.Ap - g.Bm * M - g.Bp * M) * inv - g.K * M;
    }
    case InvKind::I2IIs: return g.Ap * g.Ap + g.Am * g.Am + g.Ap * g.Am * c.alpha + (g.Ap + g.Am) * c.ap;
    case InvKind::J1hat: {
        const S a = c.ap, k = c.vk, a2 = a * a;
        const S kp2 = k + S(2), ta = S(2) * a, a2p2 = a2 + S(2);
        T r = g.Ap * g.Am * a2;
        r += g.Am * g.Bp * ta;
        r -= g.Am * g.K * ta;
        r += g.Ap * g.Bm * ta;
        r -= g.Ap * g.K * ta;
        r += g.Bm * g.Bp * kp2;
        r += (g.Bm + g.Bp) * M;
        r -= g.K * g.K * kp2;
        r -= g.K * a2p2 * M;
        return r;
    }
    case InvKind::J1: {
        const S a = c.ap, k = c.vk, a2 = a * a;
        const S c_amap = -a2 * (a2 + k - S(2));
        const S c_ambm = S(2) * a;
        const S c_ambp = -S(2) * a * (a2 - S(1));
        const S c_amk = S(2) * a * (a2 + k);
        const S c_bpbm = -k * a2 - S(2) * a2 + S(2);
        const S c_bk = S(2) * k;
        const S c_kk = k * a2 + k * k + S(2) * a2;
        const S c_km = a2 * (a2 + k + S(2)) * M;
        T r = g.Am * g.Ap * c_amap;
        r += g.Am * g.Bm * c_ambm;
        r += g.Am * g.Bp * c_ambp;
        r += g.Am * g.K * c_amk;
        r += g.Ap * g.Bm * c_ambp;
        r += g.Ap * g.Bp * c_ambm;
        r += g.Ap * g.K * c_amk;
        r += g.Bm * g.Bm;
        r += g.Bp * g.Bm * c_bpbm;
        r += (g.Bm + g.Bp) * g.K * c_bk;
        r += g.Bp * g.Bp;
        r += g.K * g.K * c_kk;
        r += g.K * c_km;
        return r;
    }
    case InvKind::C: return casimir(g);
    default: throw std::invalid_argument("invariant " + id.name() + " has no generator form");
    }
}

// Phase-space closed forms; J1 and J1hat are only known through generators.
template <class T, class S>
T phase_form(const InvariantId& id, const std::vector<T>& q, const std::vector<T>& p, const std::vector<S>& lambda,
             const Coeffs<S>& c) {
    const std::size_t n = lambda.size();
    if (q.size() != n || p.size() != n || n == 0) throw std::invalid_argument("dimension mismatch");
    S l2 = lambda[0] * lambda[0];
    for (std::size_t i = 1; i < n; ++i) l2 += lambda[i] * lambda[i];
    const T lq = dot(q, lambda), lp = dot(p, lambda), qq = dot(q, q), pp = dot(p, p), qp = dot(q, p);
    switch (id.kind) {
    case InvKind::I1: {
        T r = pp + qq + (lp + lq) * c.ap + qp * c.vk;
        r -= c.vk * l2 / S(2);
        return r;
    }
    case InvKind::I1s: return lp - lq;
    case InvKind::I2I: {
        const S w = -(S(1) + c.kappa / S(2)) / l2;
        T r = (lp * lp + lq * lq) * w + qp * c.kappa + pp + qq;
        r -= c.kappa * l2 / S(2);
        return r;
    }
    case InvKind::I2IIa: {
        T r = -(lq * lp * c.kappa) + qp * (c.kappa * l2) - (lq * lq + lp * lp) + (qq + pp) * l2;
        r -= c.kappa * l2 * l2 / S(2);
        return r;
    }
    case InvKind::I2IIb: {
        const S w = c.eta * l2 + c.kappa, z = c.zeta * l2;
        return lq * lp * w + (lp + lq) * z + lp * lp + lq * lq;
    }
    case InvKind::I2Is: {
        const S inv = S(1) / c.alpha;
        T r = lp * lq + (lq * lq + lp * lp - qq * l2 - pp * l2) * inv - qp * l2;
        r += l2 * l2 / S(2);
        return r;
    }
    case InvKind::I2IIs: return lp * lp + lq * lq + lp * lq * c.alpha + (lp + lq) * c.ap;
    case InvKind::C: return qq * pp * l2 - pp * lq * lq - qq * lp * lp - qp * qp * l2 + lq * lp * qp * S(2);
    case InvKind::Cleft: return left_casimir(id.m, q, p, lambda);
    case InvKind::Cright: return right_casimir(id.m, q, p, lambda);
    case InvKind::J1:
    case InvKind::J1hat: return generator_form(id, realize(q, p, lambda), c);
    }
    throw std::logic_error("unreachable");
}

inline double eval_invariant(const InvariantId& id, const PhasePoint& x, const ModelContext& ctx, const InvariantParams& params) {
    validate(x, ctx);
    return phase_form<double, double>(id, x.q, x.p, ctx.lambda, coeffs_for<double>(id, params));
}

inline double eval_invariant_generators(const InvariantId& id, const GeneratorState& g, const InvariantParams& params) {
    return generator_form<double, double>(id, g, coeffs_for<double>(id, params));
}

// Exact polynomial in (q, p); parameters and lambda are taken as the exact
// rationals equal to their binary values.
inline MultiPoly invariant_poly(const InvariantId& id, const std::vector<Rational>& lambda, const InvariantParams& params) {
    const auto s = symbolic_point(lambda.size());
    return phase_form<MultiPoly, Rational>(id, s.q, s.p, lambda, coeffs_for<Rational>(id, params));
}

inline std::vector<Rational> exact_vector(const std::vector<double>& v) {
    std::vector<Rational> r;
    for (double x : v) r.push_back(exact(x));
    return r;
}

inline std::vector<InvariantFn> invariant_evaluators(const std::vector<InvariantId>& ids, const ModelContext& ctx,
                                                     const InvariantParams& params) {
    std::vector<InvariantFn> fns;
    for (const auto& id : ids) {
        const auto c = coeffs_for<double>(id, params);
        fns.push_back([id, c, ctx](const PhasePoint& x) { return phase_form<double, double>(id, x.q, x.p, ctx.lambda, c); });
    }
    return fns;
}

inline std::vector<std::string> names_of(const std::vector<InvariantId>& ids) {
    std::vector<std::string> v;
    for (const auto& id : ids) v.push_back(id.name());
    return v;
}

// Max over the orbit of |I(t) - I(0)| / max(1, running max |I|), per column.
inline std::vector<double> conservation_report(const Trajectory& t) {
    if (t.entries.empty()) throw std::invalid_argument("empty trajectory");
    const std::size_t k = t.invariant_names.size();
    std::vector<double> drift(k, 0.0), running(k, 0.0);
    const auto& first = t.entries.front().invariants;
    for (const auto& e : t.entries)
        for (std::size_t j = 0; j < k; ++j) {
            running[j] = std::max(running[j], std::abs(e.invariants[j]));
            drift[j] = std::max(drift[j], std::abs(e.invariants[j] - first[j]) / std::max(1.0, running[j]));
        }
    return drift;
}

template <class T>
struct JetPoint {
    std::vector<T> q, p;
};

inline JetPoint<Jet> seed_jets(const PhasePoint& x) {
    const auto n = static_cast<Eigen::Index>(x.q.size());
    JetPoint<Jet> j;
    for (Eigen::Index i = 0; i < n; ++i) {
        j.q.push_back(Jet::seed(x.q[i], 2 * n, i));
        j.p.push_back(Jet::seed(x.p[i], 2 * n, n + i));
    }
    return j;
}

inline Eigen::VectorXd gradient(const InvariantId& id, const PhasePoint& x, const ModelContext& ctx, const InvariantParams& params) {
    const auto j = seed_jets(x);
    return phase_form<Jet, double>(id, j.q, j.p, ctx.lambda, coeffs_for<double>(id, params)).d;
}

inline Eigen::MatrixXd jacobian_rows(const std::vector<InvariantId>& ids, const PhasePoint& x, const ModelContext& ctx,
                                     const InvariantParams& params) {
    validate(x, ctx);
    Eigen::MatrixXd J(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(2 * ctx.N()));
    for (std::size_t r = 0; r < ids.size(); ++r) J.row(static_cast<Eigen::Index>(r)) = gradient(ids[r], x, ctx, params).transpose();
    return J;
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
    if (A.size() == 0) throw std::invalid_argument("numerical_rank: empty matrix");
    return Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
}

inline int numerical_rank(const Eigen::MatrixXd& A, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("numerical_rank: tolerance must be positive");
    const auto s = singular_values(A);
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol * s[0]) ++r;
    return r;
}

inline Eigen::MatrixXd normalize_rows(Eigen::MatrixXd A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double n = A.row(i).norm();
        if (n > 0) A.row(i) /= n;
    }
    return A;
}

inline const std::vector<std::string>& set_names() {
    static const std::vector<std::string> v{"S1-QMS", "S2I", "S3", "S1s", "S2Is", "S2IIs"};
    return v;
}

inline std::vector<InvariantId> set_members(const std::string& set, std::size_t n) {
    using K = InvKind;
    std::vector<InvariantId> head;
    if (set == "S1-QMS") head = {{K::I1}, {K::J1}, {K::J1hat}};
    else if (set == "S2I") head = {{K::I2I}, {K::I1s}};
    else if (set == "S3") head = {{K::I2IIa}, {K::I2IIb}};
    else if (set == "S1s") head = {{K::I1s}};
    else if (set == "S2Is") head = {{K::I2Is}};
    else if (set == "S2IIs") head = {{K::I2IIs}};
    else throw std::invalid_argument("unknown invariant set '" + set + "'");
    for (std::size_t m = 3; m <= n; ++m) head.push_back({K::Cleft, m});
    for (std::size_t m = 3; m + 1 <= n; ++m) head.push_back({K::Cright, m});
    return head;
}

inline int expected_rank(const std::string& set, std::size_t n) {
    const int N = static_cast<int>(n);
    if (set == "S1-QMS") return 2 * N - 2;
    if (set == "S2I" || set == "S3") return 2 * N - 3;
    return 2 * N - 4;
}

// Members claimed to Poisson-commute: the first N of a superintegrable set,
// the first N-1 of a quasi-integrable one.
inline std::vector<InvariantId> commuting_subset(const std::string& set, std::size_t n) {
    auto all = set_members(set, n);
    const std::size_t k = (set == "S1s" || set == "S2Is" || set == "S2IIs") ? n - 1 : n;
    all.resize(std::min(k, all.size()));
    return all;
}

inline const std::vector<double>& rank_tolerances() {
    static const std::vector<double> t{1e-6, 1e-7, 1e-8, 1e-9, 1e-10};
    return t;
}

struct RankStats {
    std::string set;
    std::size_t N;
    int expected;
    std::vector<int> ranks;                     // at the default tolerance 1e-8
    std::map<double, std::vector<int>> sweep;   // tolerance -> ranks
    int min = 0, max = 0, mode = 0;
    bool tolerance_stable = true;
    bool pass() const { return mode == expected && tolerance_stable; }
};

inline int mode_of(const std::vector<int>& v) {
    std::map<int, int> count;
    for (int r : v) ++count[r];
    int best = 0, n = -1;
    for (auto [r, c] : count)
        if (c > n) best = r, n = c;
    return best;
}

inline RankStats independence_test(const std::string& set, const ModelContext& ctx, const InvariantParams& params, int samples,
                                   std::uint64_t seed) {
    if (ctx.N() < 3) throw std::invalid_argument("independence_test needs N >= 3");
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    const auto ids = set_members(set, ctx.N());
    RankStats st{set, ctx.N(), expected_rank(set, ctx.N()), {}, {}};
    for (int s = 0; s < samples; ++s) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
        const auto x = sample_point(rng, ctx.N());
        const auto J = normalize_rows(jacobian_rows(ids, x, ctx, params));
        for (double tol : rank_tolerances()) st.sweep[tol].push_back(numerical_rank(J, tol));
        st.ranks.push_back(numerical_rank(J, 1e-8));
    }
    st.min = *std::min_element(st.ranks.begin(), st.ranks.end());
    st.max = *std::max_element(st.ranks.begin(), st.ranks.end());
    st.mode = mode_of(st.ranks);
    for (const auto& [tol, r] : st.sweep) st.tolerance_stable = st.tolerance_stable && mode_of(r) == st.mode;
    return st;
}

struct BracketEntry {
    std::string a, b;
    bool exact;          // verified as an exact polynomial identity
    double magnitude;    // max relative numeric bracket, or 0 when exact and zero
    std::size_t terms;   // number of terms of the exact bracket (0 if zero)
    bool pass;
};

struct InvolutionReport {
    std::string set;
    std::vector<BracketEntry> entries;
    bool pass() const {
        return std::all_of(entries.begin(), entries.end(), [](const BracketEntry& e) { return e.pass; });
    }
};

inline BracketEntry exact_bracket(const InvariantId& a, const InvariantId& b, const ModelContext& ctx, const InvariantParams& params) {
    const auto lam = exact_vector(ctx.lambda);
    const auto br = canonical_bracket(invariant_poly(a, lam, params), invariant_poly(b, lam, params));
    return {a.name(), b.name(), true, br.is_zero() ? 0.0 : 1.0, br.size(), br.is_zero()};
}

// max over points of |{f,g}| / (|grad f| |grad g|)
inline double numeric_bracket(const InvariantId& a, const InvariantId& b, const ModelContext& ctx, const InvariantParams& params,
                              int samples, std::uint64_t seed) {
    const std::size_t n = ctx.N();
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
        const auto x = sample_point(rng, n);
        const auto ga = gradient(a, x, ctx, params), gb = gradient(b, x, ctx, params);
        const auto N = static_cast<Eigen::Index>(n);
        const double br = ga.head(N).dot(gb.tail(N)) - ga.tail(N).dot(gb.head(N));
        const double scale = ga.norm() * gb.norm();
        worst = std::max(worst, scale > 0 ? std::abs(br) / scale : std::abs(br));
    }
    return worst;
}

inline InvolutionReport involution_test(const std::vector<InvariantId>& ids, const std::string& label, const ModelContext& ctx,
                                        const InvariantParams& params, bool exact, int samples = 10, std::uint64_t seed = 1) {
    InvolutionReport rep{label, {}};
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            if (exact) {
                rep.entries.push_back(exact_bracket(ids[i], ids[j], ctx, params));
            } else {
                const double m = numeric_bracket(ids[i], ids[j], ctx, params, samples, seed);
                rep.entries.push_back({ids[i].name(), ids[j].name(), false, m, 0, m < 1e-9});
            }
        }
    return rep;
}

// All invariants in this catalog are polynomial in (q, p), so exact checks
// are used up to N = 4 and numeric brackets beyond.
inline InvolutionReport involution_test(const std::string& set, const ModelContext& ctx, const InvariantParams& params,
                                        int samples = 10, std::uint64_t seed = 1) {
    return involution_test(commuting_subset(set, ctx.N()), set, ctx, params, ctx.N() <= 4, samples, seed);
}

}  // namespace h6
