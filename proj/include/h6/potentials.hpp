#pragma once

// The classified potentials V(A-, B-, M) and their first partials.
//
// Families and their defining formulas:
//   V1     -a+ A- - (k/2) B-
//   V2I    ((kappa+2)/M A-^2 - kappa B-) / 2
//   V2II   -(eta/2) A-^2 - zeta A- - (kappa/2) B-
//   V1s    B- + F(M, M B- - A-^2)
//   V2Is   -(alpha/2) B- + G(M, A-)
//   V2IIs  -(alpha/2) B- - (a+/M) A- + F(M, M B- - A-^2)
//   dPIN   A- - B-/2 + (alpha/2) log B-          (requires B- > 0)
//   Custom any expression in Am, Bm, M
//
// Partials come from Dual2 propagation, seeded on (A-, B-).

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "h6/algebra.hpp"
#include "h6/expr.hpp"

namespace h6 {

struct V1 {
    double alpha_plus = 0.0, varkappa = 0.0;
};
struct V2I {
    double kappa = 0.0;
};
struct V2II {
    double eta = 0.0, zeta = 0.0, kappa = 0.0;
};
// Nondegeneracy (d^2F/dY^2 != 0, d^3G/dY^3 != 0) is not enforced; degenerate
// choices fall back into the polynomial families.
struct V1s {
    ExprTree F;
};
struct V2Is {
    double alpha = 0.0;
    ExprTree G;
};
struct V2IIs {
    double alpha = 0.0, alpha_plus = 0.0;
    ExprTree F;
};
struct DPIN {
    double alpha = 0.0;
};
struct Custom {
    ExprTree expr;  // variables Am, Bm, M
};

using PotentialSpec = std::variant<V1, V2I, V2II, V1s, V2Is, V2IIs, DPIN, Custom>;

inline const std::vector<std::string>& custom_vars() {
    static const std::vector<std::string> v{"Am", "Bm", "M"};
    return v;
}

inline Custom make_custom(const std::string& text) { return {parse_expr(text, custom_vars())}; }

inline std::string family_name(const PotentialSpec& s) {
    static const char* names[] = {"V1", "V2I", "V2II", "V1s", "V2Is", "V2IIs", "dPIN", "Custom"};
    return names[s.index()];
}

struct PotentialValue {
    double V, dA, dB;
};

namespace detail {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

inline Dual2 call2(const ExprTree& f, const Dual2& x, const Dual2& y) { return f.eval(std::vector<Dual2>{x, y}); }

}  // namespace detail

inline PotentialValue eval_potential(const PotentialSpec& spec, double am, double bm, double m) {
    const Dual2 A(am, 1.0, 0.0), B(bm, 0.0, 1.0), M(m);
    const Dual2 half(0.5);
    const Dual2 r = std::visit(
        detail::overloaded{
            [&](const V1& s) { return Dual2(-s.alpha_plus) * A - Dual2(s.varkappa / 2) * B; },
            [&](const V2I& s) { return half * (Dual2((s.kappa + 2) / m) * A * A - Dual2(s.kappa) * B); },
            [&](const V2II& s) {
                return Dual2(-s.eta / 2) * A * A - Dual2(s.zeta) * A - Dual2(s.kappa / 2) * B;
            },
            [&](const V1s& s) { return B + detail::call2(s.F, M, M * B - A * A); },
            [&](const V2Is& s) { return Dual2(-s.alpha / 2) * B + detail::call2(s.G, M, A); },
            [&](const V2IIs& s) {
                return Dual2(-s.alpha / 2) * B - Dual2(s.alpha_plus / m) * A + detail::call2(s.F, M, M * B - A * A);
            },
            [&](const DPIN& s) {
                if (!(bm > 0.0)) throw DomainError("dPIN requires Bm > 0 (got " + format_double(bm) + ")");
                return A - half * B + Dual2(s.alpha / 2) * log(B);
            },
            [&](const Custom& s) { return s.expr.eval(std::vector<Dual2>{A, B, M}); },
        },
        spec);
    return {r.v, r.dx, r.dy};
}

inline PotentialValue eval_potential(const PotentialSpec& spec, const GeneratorState& g) {
    return eval_potential(spec, g.Am, g.Bm, g.M);
}

inline std::vector<double> grad_q(const PotentialSpec& spec, const PhasePoint& x, const ModelContext& ctx) {
    const auto g = realize(x, ctx);
    const auto v = eval_potential(spec, g);
    std::vector<double> out(ctx.N());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = v.dA * ctx.lambda[k] + 2.0 * v.dB * x.q[k];
    return out;
}

// Uniform samples in [-1,1]^{2N}; for dPIN q is redrawn until q^2 > 0.1.
inline PhasePoint sample_point(std::mt19937_64& rng, std::size_t n, bool need_q2 = false) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PhasePoint x{std::vector<double>(n), std::vector<double>(n)};
    do {
        for (auto& v : x.q) v = u(rng);
    } while (need_q2 && dot(x.q, x.q) <= 0.1);
    for (auto& v : x.p) v = u(rng);
    return x;
}

inline bool needs_positive_bm(const PotentialSpec& s) { return std::holds_alternative<DPIN>(s); }

// False flags a potential with no A- dependence (reducible to sl2).
inline bool consistency_flag(const PotentialSpec& spec, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < samples; ++i) {
        const double am = u(rng), bm = 0.1 + std::abs(u(rng)) * 2.0, m = 0.5 + std::abs(u(rng));
        try {
            if (std::abs(eval_potential(spec, am, bm, m).dA) > 1e-12) return true;
        } catch (const DomainError&) {
        }
    }
    return false;
}

}  // namespace h6
