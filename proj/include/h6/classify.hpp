#pragma once

// Executable pieces of the classification argument: the determinant of the
// (mu, nu) matrix, the rank of calM, the two PDE systems a coalgebra
// potential must satisfy, the quasi-standard closure probe, and a sampling
// search for invariants that are linear or quadratic in the generators.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "h6/invariants.hpp"

namespace h6 {

// Matrix with mu on the diagonal and nu elsewhere.
struct MnDet {
    Rational closed_form, elimination;
};

inline Rational mn_det_closed(int n, const Rational& mu, const Rational& nu) {
    if (n < 1) throw std::invalid_argument("mn_det: n must be positive");
    Rational r = mu + (n - 1) * nu;
    for (int i = 0; i < n - 1; ++i) r *= (mu - nu);
    return r;
}

// Fraction-free (Bareiss) elimination with row pivoting.
inline Rational bareiss_det(std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    Rational prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(a[k], a[s]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline MnDet mn_det(int n, const Rational& mu, const Rational& nu) {
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, nu));
    for (int i = 0; i < n; ++i) a[i][i] = mu;
    return {mn_det_closed(n, mu, nu), bareiss_det(std::move(a))};
}

inline Eigen::MatrixXd calM(const std::vector<double>& q, const std::vector<double>& lambda) {
    const std::size_t n = q.size();
    if (lambda.size() != n || n == 0) throw std::invalid_argument("calM: dimension mismatch");
    const double lq = dot(lambda, q), qq = dot(q, q), ll = dot(lambda, lambda);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) * (lq * lq - qq * ll);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            M(i, j) += q[i] * (ll * q[j] - lq * lambda[j]) + lambda[i] * (qq * lambda[j] - lq * q[j]);
    return M;
}

struct PdeResidual {
    double nonlinear;
    std::vector<double> linear;
    double scale_nonlinear;  // lambda^2 q^2 |grad V|^2
    double scale_linear;     // lambda^2 q^2 |grad V|_inf
    double max_linear() const {
        double m = 0;
        for (double v : linear) m = std::max(m, std::abs(v));
        return m;
    }
    double relative() const {
        return std::max(std::abs(nonlinear) / std::max(scale_nonlinear, 1e-300), max_linear() / std::max(scale_linear, 1e-300));
    }
};

inline PdeResidual pde_residual_from_gradient(const std::vector<double>& g, const std::vector<double>& q, const std::vector<double>& lambda) {
    const std::size_t n = q.size();
    const double lq = dot(lambda, q), qq = dot(q, q), ll = dot(lambda, lambda);
    const double qg = dot(q, g), lg = dot(lambda, g), gg = dot(g, g);
    const double w = ll * qq - lq * lq;
    double rhs = 0.0, ginf = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = lambda[k] * qg - q[k] * lg;
        rhs += c * c;
        ginf = std::max(ginf, std::abs(g[k]));
    }
    PdeResidual r{w * gg - rhs, std::vector<double>(n), ll * qq * gg, ll * qq * ginf};
    for (std::size_t j = 0; j < n; ++j)
        r.linear[j] = w * g[j] - (ll * q[j] - lq * lambda[j]) * qg - (qq * lambda[j] - lq * q[j]) * lg;
    return r;
}

inline PdeResidual pde_residual(const PotentialSpec& spec, const PhasePoint& x, const ModelContext& ctx) {
    return pde_residual_from_gradient(grad_q(spec, x, ctx), x.q, ctx.lambda);
}

inline std::vector<std::string> raw_vars(std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 1; i <= n; ++i) v.push_back("q" + std::to_string(i));
    return v;
}

// Central differences for a raw expression in q1..qN.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& q) {
    std::vector<double> g(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
        const double step = 1e-6 * std::max(1.0, std::abs(q[k]));
        auto a = q, b = q;
        a[k] += step;
        b[k] -= step;
        g[k] = (f(a) - f(b)) / (2 * step);
    }
    return g;
}

inline PdeResidual pde_residual(const ExprTree& raw, const std::vector<double>& q, const ModelContext& ctx) {
    const auto f = [&](const std::vector<double>& x) { return raw.eval(x); };
    return pde_residual_from_gradient(fd_gradient(f, q), q, ctx.lambda);
}

enum class EllVariant { Identity, Quadratic, User };

struct Ell {
    EllVariant variant = EllVariant::Identity;
    double epsilon = 0.1;
    ExprTree user;  // expression in X

    // l'(xi)
    double derivative(double xi) const {
        switch (variant) {
        case EllVariant::Identity: return 1.0;
        case EllVariant::Quadratic: return 1.0 + 2.0 * epsilon * xi;
        case EllVariant::User: {
            const Dual2 r = user.eval(std::vector<Dual2>{Dual2(xi, 1.0, 0.0)});
            return r.dx;
        }
        }
        return 0.0;
    }
};

// B+(t+h) = sum_k [l'(q_k(t+h) q_k(t))]^2 q_k(t)^2 should not depend on
// q(t+h); returns max_k |dB+(t+h)/dq_k(t+h)| by central differences.
inline double closure_probe(const Ell& ell, const std::vector<double>& q_now, const std::vector<double>& q_next) {
    if (q_now.size() != q_next.size()) throw std::invalid_argument("closure_probe: dimension mismatch");
    auto bplus = [&](const std::vector<double>& qn) {
        double s = 0.0;
        for (std::size_t k = 0; k < qn.size(); ++k) {
            const double d = ell.derivative(qn[k] * q_now[k]);
            if (d == 0.0)
                throw DomainError("l' vanishes at xi = " + format_double(qn[k] * q_now[k]) + ", l is not invertible there");
            s += d * d * q_now[k] * q_now[k];
        }
        return s;
    };
    double worst = 0.0;
    for (double g : fd_gradient(bplus, q_next)) worst = std::max(worst, std::abs(g));
    return worst;
}

struct AnsatzBasis {
    int degree;
    std::vector<std::string> labels;  // the constant "1" is listed first
};

inline AnsatzBasis ansatz_basis(int degree) {
    if (degree == 1) return {1, {"1", "K", "Ap", "Am", "Bp", "Bm"}};
    if (degree == 2) return {2, {"1", "Bp", "Bm", "K", "Ap*Am", "Ap", "Am", "Ap^2", "Am^2"}};
    throw std::invalid_argument("invariant_search: degree must be 1 or 2");
}

// Non-constant basis monomials evaluated on a generator state.
inline std::vector<double> ansatz_values(int degree, const GeneratorState& g) {
    if (degree == 1) return {g.K, g.Ap, g.Am, g.Bp, g.Bm};
    return {g.Bp, g.Bm, g.K, g.Ap * g.Am, g.Ap, g.Am, g.Ap * g.Ap, g.Am * g.Am};
}

struct SearchResult {
    AnsatzBasis basis;
    std::vector<std::vector<double>> nullspace;  // orthonormal, over labels[1..]
    std::vector<double> singular_values;
    std::vector<double> residuals;  // per vector, on fresh samples
    double condition = 0.0;         // sigma_max / smallest retained sigma
    std::vector<std::string> warnings;
    std::size_t dimension() const { return nullspace.size(); }
};

inline Eigen::MatrixXd search_rows(const PotentialSpec& spec, int degree, const ModelContext& ctx, int samples, std::uint64_t seed,
                                   Eigen::MatrixXd* scales = nullptr) {
    const std::size_t b = ansatz_basis(degree).labels.size() - 1;
    Eigen::MatrixXd A(samples, static_cast<Eigen::Index>(b));
    if (scales) scales->resize(samples, static_cast<Eigen::Index>(b));
    for (int s = 0; s < samples; ++s) {
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(s));
        const auto x = sample_point(rng, ctx.N(), needs_positive_bm(spec));
        const auto before = ansatz_values(degree, realize(x, ctx));
        const auto after = ansatz_values(degree, realize(step_phase(x, spec, ctx), ctx));
        for (std::size_t j = 0; j < b; ++j) {
            A(s, static_cast<Eigen::Index>(j)) = after[j] - before[j];
            if (scales) (*scales)(s, static_cast<Eigen::Index>(j)) = std::abs(after[j]) + std::abs(before[j]);
        }
    }
    return A;
}

// The constant monomial gives an identically zero column (1 - 1), so it is
// always null; it is quotiented out by building the matrix without it.
inline SearchResult invariant_search(const PotentialSpec& spec, int degree, const ModelContext& ctx, int samples, std::uint64_t seed) {
    SearchResult res{ansatz_basis(degree), {}, {}, {}, 0.0, {}};
    const std::size_t b = res.basis.labels.size() - 1;
    if (samples < static_cast<int>(3 * res.basis.labels.size()))
        throw std::invalid_argument("invariant_search: need at least 3x basis size samples");
    if (!consistency_flag(spec, 100, seed)) res.warnings.push_back("potential has no Am dependence (sl2-reducible)");

    const Eigen::MatrixXd A = normalize_rows(search_rows(spec, degree, ctx, samples, seed));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const auto s = svd.singularValues();
    const auto& V = svd.matrixV();
    for (Eigen::Index i = 0; i < s.size(); ++i) res.singular_values.push_back(s[i]);
    const double smax = s.size() ? s[0] : 0.0;
    double smallest_kept = smax;
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(b); ++j) {
        const double sj = j < s.size() ? s[j] : 0.0;
        if (sj < 1e-9 * smax) {
            std::vector<double> v(b);
            for (std::size_t i = 0; i < b; ++i) v[i] = V(static_cast<Eigen::Index>(i), j);
            res.nullspace.push_back(v);
        } else {
            smallest_kept = sj;
        }
    }
    res.condition = smallest_kept > 0 ? smax / smallest_kept : INFINITY;
    if (res.condition > 1e6) res.warnings.push_back("ill-conditioned sampling: condition number " + format_double(res.condition));

    Eigen::MatrixXd scales;
    const Eigen::MatrixXd F = search_rows(spec, degree, ctx, samples, seed + 0x9e3779b97f4a7c15ULL, &scales);
    for (const auto& v : res.nullspace) {
        Eigen::Map<const Eigen::VectorXd> ev(v.data(), static_cast<Eigen::Index>(b));
        const Eigen::VectorXd r = F * ev;
        const Eigen::VectorXd sc = scales * ev.cwiseAbs();
        double worst = 0.0;
        for (Eigen::Index i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i]) / std::max(sc[i], 1e-300));
        res.residuals.push_back(worst);
    }
    return res;
}

}  // namespace h6
