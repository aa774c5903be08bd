#pragma once

// Sparse multivariate polynomials with exact rational coefficients.
//
// A polynomial lives in a ring given by an ordered list of variable names.
// Terms are kept in a std::map keyed by exponent vectors under graded
// lexicographic order, so two equal polynomials always have identical
// storage and structural equality is plain map equality.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace h6 {

using Rational = mpq_class;
using Exponents = std::vector<std::uint16_t>;

struct GrLex {
    bool operator()(const Exponents& a, const Exponents& b) const {
        unsigned da = 0, db = 0;
        for (auto e : a) da += e;
        for (auto e : b) db += e;
        if (da != db) return da > db;
        return a > b;
    }
};

class MultiPoly {
public:
    using Terms = std::map<Exponents, Rational, GrLex>;

    MultiPoly() = default;
    explicit MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static MultiPoly constant(const std::vector<std::string>& vars, const Rational& c) {
        MultiPoly r(vars);
        if (c != 0) r.terms_[Exponents(vars.size(), 0)] = c;
        return r;
    }

    static MultiPoly variable(const std::vector<std::string>& vars, std::size_t i) {
        if (i >= vars.size()) throw std::out_of_range("MultiPoly::variable: index out of range");
        MultiPoly r(vars);
        Exponents e(vars.size(), 0);
        e[i] = 1;
        r.terms_[e] = 1;
        return r;
    }

    static MultiPoly variable(const std::vector<std::string>& vars, const std::string& name) {
        for (std::size_t i = 0; i < vars.size(); ++i)
            if (vars[i] == name) return variable(vars, i);
        throw std::invalid_argument("MultiPoly::variable: unknown variable " + name);
    }

    const std::vector<std::string>& vars() const { return vars_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exponents& e, const Rational& c) {
        if (e.size() != vars_.size()) throw std::invalid_argument("MultiPoly: exponent length mismatch");
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    unsigned degree() const {
        if (terms_.empty()) return 0;
        unsigned d = 0;
        for (auto e : terms_.begin()->first) d += e;
        return d;
    }

    bool operator==(const MultiPoly& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    MultiPoly& operator+=(const MultiPoly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    MultiPoly& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }
    MultiPoly& operator+=(const Rational& s) {
        add_term(Exponents(vars_.size(), 0), s);
        return *this;
    }
    MultiPoly& operator-=(const Rational& s) {
        add_term(Exponents(vars_.size(), 0), -s);
        return *this;
    }

    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        MultiPoly r(a.vars_.empty() ? b.vars_ : a.vars_);
        if (!a.vars_.empty() && !b.vars_.empty() && a.vars_ != b.vars_)
            throw std::invalid_argument("MultiPoly: ring mismatch");
        Exponents e(r.vars_.size());
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }

    MultiPoly derivative(std::size_t i) const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) {
            if (e[i] == 0) continue;
            Exponents d = e;
            --d[i];
            r.add_term(d, c * e[i]);
        }
        return r;
    }

    MultiPoly pow(unsigned k) const {
        MultiPoly r = constant(vars_, 1);
        for (unsigned j = 0; j < k; ++j) r = r * *this;
        return r;
    }

    // Substitute each variable by a polynomial of another (common) ring.
    MultiPoly compose(const std::vector<MultiPoly>& images) const {
        if (images.size() != vars_.size()) throw std::invalid_argument("MultiPoly::compose: arity mismatch");
        if (images.empty()) return *this;
        const auto& target = images.front().vars();
        MultiPoly r(target);
        std::vector<std::vector<MultiPoly>> powers(images.size());
        for (const auto& [e, c] : terms_) {
            MultiPoly m = constant(target, c);
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                auto& pw = powers[i];
                if (pw.empty()) pw.push_back(constant(target, 1));
                while (pw.size() <= e[i]) pw.push_back(pw.back() * images[i]);
                m = m * pw[e[i]];
            }
            r += m;
        }
        return r;
    }

    template <class S>
    S evaluate(const std::vector<S>& x) const {
        if (x.size() != vars_.size()) throw std::invalid_argument("MultiPoly::evaluate: arity mismatch");
        S acc = S(0);
        for (const auto& [e, c] : terms_) {
            S m = S(c.get_d());
            for (std::size_t i = 0; i < e.size(); ++i)
                for (unsigned k = 0; k < e[i]; ++k) m *= x[i];
            acc += m;
        }
        return acc;
    }

    Rational evaluate_exact(const std::vector<Rational>& x) const {
        if (x.size() != vars_.size()) throw std::invalid_argument("MultiPoly::evaluate: arity mismatch");
        Rational acc = 0;
        for (const auto& [e, c] : terms_) {
            Rational m = c;
            for (std::size_t i = 0; i < e.size(); ++i)
                for (unsigned k = 0; k < e[i]; ++k) m *= x[i];
            acc += m;
        }
        return acc;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [e, c] : terms_) {
            bool unit = true;
            for (auto k : e) unit = unit && k == 0;
            Rational a = abs(c);
            if (!first) os << (c < 0 ? " - " : " + ");
            else if (c < 0) os << "-";
            first = false;
            bool wrote = false;
            if (unit || a != 1) {
                os << a.get_str();
                wrote = true;
            }
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (wrote) os << "*";
                os << vars_[i];
                if (e[i] > 1) os << "^" << e[i];
                wrote = true;
            }
        }
        return os.str();
    }

private:
    void adopt(const MultiPoly& o) {
        if (vars_.empty() && terms_.empty()) {
            vars_ = o.vars_;
            return;
        }
        if (!o.vars_.empty() && o.vars_ != vars_) throw std::invalid_argument("MultiPoly: ring mismatch");
    }

    std::vector<std::string> vars_;
    Terms terms_;
};

inline MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
inline MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
inline MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
inline MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
inline MultiPoly operator*(const Rational& s, MultiPoly a) { return a *= s; }
inline MultiPoly operator/(MultiPoly a, const Rational& s) { return a *= Rational(1 / s); }
inline MultiPoly operator+(MultiPoly a, const Rational& s) { return a += s; }
inline MultiPoly operator+(const Rational& s, MultiPoly a) { return a += s; }
inline MultiPoly operator-(MultiPoly a, const Rational& s) { return a -= s; }
inline MultiPoly operator-(const Rational& s, MultiPoly a) { return (-a) += s; }

inline std::ostream& operator<<(std::ostream& os, const MultiPoly& p) { return os << p.to_string(); }

// Exact rational from a double (binary value, no rounding).
inline Rational exact(double x) { return Rational(x); }

}  // namespace h6
