#pragma once

// Small arithmetic expression language used for user-supplied functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' '-'? integer)?
//   primary := number | identifier | func '(' expr ')' | '(' expr ')'
//   func    := exp | log | sin | cos | sqrt
//
// Identifiers must belong to the variable list given to the parser (X, Y by
// default). Evaluation is generic over double and Dual2, and every domain
// violation raises DomainError naming the offending sub-expression.

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace h6 {

struct SyntaxError : std::runtime_error {
    std::size_t position;
    SyntaxError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// Value with first partials in two directions (X and Y).
struct Dual2 {
    double v = 0.0, dx = 0.0, dy = 0.0;

    Dual2() = default;
    Dual2(double value) : v(value) {}
    Dual2(double value, double px, double py) : v(value), dx(px), dy(py) {}

    Dual2& operator+=(const Dual2& o) {
        v += o.v;
        dx += o.dx;
        dy += o.dy;
        return *this;
    }
    Dual2& operator-=(const Dual2& o) {
        v -= o.v;
        dx -= o.dx;
        dy -= o.dy;
        return *this;
    }
    Dual2& operator*=(const Dual2& o) {
        dx = dx * o.v + v * o.dx;
        dy = dy * o.v + v * o.dy;
        v *= o.v;
        return *this;
    }
    Dual2& operator/=(const Dual2& o) {
        const double inv = 1.0 / o.v;
        dx = (dx - v * inv * o.dx) * inv;
        dy = (dy - v * inv * o.dy) * inv;
        v *= inv;
        return *this;
    }
};

inline Dual2 operator+(Dual2 a, const Dual2& b) { return a += b; }
inline Dual2 operator-(Dual2 a, const Dual2& b) { return a -= b; }
inline Dual2 operator*(Dual2 a, const Dual2& b) { return a *= b; }
inline Dual2 operator/(Dual2 a, const Dual2& b) { return a /= b; }
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.dx, -a.dy}; }

inline Dual2 chain(const Dual2& a, double f, double fp) { return {f, fp * a.dx, fp * a.dy}; }
inline Dual2 exp(const Dual2& a) { const double e = std::exp(a.v); return chain(a, e, e); }
inline Dual2 log(const Dual2& a) { return chain(a, std::log(a.v), 1.0 / a.v); }
inline Dual2 sin(const Dual2& a) { return chain(a, std::sin(a.v), std::cos(a.v)); }
inline Dual2 cos(const Dual2& a) { return chain(a, std::cos(a.v), -std::sin(a.v)); }
inline Dual2 sqrt(const Dual2& a) { const double s = std::sqrt(a.v); return chain(a, s, 0.5 / s); }

inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.v; }
inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(const Dual2& x) { return std::isfinite(x.v) && std::isfinite(x.dx) && std::isfinite(x.dy); }

class ExprTree {
public:
    enum class Kind { Number, Variable, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sin, Cos, Sqrt };

    struct Node {
        Kind kind;
        double number = 0.0;
        std::size_t var = 0;
        int exponent = 0;
        std::shared_ptr<const Node> a, b;
    };
    using NodePtr = std::shared_ptr<const Node>;

    ExprTree() = default;
    ExprTree(NodePtr root, std::vector<std::string> vars) : root_(std::move(root)), vars_(std::move(vars)) {}

    static ExprTree parse(const std::string& text, std::vector<std::string> vars = {"X", "Y"});

    const NodePtr& root() const { return root_; }
    const std::vector<std::string>& vars() const { return vars_; }
    bool empty() const { return !root_; }

    std::string unparse() const { return root_ ? unparse(*root_, 0) : std::string(); }
    std::string unparse(const Node& n) const { return unparse(n, 0); }

    template <class S>
    S eval(const std::vector<S>& x) const {
        if (!root_) throw std::logic_error("evaluating an empty expression");
        if (x.size() != vars_.size()) throw std::invalid_argument("expression arity mismatch");
        return eval(*root_, x);
    }

    // h^2 * f and similar prefactor wrappings.
    ExprTree scaled(double c) const {
        auto k = std::make_shared<Node>(Node{Kind::Number, c, 0, 0, nullptr, nullptr});
        return ExprTree(std::make_shared<Node>(Node{Kind::Mul, 0.0, 0, 0, k, root_}), vars_);
    }

    bool operator==(const ExprTree& o) const { return vars_ == o.vars_ && same(root_, o.root_); }

private:
    static bool same(const NodePtr& a, const NodePtr& b) {
        if (!a || !b) return !a && !b;
        if (a->kind != b->kind) return false;
        switch (a->kind) {
        case Kind::Number: return a->number == b->number;
        case Kind::Variable: return a->var == b->var;
        case Kind::Pow: return a->exponent == b->exponent && same(a->a, b->a);
        default: return same(a->a, b->a) && same(a->b, b->b);
        }
    }

    static int precedence(Kind k) {
        switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
        }
    }

    std::string unparse(const Node& n, int ctx) const {
        std::string s;
        const int p = precedence(n.kind);
        switch (n.kind) {
        case Kind::Number: s = format_double(n.number); break;
        case Kind::Variable: s = vars_[n.var]; break;
        case Kind::Add: s = unparse(*n.a, 1) + " + " + unparse(*n.b, 2); break;
        case Kind::Sub: s = unparse(*n.a, 1) + " - " + unparse(*n.b, 2); break;
        case Kind::Mul: s = unparse(*n.a, 2) + "*" + unparse(*n.b, 3); break;
        case Kind::Div: s = unparse(*n.a, 2) + "/" + unparse(*n.b, 3); break;
        case Kind::Neg: s = "-" + unparse(*n.a, 3); break;
        case Kind::Pow: s = unparse(*n.a, 5) + "^" + std::to_string(n.exponent); break;
        case Kind::Exp: s = "exp(" + unparse(*n.a, 0) + ")"; break;
        case Kind::Log: s = "log(" + unparse(*n.a, 0) + ")"; break;
        case Kind::Sin: s = "sin(" + unparse(*n.a, 0) + ")"; break;
        case Kind::Cos: s = "cos(" + unparse(*n.a, 0) + ")"; break;
        case Kind::Sqrt: s = "sqrt(" + unparse(*n.a, 0) + ")"; break;
        }
        // Negative literals print with a sign and need the same care as Neg.
        const bool neg_literal = n.kind == Kind::Number && n.number < 0;
        if (p < ctx || (neg_literal && ctx >= 3)) return "(" + s + ")";
        return s;
    }

    template <class S>
    [[noreturn]] void domain(const Node& n, const std::string& why, const S& arg) const {
        throw DomainError(why + " in '" + unparse(n) + "' (argument " + format_double(value_of(arg)) + ")");
    }

    template <class S>
    S eval(const Node& n, const std::vector<S>& x) const {
        using std::cos, std::exp, std::log, std::sin, std::sqrt;
        S r{};
        switch (n.kind) {
        case Kind::Number: return S(n.number);
        case Kind::Variable: return x[n.var];
        case Kind::Add: r = eval(*n.a, x) + eval(*n.b, x); break;
        case Kind::Sub: r = eval(*n.a, x) - eval(*n.b, x); break;
        case Kind::Mul: r = eval(*n.a, x) * eval(*n.b, x); break;
        case Kind::Div: {
            const S den = eval(*n.b, x);
            if (value_of(den) == 0.0) domain(n, "division by zero", den);
            r = eval(*n.a, x) / den;
            break;
        }
        case Kind::Neg: r = -eval(*n.a, x); break;
        case Kind::Pow: {
            const S base = eval(*n.a, x);
            int k = n.exponent;
            if (k < 0 && value_of(base) == 0.0) domain(n, "negative power of zero", base);
            S acc = S(1.0);
            for (int i = 0; i < (k < 0 ? -k : k); ++i) acc = acc * base;
            r = k < 0 ? S(1.0) / acc : acc;
            break;
        }
        case Kind::Exp: r = exp(eval(*n.a, x)); break;
        case Kind::Log: {
            const S a = eval(*n.a, x);
            if (!(value_of(a) > 0.0)) domain(n, "log of non-positive value", a);
            r = log(a);
            break;
        }
        case Kind::Sin: r = sin(eval(*n.a, x)); break;
        case Kind::Cos: r = cos(eval(*n.a, x)); break;
        case Kind::Sqrt: {
            const S a = eval(*n.a, x);
            if (value_of(a) < 0.0) domain(n, "sqrt of negative value", a);
            if (value_of(a) == 0.0 && !std::is_same_v<S, double>) domain(n, "sqrt derivative at zero", a);
            r = sqrt(a);
            break;
        }
        }
        if (!all_finite(r)) throw DomainError("non-finite value in '" + unparse(n) + "'");
        return r;
    }

    NodePtr root_;
    std::vector<std::string> vars_;
};

namespace detail {

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

    ExprTree::NodePtr run() {
        auto n = expr();
        skip();
        if (i_ != s_.size()) throw SyntaxError(std::string("unexpected '") + s_[i_] + "'", i_);
        return n;
    }

private:
    using Kind = ExprTree::Kind;
    using Node = ExprTree::Node;
    using NodePtr = ExprTree::NodePtr;

    static NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
        return std::make_shared<Node>(Node{k, 0.0, 0, 0, std::move(a), std::move(b)});
    }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    bool accept(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto n = term();
        for (;;) {
            if (accept('+')) n = make(Kind::Add, n, term());
            else if (accept('-')) n = make(Kind::Sub, n, term());
            else return n;
        }
    }

    NodePtr term() {
        auto n = unary();
        for (;;) {
            if (accept('*')) n = make(Kind::Mul, n, unary());
            else if (accept('/')) n = make(Kind::Div, n, unary());
            else return n;
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            auto a = unary();
            if (a->kind == Kind::Number && a->number > 0) {
                // Fold "-<literal>" so negative literals print back unchanged.
                auto n = std::make_shared<Node>(*a);
                n->number = -a->number;
                return n;
            }
            return make(Kind::Neg, a);
        }
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (!accept('^')) return base;
        skip();
        const std::size_t start = i_;
        bool neg = accept('-');
        skip();
        std::size_t j = i_;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
        if (j == i_) throw SyntaxError("expected integer exponent", start);
        int k = std::stoi(s_.substr(i_, j - i_));
        i_ = j;
        auto n = make(Kind::Pow, base);
        auto m = std::make_shared<Node>(*n);
        m->exponent = neg ? -k : k;
        return m;
    }

    NodePtr primary() {
        skip();
        if (i_ >= s_.size()) throw SyntaxError("unexpected end of input", i_);
        const char c = s_[i_];
        if (c == '(') {
            ++i_;
            auto n = expr();
            if (!accept(')')) throw SyntaxError("expected ')'", i_);
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto r = std::from_chars(s_.data() + i_, s_.data() + s_.size(), v);
            if (r.ec != std::errc()) throw SyntaxError("malformed number", i_);
            auto n = std::make_shared<Node>(Node{Kind::Number, v, 0, 0, nullptr, nullptr});
            i_ = static_cast<std::size_t>(r.ptr - s_.data());
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            const std::string id = s_.substr(start, i_ - start);
            for (std::size_t v = 0; v < vars_.size(); ++v)
                if (vars_[v] == id) {
                    auto n = std::make_shared<Node>(Node{Kind::Variable, 0.0, 0, 0, nullptr, nullptr});
                    n->var = v;
                    return n;
                }
            static const std::pair<const char*, Kind> funcs[] = {
                {"exp", Kind::Exp}, {"log", Kind::Log}, {"sin", Kind::Sin}, {"cos", Kind::Cos}, {"sqrt", Kind::Sqrt}};
            for (const auto& [name, kind] : funcs)
                if (id == name) {
                    if (!accept('(')) throw SyntaxError("expected '(' after " + id, i_);
                    auto a = expr();
                    if (!accept(')')) throw SyntaxError("expected ')'", i_);
                    return make(kind, a);
                }
            throw SyntaxError("unknown identifier '" + id + "'", start);
        }
        throw SyntaxError(std::string("unexpected '") + c + "'", i_);
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t i_ = 0;
};

}  // namespace detail

inline ExprTree ExprTree::parse(const std::string& text, std::vector<std::string> vars) {
    detail::Parser p(text, vars);
    auto root = p.run();
    return ExprTree(std::move(root), std::move(vars));
}

inline ExprTree parse_expr(const std::string& text, std::vector<std::string> vars = {"X", "Y"}) {
    return ExprTree::parse(text, std::move(vars));
}

}  // namespace h6
