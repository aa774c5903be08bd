#pragma once

// Forward-mode first derivatives with a dense gradient, used to obtain exact
// Jacobian rows of polynomial invariants without finite differences.

#include <Eigen/Dense>

namespace h6 {

struct Jet {
    double v = 0.0;
    Eigen::VectorXd d;

    Jet() = default;
    Jet(double value, Eigen::VectorXd grad) : v(value), d(std::move(grad)) {}

    static Jet seed(double value, Eigen::Index dim, Eigen::Index i) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        g[i] = 1.0;
        return {value, g};
    }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        d += o.d;
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        d -= o.d;
        return *this;
    }
    Jet& operator*=(const Jet& o) {
        d = d * o.v + o.d * v;
        v *= o.v;
        return *this;
    }
    Jet& operator+=(double s) {
        v += s;
        return *this;
    }
    Jet& operator-=(double s) {
        v -= s;
        return *this;
    }
    Jet& operator*=(double s) {
        v *= s;
        d *= s;
        return *this;
    }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator*(Jet a, const Jet& b) { return a *= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a -= s; }
inline Jet operator-(double s, Jet a) { return (-a) += s; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

}  // namespace h6
