#pragma once

// Shared helpers for the test programs.

#include <random>
#include <vector>

#include "h6/algebra.hpp"

namespace test {

inline h6::PhasePoint random_point(std::mt19937_64& rng, std::size_t n, double r = 1.0) {
    std::uniform_real_distribution<double> u(-r, r);
    h6::PhasePoint x{std::vector<double>(n), std::vector<double>(n)};
    for (auto& v : x.q) v = u(rng);
    for (auto& v : x.p) v = u(rng);
    return x;
}

inline h6::Rational random_rational(std::mt19937_64& rng, int range = 9) {
    std::uniform_int_distribution<int> num(-range, range), den(1, range);
    h6::Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

// A few random terms of total degree <= deg over the six generators.
inline h6::MultiPoly random_generator_poly(std::mt19937_64& rng, unsigned deg, int terms = 4) {
    const auto& v = h6::generator_vars();
    h6::MultiPoly p(v);
    std::uniform_int_distribution<int> var(0, 5), d(0, static_cast<int>(deg));
    for (int t = 0; t < terms; ++t) {
        h6::Exponents e(6, 0);
        const int k = d(rng);
        for (int i = 0; i < k; ++i) ++e[var(rng)];
        p.add_term(e, random_rational(rng));
    }
    return p;
}

template <std::size_t N>
std::vector<h6::Rational> rationals(const char* const (&s)[N]) {
    std::vector<h6::Rational> v;
    for (auto x : s) v.emplace_back(x);
    for (auto& x : v) x.canonicalize();
    return v;
}

template <std::size_t N>
std::vector<double> doubles(const char* const (&s)[N]) {
    std::vector<double> v;
    for (auto x : s) v.push_back(h6::Rational(x).get_d());
    return v;
}

}  // namespace test
