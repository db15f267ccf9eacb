#pragma once

#include <string>
#include <vector>

#include "polydyn/rational.hpp"

namespace polydyn {

// value of the form a + b*sqrt(d); d = 0 marks a plain rational
struct QuadraticSurd {
    Rational a;
    Rational b;
    long long d = 0;

    static QuadraticSurd rational(Rational v) { return {std::move(v), Rational(0), 0}; }
    bool is_rational() const { return d == 0 || b == 0; }
    double to_double() const;
    std::string to_string() const;
    friend bool operator==(const QuadraticSurd& x, const QuadraticSurd& y) {
        return x.a == y.a && x.b == y.b && x.d == y.d;
    }
};

struct DegreeEstimate {
    bool exact = false;
    QuadraticSurd value;  // meaningful when exact
    double approx = 0.0;
    std::string method;                 // "recurrence" or "root-test"
    std::vector<long long> recurrence;  // c with d(n+r) = sum c[i]*d(n+r-1-i)
    double band_low = 0.0;              // root-test: previous estimate
    double band_high = 0.0;             // root-test: final estimate
};

// Growth rate of a first-algebraic-degree sequence (entries for n = 1..N;
// the implied n = 0 value of 1 is prepended internally). Tries integer
// linear recurrences of order 1..3 first and takes the dominant
// characteristic root, exact whenever that root is rational or quadratic;
// otherwise falls back to the N-th root test.
DegreeEstimate dynamical_degree_estimate(const std::vector<long long>& degrees);

}  // namespace polydyn
