#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

#include "polydyn/errors.hpp"

namespace polydyn {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Parses "a", "a/b", or a plain decimal like "-1.25" into an exact rational.
Rational parse_rational(const std::string& text);

std::string rational_to_string(const Rational& r);

// Exact square root in Q: returns nullopt when r is not a perfect square.
std::optional<Rational> rational_sqrt(const Rational& r);

// Element of Q(i): re + im * i, both exact rationals in lowest terms.
class GaussianRational {
  public:
    GaussianRational() : re_(0), im_(0) {}
    GaussianRational(Rational re, Rational im = Rational(0))
        : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }
    static GaussianRational integer(long v) { return GaussianRational(Rational(v)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_one() const { return re_ == 1 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    GaussianRational operator-() const { return GaussianRational(-re_, -im_); }
    GaussianRational conj() const { return GaussianRational(re_, -im_); }
    // |z|^2 as an exact rational.
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return GaussianRational(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return GaussianRational(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return GaussianRational(a.re_ * b.re_ - a.im_ * b.im_,
                                a.re_ * b.im_ + a.im_ * b.re_);
    }
    GaussianRational inverse() const {
        if (is_zero()) throw DomainError("division by zero in Q(i)");
        Rational n = norm2();
        return GaussianRational(re_ / n, -im_ / n);
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        return a * b.inverse();
    }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) {
        return !(a == b);
    }

    std::complex<double> to_complex() const {
        return {re_.get_d(), im_.get_d()};
    }

    // Exact square root in Q(i) when one exists.
    std::optional<GaussianRational> sqrt() const;

    std::string to_string() const;

  private:
    Rational re_, im_;
};

}  // namespace polydyn
