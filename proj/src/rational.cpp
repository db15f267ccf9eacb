#include "polydyn/rational.hpp"

#include <sstream>

namespace polydyn {

Rational parse_rational(const std::string& text) {
    std::string s = text;
    // strip spaces
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw InputError("empty rational literal");
    auto slash = t.find('/');
    try {
        if (slash != std::string::npos) {
            Rational r(mpz_class(t.substr(0, slash)), mpz_class(t.substr(slash + 1)));
            if (r.get_den() == 0) throw InputError("zero denominator in '" + text + "'");
            r.canonicalize();
            return r;
        }
        auto dot = t.find('.');
        if (dot == std::string::npos) return Rational(mpz_class(t));
        // decimal literal: sign, integer part, fractional part
        std::string digits = t.substr(0, dot) + t.substr(dot + 1);
        std::size_t frac_len = t.size() - dot - 1;
        if (frac_len == 0) throw InputError("trailing dot in '" + text + "'");
        mpz_class num(digits);
        mpz_class den(1);
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        Rational r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw InputError("cannot parse rational '" + text + "'");
    }
}

std::string rational_to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r < 0) return std::nullopt;
    mpz_class num = r.get_num(), den = r.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    Rational out(sn, sd);
    out.canonicalize();
    return out;
}

std::optional<GaussianRational> GaussianRational::sqrt() const {
    if (is_zero()) return GaussianRational();
    if (im_ == 0) {
        if (re_ > 0) {
            auto s = rational_sqrt(re_);
            if (!s) return std::nullopt;
            return GaussianRational(*s);
        }
        auto s = rational_sqrt(-re_);
        if (!s) return std::nullopt;
        return GaussianRational(Rational(0), *s);
    }
    // sqrt(u+vi) = s + (v/2s) i with s^2 = (u + |w|)/2, |w| = sqrt(u^2+v^2)
    auto n = rational_sqrt(norm2());
    if (!n) return std::nullopt;
    auto s2 = Rational((re_ + *n) / 2);
    auto s = rational_sqrt(s2);
    if (!s || *s == 0) return std::nullopt;
    Rational half_v_over_s = im_ / (2 * *s);
    GaussianRational root(*s, half_v_over_s);
    if (root * root == *this) return root;
    return std::nullopt;
}

std::string GaussianRational::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    auto append_im = [&os](const Rational& v) {
        if (v == 1)
            os << "i";
        else if (v == -1)
            os << "-i";
        else
            os << v << "i";
    };
    if (im_ == 0) {
        os << re_;
    } else if (re_ == 0) {
        append_im(im_);
    } else {
        os << re_;
        if (im_ > 0) os << "+";
        append_im(im_);
    }
    return os.str();
}

}  // namespace polydyn
