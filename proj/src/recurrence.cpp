#include "polydyn/recurrence.hpp"

#include <cmath>
#include <optional>

#include "polydyn/errors.hpp"

namespace polydyn {

double QuadraticSurd::to_double() const {
    return a.get_d() + b.get_d() * std::sqrt(static_cast<double>(d));
}

std::string QuadraticSurd::to_string() const {
    if (is_rational()) return rational_to_string(a);
    std::string out;
    if (a != 0) out += rational_to_string(a);
    if (b > 0 && a != 0) out += "+";
    if (b == -1)
        out += "-";
    else if (b != 1)
        out += rational_to_string(b) + "*";
    out += "sqrt(" + std::to_string(d) + ")";
    return out;
}

namespace {

// exact solve of the r x r system fitting coefficients to the first r transitions
std::optional<std::vector<Rational>> solve_transitions(const std::vector<Rational>& seq, int r) {
    std::vector<std::vector<Rational>> m(r, std::vector<Rational>(r + 1));
    for (int t = 0; t < r; ++t) {
        for (int i = 0; i < r; ++i) m[t][i] = seq[t + r - 1 - i];
        m[t][r] = seq[t + r];
    }
    for (int col = 0; col < r; ++col) {
        int pivot = -1;
        for (int row = col; row < r; ++row)
            if (m[row][col] != 0) {
                pivot = row;
                break;
            }
        if (pivot < 0) return std::nullopt;
        std::swap(m[col], m[pivot]);
        for (int row = 0; row < r; ++row) {
            if (row == col || m[row][col] == 0) continue;
            Rational factor = m[row][col] / m[col][col];
            for (int c = col; c <= r; ++c) m[row][c] -= factor * m[col][c];
        }
    }
    std::vector<Rational> x(r);
    for (int i = 0; i < r; ++i) x[i] = m[i][r] / m[i][i];
    return x;
}

std::optional<std::vector<long long>> integer_recurrence(const std::vector<Rational>& seq, int r) {
    int transitions = static_cast<int>(seq.size()) - r;
    if (transitions < r + 1) return std::nullopt;
    auto coeffs = solve_transitions(seq, r);
    if (!coeffs) return std::nullopt;
    std::vector<long long> c(r);
    for (int i = 0; i < r; ++i) {
        const Rational& v = (*coeffs)[i];
        if (v.get_den() != 1 || !v.get_num().fits_slong_p()) return std::nullopt;
        c[i] = v.get_num().get_si();
    }
    for (std::size_t t = 0; t + r < seq.size(); ++t) {
        Rational predicted(0);
        for (int i = 0; i < r; ++i)
            predicted += Rational(static_cast<long>(c[i])) * seq[t + r - 1 - i];
        if (predicted != seq[t + r]) return std::nullopt;
    }
    return c;
}

long long strip_square_factor(long long d, long long& scale) {
    scale = 1;
    for (long long f = 2; f * f <= d; ++f) {
        while (d % (f * f) == 0) {
            d /= f * f;
            scale *= f;
        }
    }
    return d;
}

// dominant root of x^r = c1 x^(r-1) + ... + cr, exact for r <= 2
void dominant_root(const std::vector<long long>& found, DegreeEstimate& est) {
    est.method = "recurrence";
    est.recurrence = found;
    // trailing zeros only divide the characteristic polynomial by x
    std::vector<long long> c = found;
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    if (c.size() == 1) {
        est.exact = true;
        est.value = QuadraticSurd::rational(make_rational(c[0]));
        est.approx = est.value.to_double();
        return;
    }
    if (c.size() == 2) {
        long long disc = c[0] * c[0] + 4 * c[1];
        if (disc == 0) {
            est.exact = true;
            est.value = QuadraticSurd::rational(make_rational(c[0], 2));
            est.approx = est.value.to_double();
            return;
        }
        if (disc > 0) {
            long long scale = 0;
            long long reduced = strip_square_factor(disc, scale);
            est.exact = true;
            if (reduced == 1) {
                est.value = QuadraticSurd::rational(make_rational(c[0] + scale, 2));
            } else {
                est.value = {make_rational(c[0], 2), make_rational(scale, 2), reduced};
            }
            est.approx = est.value.to_double();
            return;
        }
    }
    // cubic (or complex quadratic) characteristic root: largest real root numerically
    auto eval = [&c](double x) {
        double v = 1.0;
        for (long long ci : c) v = v * x - static_cast<double>(ci);
        return v;
    };
    double hi = 1.0;
    for (long long ci : c) hi += std::abs(static_cast<double>(ci));
    double lo = 0.0;
    // find the last sign change scanning down from hi
    double step = hi / 4096.0;
    double x = hi;
    while (x > 0 && eval(x) > 0) x -= step;
    lo = std::max(0.0, x);
    double hi2 = lo + step;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi2);
        (eval(mid) > 0 ? hi2 : lo) = mid;
    }
    est.exact = false;
    est.approx = 0.5 * (lo + hi2);
}

}  // namespace

DegreeEstimate dynamical_degree_estimate(const std::vector<long long>& degrees) {
    if (degrees.size() < 4)
        throw PreconditionFailed("dynamical degree estimate needs at least 4 degree values");
    for (long long d : degrees)
        if (d < 1) throw PreconditionFailed("degree values must be positive");

    std::vector<Rational> with_origin;
    with_origin.push_back(Rational(1));
    for (long long d : degrees) with_origin.push_back(Rational(static_cast<long>(d)));
    std::vector<Rational> tail(with_origin.begin() + 1, with_origin.end());

    DegreeEstimate est;
    for (const auto& seq : {with_origin, tail}) {
        for (int r = 1; r <= 3; ++r) {
            auto c = integer_recurrence(seq, r);
            if (c) {
                dominant_root(*c, est);
                return est;
            }
        }
    }

    std::size_t n = degrees.size();
    est.method = "root-test";
    est.exact = false;
    double last = std::pow(static_cast<double>(degrees[n - 1]), 1.0 / static_cast<double>(n));
    double prev = std::pow(static_cast<double>(degrees[n - 2]), 1.0 / static_cast<double>(n - 1));
    est.approx = last;
    est.band_low = std::min(last, prev);
    est.band_high = std::max(last, prev);
    return est;
}

}  // namespace polydyn
