#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "polydyn/errors.hpp"
#include "polydyn/pullback.hpp"

using namespace polydyn;

namespace {

Coefficient q(long num, long den = 1) {
    return Coefficient::exact(GaussianRational(make_rational(num, den)));
}

GaussianRational gq(long num, long den = 1) { return GaussianRational(make_rational(num, den)); }

PolyAutomorphism henon() {
    MultiPoly x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
    return {{y, y * y + x}, {y - x * x, x}};
}

// homogeneous coordinates (x, y, t)
MultiPoly hx() { return MultiPoly::variable(3, 0); }
MultiPoly hy() { return MultiPoly::variable(3, 1); }
MultiPoly ht() { return MultiPoly::variable(3, 2); }

Divisor line(long a, long b, long c) {
    MultiPoly p = hx().scaled(q(a)) + hy().scaled(q(b)) + ht().scaled(q(c));
    return Divisor(HomogPoly(p));
}

std::vector<Rational> c_values(const std::vector<SiuDecomposition>& seq) {
    std::vector<Rational> out;
    for (const auto& s : seq) out.push_back(s.c);
    return out;
}

}  // namespace

TEST_CASE("divisors are scaled to a unit leading coefficient") {
    Divisor s(HomogPoly(hx().scaled(q(3)) + ht().scaled(q(6))));
    CHECK(s.form().poly() == hx() + ht().scaled(q(2)));
    CHECK(s.degree() == 1);
    CHECK(Divisor(HomogPoly(hy().scaled(q(-5)))) == Divisor(HomogPoly(hy())));
}

TEST_CASE("divisor json round trip") {
    Divisor s(HomogPoly(hx() * hx() + hy() * ht()));
    nlohmann::json j = divisor_to_json(s);
    CHECK(j["degree"] == 2);
    CHECK(divisor_from_json(j) == s);

    j["degree"] = 3;
    CHECK_THROWS_AS(divisor_from_json(j), InputError);
    CHECK_THROWS_AS(divisor_from_json(nlohmann::json{{"degree", 1}}), InputError);
}

TEST_CASE("pullback of coordinate divisors under the plane quadratic map") {
    PolyAutomorphism f = henon();
    CHECK(pullback_divisor(f, Divisor(HomogPoly(hx()))).poly() == hy() * ht());
    CHECK(pullback_divisor(f, Divisor(HomogPoly(ht()))).poly() == ht() * ht());
    CHECK(pullback_divisor(f, Divisor(HomogPoly(hy()))).poly() == hy() * hy() + hx() * ht());

    MultiPoly wrong = MultiPoly::variable(4, 0);
    CHECK_THROWS_AS(pullback_divisor(f, Divisor(HomogPoly(wrong))), DomainError);
}

TEST_CASE("siu sequence oracle values") {
    PolyAutomorphism f = henon();

    auto cx = c_values(siu_sequence(f, Divisor(HomogPoly(hx())), 4));
    CHECK(cx == std::vector<Rational>{make_rational(1, 2), make_rational(1, 2),
                                      make_rational(1, 2), make_rational(1, 2)});

    auto ct = c_values(siu_sequence(f, Divisor(HomogPoly(ht())), 3));
    CHECK(ct == std::vector<Rational>{Rational(1), Rational(1), Rational(1)});

    auto cy = c_values(siu_sequence(f, line(0, 1, -1), 4));
    CHECK(cy == std::vector<Rational>{Rational(0), Rational(0), Rational(0), Rational(0)});

    // degree bookkeeping: m_n + deg(residual_n) = d * lambda^n, t-free residuals
    auto seq = siu_sequence(f, Divisor(HomogPoly(hx())), 5);
    long long mass = 1;
    for (const auto& step : seq) {
        mass *= 2;
        CHECK(step.t_multiplicity + step.residual.degree() == mass);
        CHECK(t_adic_valuation(step.residual) == 0);
    }
    CHECK(seq[1].residual.poly() == hy() * hy() + hx() * ht());
}

TEST_CASE("siu sequence requires degree stability") {
    // quadratic map of C^3 whose inverse direction drops degrees
    MultiPoly x = MultiPoly::variable(3, 0);
    MultiPoly y = MultiPoly::variable(3, 1);
    MultiPoly z = MultiPoly::variable(3, 2);
    MultiPoly one = MultiPoly::constant(3, 1L);
    std::vector<MultiPoly> fwd = {x * x - x * z + one + y, z.scaled(q(2)),
                                  x.scaled(q(1, 2)) + one.scaled(q(3))};
    MultiPoly u = z.scaled(q(2)) - one.scaled(q(6));
    std::vector<MultiPoly> inv = {u, x - u * u + u * y.scaled(q(1, 2)) - one,
                                  y.scaled(q(1, 2))};
    PolyAutomorphism g_inverse = PolyAutomorphism(fwd, inv).inverted();

    MultiPoly w = MultiPoly::variable(4, 0);
    CHECK_THROWS_AS(siu_sequence(g_inverse, Divisor(HomogPoly(w)), 3), StabilityViolation);
}

TEST_CASE("siu c values are nondecreasing in [0,1] for random divisors") {
    PolyAutomorphism f = henon();
    std::mt19937_64 rng(777001);
    std::uniform_int_distribution<long> coeff(-3, 3);
    std::uniform_int_distribution<int> degree_pick(1, 3);

    int built = 0;
    while (built < 12) {
        int d = degree_pick(rng);
        MultiPoly p = MultiPoly::zero(3);
        for (const Monomial& mono : {Monomial{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                     {2, 0, 0}, {1, 1, 0}, {0, 2, 0}, {1, 0, 1},
                                     {0, 1, 1}, {0, 0, 2}}) {
            if (monomial_degree(mono) > d) continue;
            long c = coeff(rng);
            if (c == 0) continue;
            Monomial padded = mono;
            padded[2] += d - monomial_degree(mono);
            p.add_term(padded, q(c));
        }
        if (p.is_zero()) continue;
        ++built;
        auto seq = siu_sequence(f, Divisor(HomogPoly(p)), 5);
        Rational prev(0);
        for (const auto& step : seq) {
            CHECK(step.c >= prev);
            CHECK(step.c <= 1);
            prev = step.c;
        }
    }
}

TEST_CASE("recursive and direct pullback routes agree") {
    PolyAutomorphism f = henon();
    for (const Divisor& s : {Divisor(HomogPoly(hx())), Divisor(HomogPoly(ht())),
                             line(0, 1, -1), Divisor(HomogPoly(hx() * hx() + hy() * ht())),
                             line(1, 2, -1)}) {
        auto seq = siu_sequence(f, s, 3);
        MultiPoly h_affine = s.form().dehomogenized();
        long long mass = s.degree();
        for (int n = 1; n <= 3; ++n) {
            mass *= 2;
            MultiPoly direct = compose(h_affine, f.iterate(n));
            long long m_direct = mass - *direct.total_degree();
            CHECK(seq[n - 1].t_multiplicity == m_direct);
            CHECK(seq[n - 1].residual ==
                  homogenize(direct, *direct.total_degree()));
        }
    }
}

TEST_CASE("c limit stabilization and interval fallback") {
    PolyAutomorphism f = henon();
    CLimitResult cx = c_limit(f, Divisor(HomogPoly(hx())), 6);
    CHECK(cx.stabilized);
    CHECK(cx.value() == make_rational(1, 2));

    CLimitResult ct = c_limit(f, Divisor(HomogPoly(ht())), 4);
    CHECK(ct.stabilized);
    CHECK(ct.value() == 1);

    CLimitResult cy = c_limit(f, line(0, 1, -1), 6);
    CHECK(cy.stabilized);
    CHECK(cy.value() == 0);
}

TEST_CASE("lelong orders transport through the map") {
    PolyAutomorphism f = henon();
    Divisor sx{HomogPoly(hx())};

    // fixed point at the origin: order of the second residual equals the
    // order of x at f^2(0,0) = (0,0)
    LelongReport at_origin =
        lelong_bound_check(f, sx, 2, {{gq(0), gq(0)}});
    CHECK(at_origin.all_equal);
    CHECK(at_origin.all_bounded);
    CHECK(at_origin.points[0].residual_order == 1);
    CHECK(at_origin.points[0].image_order == 1);

    // z = (2, 0) lands on Z(x) after one step
    LelongReport off_axis = lelong_bound_check(f, sx, 1, {{gq(2), gq(0)}, {gq(5), gq(1)}});
    CHECK(off_axis.all_equal);
    CHECK(off_axis.points[0].residual_order == 1);
    CHECK(off_axis.points[0].image_order == 1);
    CHECK(off_axis.points[1].residual_order == 0);

    // double line: orders double on both sides
    Divisor sxx(HomogPoly(hx() * hx()));
    LelongReport doubled = lelong_bound_check(f, sxx, 1, {{gq(2), gq(0)}});
    CHECK(doubled.all_equal);
    CHECK(doubled.all_bounded);
    CHECK(doubled.points[0].residual_order == 2);
    CHECK(doubled.points[0].image_order == 2);
}

TEST_CASE("transformation rule: pulling back shifts the c sequence") {
    PolyAutomorphism f = henon();
    CHECK(transformation_rule_check(f, Divisor(HomogPoly(hx())), 3));
    CHECK(transformation_rule_check(f, Divisor(HomogPoly(ht())), 3));
    CHECK(transformation_rule_check(f, line(0, 1, -1), 3));
    CHECK(transformation_rule_check(f, Divisor(HomogPoly(hx() * hx() + hy() * ht())), 2));
}

TEST_CASE("positivity criterion against the blow-down point") {
    PolyAutomorphism f = henon();

    PositivityReport px = positivity_criterion_check(f, Divisor(HomogPoly(hx())), 6);
    CHECK(px.x_plus == ProjectivePoint({gq(0), gq(1), gq(0)}));
    CHECK(px.mult_at_x_plus == 1);
    CHECK(px.c_positive);
    CHECK(px.consistent);

    PositivityReport py = positivity_criterion_check(f, line(0, 1, -1), 6);
    CHECK(py.mult_at_x_plus == 0);
    CHECK_FALSE(py.c_positive);
    CHECK(py.consistent);

    PositivityReport pt = positivity_criterion_check(f, Divisor(HomogPoly(ht())), 4);
    CHECK(pt.mult_at_x_plus == 1);
    CHECK(pt.consistent);
}

TEST_CASE("positivity criterion over all small integer lines") {
    PolyAutomorphism f = henon();
    for (long a = -2; a <= 2; ++a)
        for (long b = -2; b <= 2; ++b)
            for (long c = -2; c <= 2; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                PositivityReport r = positivity_criterion_check(f, line(a, b, c), 5);
                CHECK(r.consistent);
                // membership at X+ = [0:1:0] is exactly b = 0
                CHECK(r.c_positive == (b == 0));
            }
}
