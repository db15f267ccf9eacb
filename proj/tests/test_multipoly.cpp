#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polydyn/errors.hpp"
#include "polydyn/multipoly.hpp"

#include <complex>
#include <random>

using namespace polydyn;

namespace {

Coefficient q(long num, long den = 1) {
    return Coefficient::exact(GaussianRational(make_rational(num, den)));
}

MultiPoly var(int n, int i) { return MultiPoly::variable(n, i); }

MultiPoly from_terms(int n, std::initializer_list<std::pair<Monomial, long>> terms) {
    MultiPoly p = MultiPoly::zero(n);
    for (const auto& [mono, c] : terms) p.add_term(mono, q(c));
    return p;
}

MultiPoly random_exact_poly(std::mt19937_64& rng, int n, int max_degree) {
    std::uniform_int_distribution<int> exp_dist(0, max_degree);
    std::uniform_int_distribution<long> coeff_dist(-4, 4);
    std::uniform_int_distribution<int> count_dist(1, 6);
    MultiPoly p = MultiPoly::zero(n);
    int terms = count_dist(rng);
    for (int t = 0; t < terms; ++t) {
        Monomial m(n);
        for (int i = 0; i < n; ++i) m[i] = exp_dist(rng);
        GaussianRational c(make_rational(coeff_dist(rng)), make_rational(coeff_dist(rng)));
        p.add_term(m, Coefficient::exact(c));
    }
    return p;
}

}  // namespace

TEST_CASE("term storage is graded lex ascending") {
    MultiPoly p = from_terms(2, {{{2, 0}, 1}, {{0, 1}, 1}, {{0, 0}, 1}});
    std::vector<Monomial> order;
    for (const auto& [mono, c] : p.terms()) order.push_back(mono);
    REQUIRE(order.size() == 3);
    CHECK(order[0] == Monomial{0, 0});
    CHECK(order[1] == Monomial{0, 1});
    CHECK(order[2] == Monomial{2, 0});

    // same degree: lex on exponent vectors, so the leading term of x+y is x
    MultiPoly s = var(2, 0) + var(2, 1);
    CHECK(s.terms().rbegin()->first == Monomial{1, 0});
}

TEST_CASE("zero polynomial has no degree") {
    MultiPoly z = MultiPoly::zero(3);
    CHECK(z.is_zero());
    CHECK_FALSE(z.total_degree().has_value());
    MultiPoly p = var(3, 0);
    CHECK((p - p).is_zero());
    CHECK(p.total_degree() == 1);
}

TEST_CASE("binomial square expands correctly") {
    MultiPoly x = var(2, 0), y = var(2, 1);
    MultiPoly lhs = (x + y) * (x + y);
    MultiPoly expected = from_terms(2, {{{2, 0}, 1}, {{1, 1}, 2}, {{0, 2}, 1}});
    CHECK(lhs == expected);
    CHECK((x + y) * (x - y) == from_terms(2, {{{2, 0}, 1}, {{0, 2}, -1}}));
}

TEST_CASE("add_term accumulates and drops cancelled terms") {
    MultiPoly p = MultiPoly::zero(2);
    p.add_term({1, 1}, q(3));
    p.add_term({1, 1}, q(-3));
    CHECK(p.is_zero());
    p.set_term({0, 2}, q(5));
    p.set_term({0, 2}, q(7));
    CHECK(p.coeff({0, 2}) == q(7));
    CHECK(p.coeff({5, 5}) == q(0));
}

TEST_CASE("composition matches hand expansion") {
    // p(x,y) = x^2 + y evaluated on the map (y, y^2 + x)
    MultiPoly x = var(2, 0), y = var(2, 1);
    MultiPoly p = x * x + y;
    MultiPoly composed = compose(p, {y, y * y + x});
    CHECK(composed == from_terms(2, {{{0, 2}, 2}, {{1, 0}, 1}}));

    // q(x,y,z) = xyz + z^2 on (x+1, y^2, z-x)
    MultiPoly qx = var(3, 0), qy = var(3, 1), qz = var(3, 2);
    MultiPoly qp = qx * qy * qz + qz * qz;
    MultiPoly qc = compose(qp, {qx + MultiPoly::constant(3, 1L), qy * qy, qz - qx});
    MultiPoly expect = from_terms(3, {{{1, 2, 1}, 1},
                                      {{2, 2, 0}, -1},
                                      {{0, 2, 1}, 1},
                                      {{1, 2, 0}, -1},
                                      {{0, 0, 2}, 1},
                                      {{1, 0, 1}, -2},
                                      {{2, 0, 0}, 1}});
    CHECK(qc == expect);
}

TEST_CASE("composition is associative on random inputs") {
    std::mt19937_64 rng(987654321);
    for (int round = 0; round < 8; ++round) {
        MultiPoly p = random_exact_poly(rng, 2, 2);
        std::vector<MultiPoly> f = {random_exact_poly(rng, 2, 2), random_exact_poly(rng, 2, 2)};
        std::vector<MultiPoly> g = {random_exact_poly(rng, 2, 1), random_exact_poly(rng, 2, 1)};
        MultiPoly lhs = compose(compose(p, f), g);
        MultiPoly rhs = compose(p, {compose(f[0], g), compose(f[1], g)});
        CHECK(lhs == rhs);
    }
}

TEST_CASE("ring identities on random inputs") {
    std::mt19937_64 rng(20240817);
    for (int round = 0; round < 10; ++round) {
        MultiPoly p = random_exact_poly(rng, 3, 3);
        MultiPoly r = random_exact_poly(rng, 3, 3);
        MultiPoly s = random_exact_poly(rng, 3, 3);
        CHECK(p * r == r * p);
        CHECK((p + r) * s == p * s + r * s);
        CHECK(p + (-p) == MultiPoly::zero(3));
    }
}

TEST_CASE("evaluation agrees between exact and approx routes") {
    MultiPoly x = var(2, 0), y = var(2, 1);
    MultiPoly p = x * x + y.scaled(q(2)) * x;  // x^2 + 2xy
    std::vector<GaussianRational> pt = {GaussianRational::integer(3),
                                        GaussianRational::integer(4)};
    CHECK(p.eval_exact(pt) == GaussianRational::integer(33));

    std::complex<double> zi(0.0, 1.0);
    std::complex<double> got = p.eval_complex({zi, {1.0, 0.0}});
    CHECK(std::abs(got - std::complex<double>(-1.0, 2.0)) < 1e-12);

    std::mt19937_64 rng(5150);
    for (int round = 0; round < 6; ++round) {
        MultiPoly rp = random_exact_poly(rng, 2, 3);
        std::uniform_real_distribution<double> coord(-1.0, 1.0);
        std::complex<double> a(coord(rng), coord(rng)), b(coord(rng), coord(rng));
        std::complex<double> direct = rp.eval_complex({a, b});
        std::complex<double> via_approx = rp.to_approx().eval_complex({a, b});
        CHECK(std::abs(direct - via_approx) < 1e-9);
    }
}

TEST_CASE("substitute_one sets a variable to one and drops it") {
    // x^2 z + y z^2 + x with z := 1 becomes x^2 + y + x
    MultiPoly p = from_terms(3, {{{2, 0, 1}, 1}, {{0, 1, 2}, 1}, {{1, 0, 0}, 1}});
    CHECK(p.substitute_one(2) == from_terms(2, {{{2, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 1}}));

    // merging: xz + x collapses onto 2x
    MultiPoly m = from_terms(3, {{{1, 0, 1}, 1}, {{1, 0, 0}, 1}});
    CHECK(m.substitute_one(2) == from_terms(2, {{{1, 0}, 2}}));

    CHECK_THROWS_AS(MultiPoly::variable(1, 0).substitute_one(0), DomainError);
}

TEST_CASE("homogenization round trip") {
    // second coordinate of the standard degree-2 shift-like map
    MultiPoly p = from_terms(2, {{{0, 2}, 1}, {{1, 0}, 1}});  // y^2 + x
    HomogPoly h = homogenize(p, 2);
    CHECK(h.degree() == 2);
    CHECK(h.affine_vars() == 2);
    CHECK(h.poly() == from_terms(3, {{{0, 2, 0}, 1}, {{1, 0, 1}, 1}}));
    CHECK(h.dehomogenized() == p);

    HomogPoly padded = homogenize(p, 4);
    CHECK(padded.degree() == 4);
    CHECK(padded.dehomogenized() == p);

    CHECK_THROWS_AS(homogenize(p, 1), DomainError);
    CHECK_THROWS_AS(homogenize(MultiPoly::zero(2), 3), DomainError);
    CHECK_THROWS_AS(HomogPoly(p + var(2, 0)), DomainError);
}

TEST_CASE("t-adic valuation and division by t") {
    // yt in chart coordinates (x, y, t)
    HomogPoly yt(from_terms(3, {{{0, 1, 1}, 1}}));
    CHECK(t_adic_valuation(yt) == 1);
    CHECK(yt.divided_by_t(1).poly() == from_terms(3, {{{0, 1, 0}, 1}}));
    CHECK_THROWS_AS(yt.divided_by_t(2), DomainError);

    HomogPoly mixed(from_terms(3, {{{0, 2, 0}, 1}, {{1, 0, 1}, 1}}));
    CHECK(t_adic_valuation(mixed) == 0);

    HomogPoly t2(from_terms(3, {{{0, 0, 2}, 1}}));
    CHECK(t_adic_valuation(t2) == 2);
}

TEST_CASE("vanishing order at a point") {
    MultiPoly x = var(2, 0), y = var(2, 1);
    std::vector<GaussianRational> origin = {GaussianRational(), GaussianRational()};
    CHECK(vanishing_order(x * x + y, origin) == 1);
    CHECK(vanishing_order((x - y) * (x - y),
                          {GaussianRational::integer(2), GaussianRational::integer(2)}) == 2);
    CHECK(vanishing_order(MultiPoly::constant(2, 5L), origin) == 0);
    CHECK(vanishing_order(x * x + y,
                          {GaussianRational::integer(1), GaussianRational::integer(-1)}) == 1);
    CHECK_THROWS_AS(vanishing_order(MultiPoly::zero(2), origin), DomainError);
}

TEST_CASE("term ceiling aborts oversized products") {
    MultiPoly p = from_terms(2, {{{1, 0}, 1}, {{0, 1}, 1}, {{0, 0}, 1}});
    CHECK_THROWS_AS(mul(p, p, 3), TermLimitExceeded);
    CHECK(mul(p, p, 6).term_count() == 6);
    CHECK_THROWS_AS(compose(p, {p, p}, 2), TermLimitExceeded);
}

TEST_CASE("mixed domains are rejected") {
    MultiPoly e = var(2, 0);
    MultiPoly a = MultiPoly::variable(2, 0, Domain::approx);
    CHECK_THROWS_AS(e + a, DomainError);
    CHECK_THROWS_AS(e * a, DomainError);
    CHECK_THROWS_AS(Coefficient::approx({std::nan(""), 0.0}), DomainError);
    CHECK_THROWS_AS(t_adic_valuation(HomogPoly(
                        MultiPoly::variable(3, 0, Domain::approx))),
                    DomainError);
}

TEST_CASE("rendering uses conventional variable names") {
    MultiPoly x = var(3, 0), y = var(3, 1), z = var(3, 2);
    MultiPoly p = x * x - y + z.scaled(q(1, 2));
    std::string s = p.to_string();
    CHECK(s.find("x^2") != std::string::npos);
    CHECK(s.find("y") != std::string::npos);
    CHECK(default_var_names(3, false) == std::vector<std::string>{"x", "y", "z"});
    CHECK(default_var_names(3, true) == std::vector<std::string>{"x", "y", "t"});
}
