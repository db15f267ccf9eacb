#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "polydyn/errors.hpp"
#include "polydyn/escape_regions.hpp"
#include "polydyn/modline.hpp"

#include "classify_fixtures.hpp"

using namespace polydyn;

namespace {

using Cx = std::complex<double>;

RegionParams half_b() { return RegionParams{}; }  // a = 1, b = 1/2, c = c' = 0

RegionParams skew_params() {
    RegionParams q;
    q.a = {2.0, -1.0};
    q.b = {0.3, 0.4};  // |b| = 1/2 again but off-axis
    q.c = {1.0, 1.0};
    q.c_prime = {-2.0, 0.0};
    return q;
}

bool contains(const std::string& text, const std::string& piece) {
    return text.find(piece) != std::string::npos;
}

// max(A,B) > max(C,D) expanded into comparisons only; exact in floats
bool pair_exceeds(double a, double b, double c, double d) {
    return (a > c && a > d) || (b > c && b > d);
}

RegionMembership reference_membership(const SpacePoint& p, const RegionParams& q) {
    double alpha = q.alpha();
    double root = std::cbrt(q.R);
    double ax = std::abs(p[0]), ay = std::abs(p[1]), az = std::abs(p[2]);
    RegionMembership m;
    m.in_v = pair_exceeds(2.0 * alpha * ay, az, 2.0 * q.R, root * ax);
    m.in_w = pair_exceeds(alpha * ay, ax, q.R, root * std::abs(p[0] - p[2]));
    return m;
}

Cx random_coord(SplitMix64& rng, double lo_mag, double hi_mag) {
    double mag = lo_mag * std::pow(hi_mag / lo_mag, rng.next_unit());
    return std::polar(mag, 6.283185307179586 * rng.next_unit());
}

}  // namespace

TEST_CASE("derived parameters recompute from the coefficients") {
    RegionParams q = half_b();
    CHECK(q.alpha() == doctest::Approx(0.125).epsilon(1e-15));
    REQUIRE(q.epsilon().has_value());
    // largest eps with 1/2 < (1-2e)/(1+e) is 0.2, kept at 90%
    CHECK(*q.epsilon() == doctest::Approx(0.18).epsilon(1e-12));

    RegionParams s = skew_params();
    CHECK(std::abs(s.b) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.alpha() == doctest::Approx(0.5 / (4.0 * std::sqrt(5.0))).epsilon(1e-14));
    CHECK(*s.epsilon() == doctest::Approx(0.18).epsilon(1e-12));

    RegionParams unit = half_b();
    unit.b = {0.0, 1.0};
    CHECK_FALSE(unit.epsilon().has_value());
    unit.b = {2.0, 0.0};
    CHECK_FALSE(unit.epsilon().has_value());

    RegionParams bad = half_b();
    bad.a = {0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), CoefficientDegeneracy);
    CHECK_THROWS_AS(bad.alpha(), CoefficientDegeneracy);
    bad = half_b();
    bad.b = {0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), CoefficientDegeneracy);
    bad = half_b();
    bad.R = 1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionFailed);
    bad.R = 0.5;
    CHECK_THROWS_AS(bad.epsilon(), PreconditionFailed);
}

TEST_CASE("membership matches hand-checked points") {
    RegionParams q = half_b();
    q.R = 10.0;

    SpacePoint big_y = {Cx{0.0}, Cx{1000.0}, Cx{0.0}};
    RegionMembership m = region_membership(big_y, q);
    CHECK(m.in_v);  // 2*(1/8)*1000 = 250 > max(20, 0)
    CHECK(m.in_w);  // (1/8)*1000 = 125 > max(10, 0)

    SpacePoint origin = {Cx{0.0}, Cx{0.0}, Cx{0.0}};
    m = region_membership(origin, q);
    CHECK_FALSE(m.in_v);
    CHECK_FALSE(m.in_w);

    SpacePoint diagonal = {Cx{1000.0}, Cx{0.0}, Cx{1000.0}};
    m = region_membership(diagonal, q);
    CHECK_FALSE(m.in_v);  // |z| = 1000 < 10^{1/3} * 1000
    CHECK(m.in_w);        // |x| = 1000 > max(10, 0) since x - z = 0

    // the inequalities are strict, so a point exactly on the level is outside
    SpacePoint boundary = {Cx{0.0}, Cx{0.0}, Cx{20.0}};
    CHECK_FALSE(region_membership(boundary, q).in_v);
}

TEST_CASE("membership agrees with an independent predicate") {
    SplitMix64 rng(0x1234abcdULL);
    std::vector<RegionParams> pool;
    pool.push_back(half_b());
    pool.push_back(skew_params());
    RegionParams wide = half_b();
    wide.a = {0.01, 0.0};
    wide.b = {3.0, 0.0};  // membership itself has no |b| < 1 requirement
    pool.push_back(wide);

    int inside_v = 0, inside_w = 0;
    for (int i = 0; i < 10000; ++i) {
        RegionParams q = pool[rng.next() % pool.size()];
        q.R = 1.5 * std::pow(1e6 / 1.5, rng.next_unit());
        SpacePoint p = {random_coord(rng, 1e-2, 1e8), random_coord(rng, 1e-2, 1e8),
                        random_coord(rng, 1e-2, 1e8)};
        RegionMembership got = region_membership(p, q);
        RegionMembership want = reference_membership(p, q);
        REQUIRE(got.in_v == want.in_v);
        REQUIRE(got.in_w == want.in_w);
        inside_v += got.in_v;
        inside_w += got.in_w;
    }
    CHECK(inside_v > 100);  // the draw box straddles the levels
    CHECK(inside_w > 100);
}

TEST_CASE("regions shrink as the level grows") {
    SplitMix64 rng(99ULL);
    RegionParams lo = half_b(), hi = half_b();
    int witnessed = 0;
    for (int i = 0; i < 4000; ++i) {
        lo.R = 10.0 * std::pow(100.0, rng.next_unit());
        hi.R = lo.R * (1.0 + 9.0 * rng.next_unit());
        SpacePoint p = {random_coord(rng, 1e-1, 1e7), random_coord(rng, 1e-1, 1e7),
                        random_coord(rng, 1e-1, 1e7)};
        RegionMembership at_hi = region_membership(p, hi);
        RegionMembership at_lo = region_membership(p, lo);
        if (at_hi.in_v) REQUIRE(at_lo.in_v);
        if (at_hi.in_w) REQUIRE(at_lo.in_w);
        witnessed += at_hi.in_v || at_hi.in_w;
    }
    CHECK(witnessed > 100);
}

TEST_CASE("numeric image and preimage match the exact map") {
    // (x^2 - xz + 1 + y, 2z, x/2 + 3), inverse verified symbolically at
    // construction
    PolyAutomorphism exact = fixtures::class4_map();
    RegionParams q;
    q.a = {2.0, 0.0};
    q.b = {0.5, 0.0};
    q.c = {1.0, 0.0};
    q.c_prime = {3.0, 0.0};

    SplitMix64 rng(2026ULL);
    for (int i = 0; i < 50; ++i) {
        SpacePoint p = {random_coord(rng, 1e-2, 1e3), random_coord(rng, 1e-2, 1e3),
                        random_coord(rng, 1e-2, 1e3)};
        std::vector<Cx> vec = {p[0], p[1], p[2]};
        SpacePoint image = class4_image(q, p);
        SpacePoint pre = class4_preimage(q, p);
        for (int k = 0; k < 3; ++k) {
            Cx want_fwd = exact.forward_components()[k].eval_complex(vec);
            Cx want_inv = exact.inverse_components()[k].eval_complex(vec);
            CHECK(std::abs(image[k] - want_fwd) <=
                  1e-12 * std::max(1.0, std::abs(want_fwd)));
            CHECK(std::abs(pre[k] - want_inv) <=
                  1e-12 * std::max(1.0, std::abs(want_inv)));
        }
        SpacePoint round_trip = class4_image(q, pre);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(round_trip[k] - p[k]) <= 1e-9 * std::max(1.0, std::abs(p[k])));
    }
}

TEST_CASE("honest inclusion runs stay violation-free") {
    InclusionReport report = verify_inclusions(half_b(), 1e4, 100000, 42ULL);
    CHECK(report.checked == 200000);
    CHECK(report.violations.empty());

    report = verify_inclusions(half_b(), 1e6, 20000, 42ULL);
    CHECK(report.violations.empty());

    report = verify_inclusions(skew_params(), 1e4, 50000, 42ULL);
    CHECK(report.checked == 100000);
    CHECK(report.violations.empty());
}

TEST_CASE("corrupted control surfaces violations") {
    RegionParams q = half_b();
    const double level = 1e4;
    InclusionReport report = verify_inclusions(q, level, 20000, 42ULL, true);
    REQUIRE(!report.violations.empty());

    const InclusionViolation& v = report.violations.front();
    CHECK((v.source == 'V' || v.source == 'W'));
    CHECK(v.sample_index >= 0);
    CHECK(v.sample_index < 20000);

    // the sampled point really lies in its left-hand region at the base level
    RegionParams at_level = q;
    at_level.R = level;
    RegionMembership src = region_membership(v.point, at_level);
    CHECK((v.source == 'V' ? src.in_v : src.in_w));

    // and the recorded preimage misses the doubled right-hand union
    RegionParams doubled = q;
    doubled.R = 4.0 * level;
    RegionParams stretched = q;
    stretched.R = 2.0 * (1.0 + *q.epsilon()) * level;
    bool hit_v = region_membership(v.preimage, doubled).in_v;
    bool hit_w = v.source == 'V' ? region_membership(v.preimage, doubled).in_w
                                 : region_membership(v.preimage, stretched).in_w;
    CHECK_FALSE(hit_v);
    CHECK_FALSE(hit_w);
}

TEST_CASE("reports are reproducible across runs") {
    InclusionReport a = verify_inclusions(half_b(), 1e4, 5000, 7ULL, true);
    InclusionReport b = verify_inclusions(half_b(), 1e4, 5000, 7ULL, true);
    REQUIRE(a.violations.size() == b.violations.size());
    REQUIRE(!a.violations.empty());
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
        CHECK(a.violations[i].source == b.violations[i].source);
        CHECK(a.violations[i].sample_index == b.violations[i].sample_index);
        CHECK(a.violations[i].point == b.violations[i].point);
        CHECK(a.violations[i].preimage == b.violations[i].preimage);
    }

    InclusionReport c = verify_inclusions(half_b(), 1e4, 5000, 8ULL, true);
    bool same = a.violations.size() == c.violations.size();
    if (same)
        for (std::size_t i = 0; i < a.violations.size(); ++i)
            same = same && a.violations[i].sample_index == c.violations[i].sample_index;
    CHECK_FALSE(same);
}

TEST_CASE("small levels run and the working level is clean") {
    // the inclusion proof needs R large relative to the coefficients; small
    // levels may show violations and are only recorded here
    std::vector<double> levels = {2.0, 10.0, 100.0, 1e4};
    std::vector<std::size_t> counts;
    for (double level : levels) {
        InclusionReport report = verify_inclusions(half_b(), level, 2000, 1ULL);
        CHECK(report.checked == 4000);
        counts.push_back(report.violations.size());
    }
    CHECK(counts.back() == 0);
}

TEST_CASE("invariant line certificate") {
    auto grq = [](long num, long den = 1) {
        return GaussianRational(make_rational(num, den), Rational(0));
    };
    GaussianRational zero = grq(0);

    InvariantLineReport rep = invariant_line_check(grq(1), grq(1), zero, zero);
    CHECK(rep.applicable);
    CHECK(rep.verified);
    CHECK(contains(rep.note, "(w, b w, w)"));
    CHECK(contains(rep.note, "not attracting"));

    rep = invariant_line_check(grq(4), grq(2), zero, zero);
    CHECK(rep.applicable);
    CHECK(rep.verified);
    CHECK(contains(rep.note, "not attracting"));

    rep = invariant_line_check(grq(1, 4), grq(-1, 2), zero, zero);
    CHECK(rep.applicable);
    CHECK(rep.verified);
    CHECK_FALSE(contains(rep.note, "not attracting"));  // |b| < 1 proves nothing

    GaussianRational imag_unit(Rational(0), Rational(1));
    rep = invariant_line_check(grq(-1), imag_unit, zero, zero);
    CHECK(rep.applicable);  // i^2 = -1
    CHECK(rep.verified);
    CHECK(contains(rep.note, "not attracting"));

    CHECK_FALSE(invariant_line_check(grq(1), grq(1), grq(1), zero).applicable);
    CHECK_FALSE(invariant_line_check(grq(1), grq(1), zero, grq(5)).applicable);
    CHECK_FALSE(invariant_line_check(grq(1), grq(2), zero, zero).applicable);
}

TEST_CASE("inputs outside the contract are rejected") {
    RegionParams unit = half_b();
    unit.b = {1.0, 0.0};
    CHECK_THROWS_AS(verify_inclusions(unit, 1e4, 10, 1ULL), PreconditionFailed);
    unit.b = {0.0, 1.0};
    CHECK_THROWS_AS(verify_inclusions(unit, 1e4, 10, 1ULL), PreconditionFailed);

    CHECK_THROWS_AS(verify_inclusions(half_b(), 1e4, -1, 1ULL), PreconditionFailed);
    CHECK_THROWS_AS(verify_inclusions(half_b(), 1.0, 10, 1ULL), PreconditionFailed);

    RegionParams degenerate = half_b();
    degenerate.a = {0.0, 0.0};
    CHECK_THROWS_AS(verify_inclusions(degenerate, 1e4, 10, 1ULL), CoefficientDegeneracy);
    SpacePoint p = {Cx{1.0}, Cx{1.0}, Cx{1.0}};
    CHECK_THROWS_AS(class4_image(degenerate, p), CoefficientDegeneracy);
    CHECK_THROWS_AS(class4_preimage(degenerate, p), CoefficientDegeneracy);

    InclusionReport empty = verify_inclusions(half_b(), 1e4, 0, 1ULL);
    CHECK(empty.checked == 0);
    CHECK(empty.violations.empty());
}
