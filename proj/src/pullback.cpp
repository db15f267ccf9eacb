#include "polydyn/pullback.hpp"

#include <optional>

#include "polydyn/errors.hpp"
#include "polydyn/poly_io.hpp"

namespace polydyn {

namespace {

long long checked_power(long long base, int exp) {
    long long v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > (1LL << 60) / base)
            throw DomainError("lambda^n exceeds the representable range");
        v *= base;
    }
    return v;
}

void require_stable(const PolyAutomorphism& f, int horizon) {
    if (horizon < 1) return;
    DegreeSequence seq = degree_sequence(f, horizon);
    long long expected = 1;
    const long long lambda = f.first_degree();
    for (int n = 1; n <= seq.size(); ++n) {
        expected *= lambda;
        if (seq.degrees[n - 1] != expected)
            throw StabilityViolation(
                "first algebraic degree drops at iterate " + std::to_string(n) +
                " (" + std::to_string(seq.degrees[n - 1]) + " < " +
                std::to_string(expected) + "); the [t=0] mass accounting needs stability");
    }
    if (seq.truncated)
        throw TermLimitExceeded("stability check did not reach the requested horizon");
}

std::vector<MultiPoly> lift_polys(const PolyAutomorphism& f, std::size_t term_limit) {
    ReducedLift lift = reduced_lift(f, 1, Direction::forward, term_limit);
    std::vector<MultiPoly> out;
    out.reserve(lift.components.size());
    for (const HomogPoly& h : lift.components) out.push_back(h.poly());
    return out;
}

}  // namespace

Divisor::Divisor(HomogPoly form) : form_(std::move(form)) {
    if (form_.poly().domain() != Domain::exact)
        throw DomainError("divisors require the exact domain");
    const Coefficient& lead = form_.poly().terms().rbegin()->second;
    GaussianRational inv = lead.exact_value().inverse();
    if (!inv.is_one()) form_ = HomogPoly(form_.poly().scaled(Coefficient::exact(inv)));
}

nlohmann::json divisor_to_json(const Divisor& s) {
    return nlohmann::json{{"h", poly_to_json(s.form().poly())}, {"degree", s.degree()}};
}

Divisor divisor_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("h"))
        throw InputError("divisor needs a defining form 'h'");
    MultiPoly h = poly_from_json(j["h"]);
    HomogPoly form(std::move(h));
    if (j.contains("degree") && j["degree"].get<int>() != form.degree())
        throw InputError("divisor 'degree' disagrees with the defining form");
    return Divisor(std::move(form));
}

HomogPoly pullback_divisor(const PolyAutomorphism& f, const Divisor& s,
                           std::size_t term_limit) {
    if (s.ambient_vars() != f.dimension() + 1)
        throw DomainError("divisor lives in the wrong projective space");
    ReducedLift lift = reduced_lift(f, 1, Direction::forward, term_limit);
    if (lift.dropped != 0)
        throw StabilityViolation("lift of f drops a t-power; pullback degree accounting fails");
    std::vector<MultiPoly> maps;
    for (const HomogPoly& h : lift.components) maps.push_back(h.poly());
    return HomogPoly(compose(s.form().poly(), maps, term_limit));
}

std::vector<SiuDecomposition> siu_sequence(const PolyAutomorphism& f, const Divisor& s,
                                           int N, std::size_t term_limit) {
    if (N < 1) throw PreconditionFailed("siu_sequence needs N >= 1");
    if (s.ambient_vars() != f.dimension() + 1)
        throw DomainError("divisor lives in the wrong projective space");
    require_stable(f, N);

    const long long lambda = f.first_degree();
    const long long d = s.degree();
    std::vector<MultiPoly> lift = lift_polys(f, term_limit);

    std::vector<SiuDecomposition> out;
    long long m = t_adic_valuation(s.form());
    HomogPoly residual = s.form().divided_by_t(static_cast<int>(m));
    for (int n = 1; n <= N; ++n) {
        std::optional<MultiPoly> pulled;
        try {
            pulled = compose(residual.poly(), lift, term_limit);
        } catch (const TermLimitExceeded&) {
            break;  // return the completed prefix
        }
        HomogPoly pulled_form(std::move(*pulled));
        int v = t_adic_valuation(pulled_form);
        m = lambda * m + v;
        residual = pulled_form.divided_by_t(v);

        long long mass = d * checked_power(lambda, n);
        Rational c = make_rational(static_cast<long>(m), static_cast<long>(mass));
        if (c < 0 || c > 1) throw DomainError("t-multiplicity exceeds the total mass");
        out.push_back(SiuDecomposition{n, m, residual, std::move(c)});
    }
    if (out.empty())
        throw TermLimitExceeded("no Siu step completed within the term ceiling");
    return out;
}

CLimitResult c_limit(const PolyAutomorphism& f, const Divisor& s, int N) {
    std::vector<SiuDecomposition> seq = siu_sequence(f, s, N);
    const int have = static_cast<int>(seq.size());
    const int window = (have + 1) / 2;

    CLimitResult out;
    bool constant = true;
    for (int i = have - window; i < have; ++i)
        constant = constant && seq[i].c == seq[have - 1].c;
    if (constant) {
        out.lo = out.hi = seq[have - 1].c;
        out.stabilized = true;
    } else {
        out.lo = seq[have - 1].c;
        out.hi = Rational(1);
        out.stabilized = false;
    }
    return out;
}

LelongReport lelong_bound_check(const PolyAutomorphism& f, const Divisor& s, int n,
                                const std::vector<std::vector<GaussianRational>>& points) {
    if (n < 1) throw PreconditionFailed("lelong_bound_check needs n >= 1");
    std::vector<SiuDecomposition> seq = siu_sequence(f, s, n);
    if (static_cast<int>(seq.size()) < n)
        throw TermLimitExceeded("Siu sequence truncated before the requested step");
    const SiuDecomposition& step = seq[n - 1];
    MultiPoly residual_affine = step.residual.dehomogenized();
    MultiPoly divisor_affine = s.form().dehomogenized();

    LelongReport report;
    report.n = n;
    for (const auto& z : points) {
        if (static_cast<int>(z.size()) != f.dimension())
            throw PreconditionFailed("evaluation point has wrong dimension");
        LelongPointCheck entry;
        entry.point = z;

        std::vector<GaussianRational> image = z;
        for (int i = 0; i < n; ++i) {
            std::vector<GaussianRational> next;
            next.reserve(f.dimension());
            for (const MultiPoly& comp : f.forward_components())
                next.push_back(comp.eval_exact(image));
            image = std::move(next);
        }

        entry.residual_order = vanishing_order(residual_affine, z);
        entry.image_order = vanishing_order(divisor_affine, image);
        entry.equal = entry.residual_order == entry.image_order;
        entry.bound_ok = entry.residual_order <= s.degree();
        report.all_equal = report.all_equal && entry.equal;
        report.all_bounded = report.all_bounded && entry.bound_ok;
        report.points.push_back(std::move(entry));
    }
    return report;
}

bool transformation_rule_check(const PolyAutomorphism& f, const Divisor& s, int N) {
    if (N < 1) throw PreconditionFailed("transformation_rule_check needs N >= 1");
    Divisor pulled(pullback_divisor(f, s));
    std::vector<SiuDecomposition> base = siu_sequence(f, s, N + 1);
    std::vector<SiuDecomposition> shifted = siu_sequence(f, pulled, N);
    if (static_cast<int>(base.size()) < N + 1 || static_cast<int>(shifted.size()) < N)
        throw TermLimitExceeded("transformation rule horizon not reached");
    for (int n = 1; n <= N; ++n)
        if (shifted[n - 1].c != base[n].c) return false;
    return true;
}

PositivityReport positivity_criterion_check(const PolyAutomorphism& f, const Divisor& s,
                                            int N) {
    InfinityImage img = infinity_image(f);
    if (!img.constant())
        throw PreconditionFailed(
            "the image of the hyperplane at infinity is not a single point");

    const ProjectivePoint& xp = *img.point;
    const auto& coords = xp.coords();
    int lead = 0;
    while (coords[lead].is_zero()) ++lead;
    // affine chart around X+: set the leading coordinate to 1
    MultiPoly chart = s.form().poly().substitute_one(lead);
    std::vector<GaussianRational> chart_point;
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (static_cast<int>(i) != lead) chart_point.push_back(coords[i]);

    PositivityReport report{false, 0, false, c_limit(f, s, N), xp};
    report.mult_at_x_plus = vanishing_order(chart, chart_point);
    report.c_positive = report.limit.lo > 0;
    report.consistent = report.c_positive == (report.mult_at_x_plus > 0);
    return report;
}

}  // namespace polydyn
