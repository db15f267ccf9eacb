#include "polydyn/automorphism.hpp"

#include <algorithm>
#include <limits>

#include "polydyn/errors.hpp"
#include "polydyn/modline.hpp"
#include "polydyn/poly_io.hpp"

namespace polydyn {

namespace {

constexpr std::uint64_t kLineSeedA = 0x706f6c796479616cULL;
constexpr std::uint64_t kLineSeedB = 0x64656772656532ULL;
constexpr std::uint64_t kGenericPointSeed = 0x67656e7074ULL;

int max_component_degree(const std::vector<MultiPoly>& comps) {
    int best = 0;
    for (const MultiPoly& c : comps) {
        auto d = c.total_degree();
        if (d) best = std::max(best, *d);
    }
    return best;
}

}  // namespace

std::vector<MultiPoly> identity_components(int k) {
    std::vector<MultiPoly> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) out.push_back(MultiPoly::variable(k, i));
    return out;
}

std::vector<MultiPoly> compose_map(const std::vector<MultiPoly>& outer,
                                   const std::vector<MultiPoly>& inner,
                                   std::size_t term_limit) {
    std::vector<MultiPoly> out;
    out.reserve(outer.size());
    for (const MultiPoly& comp : outer) out.push_back(compose(comp, inner, term_limit));
    return out;
}

PolyAutomorphism::PolyAutomorphism(std::vector<MultiPoly> forward,
                                   std::vector<MultiPoly> inverse)
    : k_(static_cast<int>(forward.size())),
      forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      cache_(std::make_shared<IterateCache>()) {
    if (k_ == 0) throw DomainError("automorphism needs at least one component");
    if (static_cast<int>(inverse_.size()) != k_)
        throw DomainError("forward and inverse component counts differ");
    for (const MultiPoly& c : forward_) {
        if (c.num_vars() != k_)
            throw DomainError("component variable count does not match the dimension");
        if (c.domain() != Domain::exact)
            throw DomainError("automorphism components must use the exact domain");
    }
    for (const MultiPoly& c : inverse_) {
        if (c.num_vars() != k_)
            throw DomainError("component variable count does not match the dimension");
        if (c.domain() != Domain::exact)
            throw DomainError("automorphism components must use the exact domain");
    }

    std::vector<MultiPoly> id = identity_components(k_);
    std::vector<MultiPoly> left = compose_map(inverse_, forward_);
    for (int j = 0; j < k_; ++j)
        if (left[j] != id[j])
            throw InverseMismatch("inverse(forward) is not the identity", j);
    std::vector<MultiPoly> right = compose_map(forward_, inverse_);
    for (int j = 0; j < k_; ++j)
        if (right[j] != id[j])
            throw InverseMismatch("forward(inverse) is not the identity", j);

    lambda_ = max_component_degree(forward_);
    lambda_inverse_ = max_component_degree(inverse_);
}

const std::vector<MultiPoly>& PolyAutomorphism::iterate(int n, Direction dir,
                                                        std::size_t term_limit) const {
    if (n < 0) throw PreconditionFailed("iterate index must be nonnegative");
    int d = dir == Direction::forward ? 0 : 1;
    std::scoped_lock lock(cache_->mu);
    auto& memo = cache_->memo;
    if (memo.find({d, 0}) == memo.end()) memo[{d, 0}] = identity_components(k_);
    if (memo.find({d, 1}) == memo.end()) memo[{d, 1}] = components(dir);

    auto found = memo.find({d, n});
    if (found != memo.end()) return found->second;

    int have = n;
    while (memo.find({d, have}) == memo.end()) --have;
    const std::vector<MultiPoly>& base = components(dir);
    std::vector<MultiPoly> acc = memo[{d, have}];
    for (int m = have + 1; m <= n; ++m) {
        acc = compose_map(base, acc, term_limit);
        memo[{d, m}] = acc;
    }
    return memo[{d, n}];
}

nlohmann::json automorphism_to_json(const PolyAutomorphism& f) {
    nlohmann::json fwd = nlohmann::json::array();
    nlohmann::json inv = nlohmann::json::array();
    for (const MultiPoly& c : f.forward_components()) fwd.push_back(poly_to_json(c));
    for (const MultiPoly& c : f.inverse_components()) inv.push_back(poly_to_json(c));
    return nlohmann::json{{"k", f.dimension()}, {"forward", std::move(fwd)},
                          {"inverse", std::move(inv)}};
}

PolyAutomorphism automorphism_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("k") || !j.contains("forward") || !j.contains("inverse"))
        throw InputError("automorphism needs 'k', 'forward' and 'inverse' fields");
    int k = j["k"].get<int>();
    if (k < 1) throw InputError("automorphism dimension must be positive");
    auto read_tuple = [&](const nlohmann::json& arr, const char* which) {
        if (!arr.is_array() || static_cast<int>(arr.size()) != k)
            throw InputError(std::string("'") + which + "' must list exactly k polynomials");
        std::vector<MultiPoly> out;
        for (const auto& entry : arr) {
            MultiPoly p = poly_from_json(entry);
            if (p.num_vars() != k)
                throw InputError(std::string("'") + which +
                                 "' component variable count does not match k");
            out.push_back(std::move(p));
        }
        return out;
    };
    return {read_tuple(j["forward"], "forward"), read_tuple(j["inverse"], "inverse")};
}

ProjectivePoint::ProjectivePoint(std::vector<GaussianRational> coords)
    : coords_(std::move(coords)) {
    if (coords_.size() < 2) throw DomainError("projective point needs at least two coordinates");
    auto lead = std::find_if(coords_.begin(), coords_.end(),
                             [](const GaussianRational& c) { return !c.is_zero(); });
    if (lead == coords_.end()) throw DomainError("projective point cannot be the zero tuple");
    GaussianRational inv = lead->inverse();
    for (GaussianRational& c : coords_) c = c * inv;
}

std::string ProjectivePoint::to_string() const {
    std::string out = "[";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (i) out += ":";
        out += coords_[i].to_string();
    }
    return out + "]";
}

ReducedLift reduced_lift(const PolyAutomorphism& f, int n, Direction dir,
                         std::size_t term_limit) {
    if (n < 1) throw PreconditionFailed("reduced lift needs n >= 1");
    const std::vector<MultiPoly>& comps = f.iterate(n, dir, term_limit);
    int deg = max_component_degree(comps);
    int prev_deg =
        n == 1 ? 1 : max_component_degree(f.iterate(n - 1, dir, term_limit));

    int k = f.dimension();
    ReducedLift out;
    out.degree = deg;
    out.dropped = f.first_degree(dir) * prev_deg - deg;
    out.components.reserve(k + 1);
    for (const MultiPoly& c : comps) out.components.push_back(homogenize(c, deg));
    MultiPoly t_power(k + 1, Domain::exact);
    Monomial mono(k + 1, 0);
    mono[k] = deg;
    t_power.set_term(mono, Coefficient::exact(GaussianRational::integer(1)));
    out.components.emplace_back(std::move(t_power));
    return out;
}

long long DegreeSequence::value(int n) const {
    if (n == 0) return 1;
    if (n < 1 || n > size()) throw PreconditionFailed("degree sequence index out of range");
    return degrees[n - 1];
}

DegreeSequence degree_sequence(const PolyAutomorphism& f, int N, Direction dir,
                               std::size_t symbolic_budget) {
    if (N < 1) throw PreconditionFailed("degree sequence needs N >= 1");
    const long long lambda = f.first_degree(dir);

    DegreeSequence out;
    out.direction = dir;
    out.requested = N;

    LineDegreeTracker tracker_a(f.components(dir), kLineSeedA);
    LineDegreeTracker tracker_b(f.components(dir), kLineSeedB);
    const bool trackers_ok = tracker_a.valid() && tracker_b.valid();

    bool symbolic = true;
    long long prev = 1;
    for (int n = 1; n <= N; ++n) {
        if (trackers_ok) {
            tracker_a.advance();
            tracker_b.advance();
        }
        long long degree = -1;
        DegreeComputation how = DegreeComputation::symbolic;
        if (symbolic) {
            try {
                degree = max_component_degree(f.iterate(n, dir, symbolic_budget));
            } catch (const TermLimitExceeded&) {
                symbolic = false;
            }
        }
        if (degree < 0) {
            if (prev > (1LL << 60) / lambda)
                throw DomainError("iterate degree exceeds the representable range");
            long long upper = lambda * prev;
            long long lower =
                trackers_ok ? std::max(tracker_a.degree(), tracker_b.degree()) : -1;
            if (lower == upper) {
                degree = upper;
                how = DegreeComputation::certified;
            } else {
                // bounds stayed open: one symbolic attempt at the full ceiling
                try {
                    degree = max_component_degree(f.iterate(n, dir));
                    symbolic = true;
                } catch (const TermLimitExceeded&) {
                    out.truncated = true;
                    break;
                }
            }
        }
        out.degrees.push_back(degree);
        out.computed_by.push_back(how);
        prev = degree;
    }
    if (out.degrees.empty())
        throw TermLimitExceeded("no iterate degree could be computed within the term ceiling");
    return out;
}

DegreeEstimate dynamical_degree_estimate(const DegreeSequence& seq) {
    return dynamical_degree_estimate(seq.degrees);
}

InfinityImage infinity_image(const PolyAutomorphism& f, Direction dir) {
    const int lambda = f.first_degree(dir);
    if (lambda < 2)
        throw PreconditionFailed("the extension of a degree-1 map has no blow-down at infinity");
    const std::vector<MultiPoly>& comps = f.components(dir);
    const int k = f.dimension();

    std::vector<MultiPoly> tops;
    tops.reserve(k);
    bool any = false;
    for (const MultiPoly& c : comps) {
        MultiPoly top = homogeneous_part(c, lambda);
        any = any || !top.is_zero();
        tops.push_back(std::move(top));
    }
    if (!any) throw DomainError("all top-degree parts vanish; first degree is inconsistent");

    InfinityImage out;

    // common monomial factor across the nonzero top parts
    Monomial content(k, std::numeric_limits<int>::max());
    for (const MultiPoly& top : tops) {
        if (top.is_zero()) continue;
        Monomial local(k, std::numeric_limits<int>::max());
        for (const auto& [mono, coeff] : top.terms())
            for (int i = 0; i < k; ++i) local[i] = std::min(local[i], mono[i]);
        for (int i = 0; i < k; ++i) content[i] = std::min(content[i], local[i]);
    }
    if (monomial_degree(content) > 0) {
        MultiPoly factor = MultiPoly::term(content, Coefficient::exact(GaussianRational::integer(1)));
        out.note = "top-degree parts share the common factor " +
                   factor.to_string(default_var_names(k));
    }

    // candidate image from a deterministic generic point, cross-checked on a
    // second draw; the symbolic minor identities below are the authority
    SplitMix64 rng(kGenericPointSeed);
    auto draw_candidate = [&]() -> std::optional<std::vector<GaussianRational>> {
        std::vector<GaussianRational> z;
        z.reserve(k);
        for (int i = 0; i < k; ++i) {
            long num = 1 + static_cast<long>(rng.next() % 997);
            long den = 1 + static_cast<long>(rng.next() % 31);
            z.emplace_back(make_rational(num, den));
        }
        std::vector<GaussianRational> c;
        c.reserve(k);
        bool nonzero = false;
        for (const MultiPoly& top : tops) {
            c.push_back(top.is_zero() ? GaussianRational() : top.eval_exact(z));
            nonzero = nonzero || !c.back().is_zero();
        }
        if (!nonzero) return std::nullopt;
        return c;
    };

    std::optional<std::vector<GaussianRational>> candidate;
    for (int attempt = 0; attempt < 4 && !candidate; ++attempt) candidate = draw_candidate();
    if (!candidate) return out;  // tops share a zero at every draw: treated as non-constant

    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            MultiPoly lhs = tops[i].scaled(Coefficient::exact((*candidate)[j]));
            MultiPoly rhs = tops[j].scaled(Coefficient::exact((*candidate)[i]));
            if (lhs != rhs) return out;
        }
    }

    auto second = draw_candidate();
    if (second) {
        std::vector<GaussianRational> a = *candidate, b = *second;
        a.emplace_back(Rational(0));
        b.emplace_back(Rational(0));
        if (ProjectivePoint(a) != ProjectivePoint(b))
            return out;  // draws disagree: genericity failed, stay conservative
    }

    std::vector<GaussianRational> coords = *candidate;
    coords.emplace_back(Rational(0));
    out.point = ProjectivePoint(std::move(coords));
    return out;
}

bool indeterminacy_membership(const PolyAutomorphism& f, const ProjectivePoint& p,
                              Direction dir) {
    if (p.coordinate_count() != f.dimension() + 1)
        throw PreconditionFailed("point dimension does not match the automorphism");
    if (!p.at_infinity())
        throw PreconditionFailed("indeterminacy test expects a point at infinity");
    const int lambda = f.first_degree(dir);
    std::vector<GaussianRational> finite(p.coords().begin(), p.coords().end() - 1);
    for (const MultiPoly& c : f.components(dir)) {
        MultiPoly top = homogeneous_part(c, lambda);
        if (top.is_zero()) continue;
        if (!top.eval_exact(finite).is_zero()) return false;
    }
    return true;
}

DegreeEstimate second_dynamical_degree(const PolyAutomorphism& f, int N) {
    if (f.dimension() == 2) {
        DegreeEstimate est;
        est.exact = true;
        est.value = QuadraticSurd::rational(Rational(1));
        est.approx = 1.0;
        est.method = "recurrence";
        est.recurrence = {1};
        return est;
    }
    if (f.dimension() == 3)
        return dynamical_degree_estimate(degree_sequence(f, N, Direction::inverse));
    throw UnsupportedDimension(
        "second dynamical degree is only available in dimensions 2 and 3");
}

}  // namespace polydyn
