#include "polydyn/classify3.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "polydyn/errors.hpp"

namespace polydyn {

namespace {

constexpr int kX = 0;
constexpr int kY = 1;
constexpr int kZ = 2;

using GR = GaussianRational;
using Matrix = std::vector<std::vector<GR>>;
using Translation = std::vector<GR>;

GR coeff_at(const MultiPoly& p, const Monomial& m) { return p.coeff(m).exact_value(); }

QuadraticSurd surd_int(long v) { return QuadraticSurd::rational(make_rational(v)); }

QuadraticSurd golden_ratio() { return {make_rational(1, 2), make_rational(1, 2), 5}; }

QuadraticSurd root_two() { return {make_rational(0), make_rational(1), 2}; }

bool depends_only_on(const MultiPoly& p, std::vector<int> allowed) {
    for (const auto& [mono, coeff] : p.terms()) {
        for (int var = 0; var < static_cast<int>(mono.size()); ++var) {
            if (mono[var] == 0) continue;
            if (std::find(allowed.begin(), allowed.end(), var) == allowed.end()) return false;
        }
    }
    return true;
}

MultiPoly drop_var_terms(const MultiPoly& p, int var) {
    MultiPoly out(p.num_vars(), p.domain());
    for (const auto& [mono, coeff] : p.terms()) {
        if (mono[var] == 0) out.set_term(mono, coeff);
    }
    return out;
}

// coefficient of var when it occurs only as the bare linear monomial;
// nullopt when var shows up inside any other term
std::optional<GR> bare_linear_slot(const MultiPoly& p, int var) {
    GR slot = GR::integer(0);
    for (const auto& [mono, coeff] : p.terms()) {
        if (mono[var] == 0) continue;
        if (mono[var] != 1 || monomial_degree(mono) != 1) return std::nullopt;
        slot = coeff.exact_value();
    }
    return slot;
}

// p == slope*var + intercept with no other variables involved
std::optional<std::pair<GR, GR>> affine_in(const MultiPoly& p, int var) {
    GR slope = GR::integer(0);
    GR intercept = GR::integer(0);
    for (const auto& [mono, coeff] : p.terms()) {
        int deg = monomial_degree(mono);
        if (deg == 0) {
            intercept = coeff.exact_value();
        } else if (deg == 1 && mono[var] == 1) {
            slope = coeff.exact_value();
        } else {
            return std::nullopt;
        }
    }
    if (slope.is_zero()) return std::nullopt;
    return std::make_pair(slope, intercept);
}

// one family shape, matched up to per-coordinate scaling and translation
struct FamilyShape {
    MapFamily family;
    bool strict = false;
    // quadratic slots, in the family's own naming
    MultiPoly p;  // the two-variable polynomial part of the first component
    MultiPoly q;  // the one-variable polynomial part of the second component
    GR first_slot;   // linear coefficient in the first component (a or a')
    GR second_slot;  // linear coefficient in the second component (1, B, or b)
    GR third_scale;  // linear coefficient of the last component
    GR third_shift;  // constant of the last component
};

// (P(x,z) + a'y, Q(x) + a z, b x + c'); strict means a = b = 1, c' = 0
std::optional<FamilyShape> match_h3(const std::vector<MultiPoly>& comps) {
    auto third = affine_in(comps[2], kX);
    if (!third) return std::nullopt;
    auto z_slot = bare_linear_slot(comps[1], kZ);
    if (!z_slot || z_slot->is_zero()) return std::nullopt;
    MultiPoly q = drop_var_terms(comps[1], kZ);
    if (!depends_only_on(q, {kX})) return std::nullopt;
    auto y_slot = bare_linear_slot(comps[0], kY);
    if (!y_slot || y_slot->is_zero()) return std::nullopt;
    MultiPoly p = drop_var_terms(comps[0], kY);
    if (!depends_only_on(p, {kX, kZ})) return std::nullopt;
    FamilyShape s{MapFamily::h3,
                  z_slot->is_one() && third->first.is_one() && third->second.is_zero(),
                  p,
                  q,
                  *y_slot,
                  *z_slot,
                  third->first,
                  third->second};
    return s;
}

// (P(x,y) + a z, Q(y) + B x, beta y + gamma); strict means B = beta = 1, gamma = 0
std::optional<FamilyShape> match_h4(const std::vector<MultiPoly>& comps) {
    auto third = affine_in(comps[2], kY);
    if (!third) return std::nullopt;
    auto x_slot = bare_linear_slot(comps[1], kX);
    if (!x_slot || x_slot->is_zero()) return std::nullopt;
    MultiPoly q = drop_var_terms(comps[1], kX);
    if (!depends_only_on(q, {kY})) return std::nullopt;
    auto z_slot = bare_linear_slot(comps[0], kZ);
    if (!z_slot || z_slot->is_zero()) return std::nullopt;
    MultiPoly p = drop_var_terms(comps[0], kZ);
    if (!depends_only_on(p, {kX, kY})) return std::nullopt;
    FamilyShape s{MapFamily::h4,
                  x_slot->is_one() && third->first.is_one() && third->second.is_zero(),
                  p,
                  q,
                  *z_slot,
                  *x_slot,
                  third->first,
                  third->second};
    return s;
}

// (P(x,y) + a z, Q(x) + b y, beta x + gamma); strict means beta = 1, gamma = 0
std::optional<FamilyShape> match_h5(const std::vector<MultiPoly>& comps) {
    auto third = affine_in(comps[2], kX);
    if (!third) return std::nullopt;
    auto y_slot = bare_linear_slot(comps[1], kY);
    if (!y_slot || y_slot->is_zero()) return std::nullopt;
    MultiPoly q = drop_var_terms(comps[1], kY);
    if (!depends_only_on(q, {kX})) return std::nullopt;
    auto z_slot = bare_linear_slot(comps[0], kZ);
    if (!z_slot || z_slot->is_zero()) return std::nullopt;
    MultiPoly p = drop_var_terms(comps[0], kZ);
    if (!depends_only_on(p, {kX, kY})) return std::nullopt;
    FamilyShape s{MapFamily::h5,
                  third->first.is_one() && third->second.is_zero(),
                  p,
                  q,
                  *z_slot,
                  *y_slot,
                  third->first,
                  third->second};
    return s;
}

// triangular shape (a x + P(y,z), b y + Q(z), c z + d): no degree asymmetry
bool match_elementary(const std::vector<MultiPoly>& comps) {
    if (!affine_in(comps[2], kZ)) return false;
    auto y_slot = bare_linear_slot(comps[1], kY);
    if (!y_slot || y_slot->is_zero()) return false;
    if (!depends_only_on(drop_var_terms(comps[1], kY), {kZ})) return false;
    auto x_slot = bare_linear_slot(comps[0], kX);
    if (!x_slot || x_slot->is_zero()) return false;
    return depends_only_on(drop_var_terms(comps[0], kX), {kY, kZ});
}

int map_degree(const std::vector<MultiPoly>& comps) {
    int deg = 0;
    for (const auto& c : comps) {
        deg = std::max(deg, c.total_degree().value_or(0));
    }
    return deg;
}

std::vector<MultiPoly> affine_components(const Matrix& m, const Translation& t) {
    int k = static_cast<int>(m.size());
    std::vector<MultiPoly> comps;
    comps.reserve(k);
    for (int i = 0; i < k; ++i) {
        MultiPoly c = MultiPoly::constant(k, t[i]);
        for (int j = 0; j < k; ++j) {
            if (m[i][j].is_zero()) continue;
            c = c + MultiPoly::variable(k, j).scaled(Coefficient::exact(m[i][j]));
        }
        comps.push_back(std::move(c));
    }
    return comps;
}

Matrix invert_matrix(Matrix m) {
    int k = static_cast<int>(m.size());
    Matrix inv(k, std::vector<GR>(k, GR::integer(0)));
    for (int i = 0; i < k; ++i) inv[i][i] = GR::integer(1);
    for (int col = 0; col < k; ++col) {
        int pivot = -1;
        for (int row = col; row < k; ++row) {
            if (!m[row][col].is_zero()) {
                pivot = row;
                break;
            }
        }
        if (pivot < 0) throw DomainError("coordinate change matrix is singular");
        std::swap(m[col], m[pivot]);
        std::swap(inv[col], inv[pivot]);
        GR scale = m[col][col].inverse();
        for (int j = 0; j < k; ++j) {
            m[col][j] = m[col][j] * scale;
            inv[col][j] = inv[col][j] * scale;
        }
        for (int row = 0; row < k; ++row) {
            if (row == col || m[row][col].is_zero()) continue;
            GR factor = m[row][col];
            for (int j = 0; j < k; ++j) {
                m[row][j] = m[row][j] - factor * m[col][j];
                inv[row][j] = inv[row][j] - factor * inv[col][j];
            }
        }
    }
    return inv;
}

Matrix diagonal(GR d0, GR d1, GR d2) {
    Matrix m(3, std::vector<GR>(3, GR::integer(0)));
    m[0][0] = std::move(d0);
    m[1][1] = std::move(d1);
    m[2][2] = std::move(d2);
    return m;
}

Translation shifts(GR t0, GR t1, GR t2) { return {std::move(t0), std::move(t1), std::move(t2)}; }

GR gr(long v) { return GR::integer(v); }

// h = (alpha x^2 + alpha' xz + alpha'' z^2 + c1 x + c2 z + c3 + a' y, z, x)
struct SpecialForm {
    GR alpha, alpha_p, alpha_pp, c1, c2, c3, a_prime;
};

SpecialForm read_special(const PolyAutomorphism& h) {
    const auto& comps = h.forward_components();
    if (comps[1] != MultiPoly::variable(3, kZ) || comps[2] != MultiPoly::variable(3, kX)) {
        throw DomainError("reduced map lost the coordinate-shift shape");
    }
    static const std::vector<Monomial> allowed = {
        {2, 0, 0}, {1, 0, 1}, {0, 0, 2}, {1, 0, 0}, {0, 0, 1}, {0, 0, 0}, {0, 1, 0}};
    for (const auto& [mono, coeff] : comps[0].terms()) {
        if (std::find(allowed.begin(), allowed.end(), mono) == allowed.end()) {
            throw DomainError("reduced first component has a term outside the expected shape");
        }
    }
    SpecialForm s{coeff_at(comps[0], {2, 0, 0}), coeff_at(comps[0], {1, 0, 1}),
                  coeff_at(comps[0], {0, 0, 2}), coeff_at(comps[0], {1, 0, 0}),
                  coeff_at(comps[0], {0, 0, 1}), coeff_at(comps[0], {0, 0, 0}),
                  coeff_at(comps[0], {0, 1, 0})};
    if (s.a_prime.is_zero()) throw DomainError("reduced map has no linear middle coordinate");
    return s;
}

struct Pipeline {
    PolyAutomorphism original;
    MapFamily family;
    Direction dir = Direction::forward;
    std::vector<AffineChange> chain;
    PolyAutomorphism current;
    std::vector<std::string> notes;
    int depth;
};

struct ReportDraft {
    std::string label;
    TheoremOutcome outcome;
    QuadraticSurd nf_lambda_fwd;
    QuadraticSurd nf_lambda_inv;
    std::optional<SquareGrowth> square;
    std::optional<ProjectivePoint> x_plus;
    std::optional<ProjectivePoint> x_minus;
    std::optional<AttractingCondition> attracting;
    bool deferred = false;
    bool horizon = false;
};

// consumes the pipeline; pipe.current is the normal form by this point
ClassificationReport finish(Pipeline pipe, ReportDraft d) {
    bool flipped = pipe.dir == Direction::inverse;
    return ClassificationReport{std::move(pipe.original),
                                pipe.family,
                                std::move(d.label),
                                d.outcome,
                                pipe.dir,
                                std::move(pipe.chain),
                                std::move(pipe.current),
                                flipped ? d.nf_lambda_inv : d.nf_lambda_fwd,
                                flipped ? d.nf_lambda_fwd : d.nf_lambda_inv,
                                d.square,
                                std::move(d.x_plus),
                                std::move(d.x_minus),
                                std::move(d.attracting),
                                d.deferred,
                                d.horizon,
                                std::move(pipe.notes)};
}

ProjectivePoint point4(long a, long b, long c, long d) {
    return ProjectivePoint({gr(a), gr(b), gr(c), gr(d)});
}

ProjectivePoint expect_infinity_image(const PolyAutomorphism& f, Direction dir,
                                      const char* what) {
    InfinityImage im = infinity_image(f, dir);
    if (!im.constant()) {
        throw DomainError(std::string("hyperplane image is not constant for ") + what);
    }
    return *im.point;
}

bool norm_less_than_one(const GR& v) { return v.norm2() < Rational(1); }

bool norm_greater_than_one(const GR& v) { return v.norm2() > Rational(1); }

AttractingCondition unconditional_attracting() {
    return {"unconditional (regular case: the attracting side needs no coefficient bound)", true};
}

// replaces the single variable `var` of a one-variable polynomial by another
MultiPoly reindex_variable(const MultiPoly& p, int from, int to) {
    std::vector<MultiPoly> maps;
    maps.reserve(p.num_vars());
    for (int j = 0; j < p.num_vars(); ++j) {
        maps.push_back(MultiPoly::variable(p.num_vars(), j == from ? to : j));
    }
    return compose(p, maps);
}

bool powers_of(const DegreeSequence& seq, long long base) {
    long long expect = 1;
    for (int n = 1; n <= seq.size(); ++n) {
        expect *= base;
        if (seq.value(n) != expect) return false;
    }
    return seq.size() > 0;
}

ClassificationReport classify_case_b(Pipeline pipe, const SpecialForm& s, std::string label);

// decision tree on the reduced one-variable-shift form, shared by the H3
// entry and the two reductions that land on it
ClassificationReport classify_special(Pipeline pipe, const SpecialForm& s,
                                      const std::string& prefix) {
    const bool has_alpha = !s.alpha.is_zero();
    const bool has_alpha_p = !s.alpha_p.is_zero();
    const bool has_alpha_pp = !s.alpha_pp.is_zero();

    if (has_alpha && has_alpha_pp) {
        return finish(std::move(pipe),
                      {prefix + "Case A", TheoremOutcome::equal_degrees, surd_int(2), surd_int(2),
                       {}, {}, {}, {}});
    }
    if (has_alpha && !has_alpha_pp && has_alpha_p) {
        return classify_case_b(std::move(pipe), s, prefix + "Case B");
    }
    if (has_alpha && !has_alpha_pp && !has_alpha_p) {
        ProjectivePoint xp =
            expect_infinity_image(power_map(pipe.current, 2), Direction::forward, "the square map");
        if (xp != point4(1, 0, 0, 0)) {
            throw DomainError("square-regular branch produced an unexpected infinity image");
        }
        return finish(std::move(pipe),
                      {prefix + "Case C", TheoremOutcome::class2_square_regular, surd_int(2),
                       root_two(), SquareGrowth{4, 2}, xp, {}, unconditional_attracting()});
    }
    if (!has_alpha && has_alpha_pp && has_alpha_p) {
        // roles of the map and its inverse interchange: swap the first two
        // coordinates and continue on the inverse, which lands in Case B shape
        AffineChange swap_xy = AffineChange::from_matrix(
            {{gr(0), gr(1), gr(0)}, {gr(1), gr(0), gr(0)}, {gr(0), gr(0), gr(1)}},
            shifts(gr(0), gr(0), gr(0)), "swap of the first two coordinates");
        pipe.current = conjugate(swap_xy, pipe.current.inverted());
        pipe.chain.push_back(swap_xy);
        pipe.dir = pipe.dir == Direction::forward ? Direction::inverse : Direction::forward;
        SpecialForm flipped = read_special(pipe.current);
        if (flipped.alpha.is_zero() || !flipped.alpha_pp.is_zero() || flipped.alpha_p.is_zero()) {
            throw DomainError("swapped inverse did not land in the expected coefficient pattern");
        }
        return classify_case_b(std::move(pipe), flipped, prefix + "Case D");
    }
    if (!has_alpha && has_alpha_pp && !has_alpha_p) {
        ProjectivePoint xm =
            expect_infinity_image(power_map(pipe.current, 2), Direction::inverse, "the square map");
        if (xm != point4(0, 1, 0, 0)) {
            throw DomainError("square-regular branch produced an unexpected infinity image");
        }
        return finish(std::move(pipe),
                      {prefix + "Case E", TheoremOutcome::class2_square_regular, root_two(),
                       surd_int(2), SquareGrowth{2, 4}, {}, xm, unconditional_attracting()});
    }
    if (!has_alpha && !has_alpha_pp && has_alpha_p) {
        return finish(std::move(pipe),
                      {prefix + "Case F", TheoremOutcome::equal_degrees, golden_ratio(),
                       golden_ratio(), {}, {}, {}, {}});
    }
    pipe.notes.push_back("the reduced map is affine, so all iterate degrees stay bounded");
    return finish(std::move(pipe),
                  {prefix + "Case G", TheoremOutcome::bounded_degrees, surd_int(1), surd_int(1),
                   {}, {}, {}, {}});
}

// the Fibonacci-inverse branch: one more affine change lands on the
// class-4 normal form (x^2 - xz + c + y, a z, b x + c')
ClassificationReport classify_case_b(Pipeline pipe, const SpecialForm& s, std::string label) {
    GR v = s.c2 * s.alpha / s.alpha_p;
    GR r = v + v - s.c1;
    GR w = s.alpha * s.a_prime * r / s.alpha_p;
    AffineChange collapse = AffineChange::from_matrix(
        diagonal(s.alpha, s.alpha * s.a_prime, -s.alpha_p), shifts(v, -w, r),
        "rescaling onto the class-4 normal form");
    pipe.current = conjugate(collapse, pipe.current);
    pipe.chain.push_back(collapse);

    const auto& comps = pipe.current.forward_components();
    static const std::vector<Monomial> head = {{2, 0, 0}, {1, 0, 1}, {0, 1, 0}, {0, 0, 0}};
    for (const auto& [mono, coeff] : comps[0].terms()) {
        if (std::find(head.begin(), head.end(), mono) == head.end()) {
            throw DomainError("class-4 normal form has an unexpected first component");
        }
    }
    if (!coeff_at(comps[0], {2, 0, 0}).is_one() ||
        !(coeff_at(comps[0], {1, 0, 1}) == gr(-1)) ||
        !coeff_at(comps[0], {0, 1, 0}).is_one()) {
        throw DomainError("class-4 normal form has unexpected leading coefficients");
    }
    auto mid = bare_linear_slot(comps[1], kZ);
    if (!mid || mid->is_zero() || drop_var_terms(comps[1], kZ).term_count() != 0) {
        throw DomainError("class-4 normal form has an unexpected middle component");
    }
    auto tail = affine_in(comps[2], kX);
    if (!tail) throw DomainError("class-4 normal form has an unexpected last component");
    GR b = tail->first;

    ProjectivePoint xp = expect_infinity_image(pipe.current, Direction::forward, "the normal form");
    if (xp != point4(1, 0, 0, 0)) {
        throw DomainError("class-4 normal form has an unexpected infinity image");
    }
    return finish(std::move(pipe),
                  {std::move(label), TheoremOutcome::class4, surd_int(2), golden_ratio(), {}, xp,
                   {}, AttractingCondition{"|b| < 1", norm_less_than_one(b)}});
}

// conjugates away scaling/translation so the last component is a bare
// coordinate and the middle linear slot is normalized
void normalize_shape(Pipeline& pipe, const FamilyShape& shape) {
    if (shape.strict) return;
    AffineChange n = [&]() {
        switch (shape.family) {
            case MapFamily::h3:
                return AffineChange::from_matrix(
                    diagonal(shape.third_scale, shape.second_slot.inverse(), gr(1)),
                    shifts(gr(0), gr(0), -shape.third_shift), "coordinate normalization");
            case MapFamily::h4:
                return AffineChange::from_matrix(
                    diagonal(shape.third_scale * shape.second_slot, shape.third_scale, gr(1)),
                    shifts(gr(0), gr(0), -shape.third_shift), "coordinate normalization");
            default:
                return AffineChange::from_matrix(
                    diagonal(shape.third_scale, gr(1), gr(1)),
                    shifts(gr(0), gr(0), -shape.third_shift), "coordinate normalization");
        }
    }();
    pipe.current = conjugate(n, pipe.current);
    pipe.chain.push_back(n);
}

ClassificationReport classify_h3(Pipeline pipe) {
    auto rough = match_h3(pipe.current.forward_components());
    normalize_shape(pipe, *rough);
    auto shape = match_h3(pipe.current.forward_components());
    if (!shape || !shape->strict) throw DomainError("normalization left the family shape");

    if (!shape->q.is_zero()) {
        MultiPoly q_of_z = reindex_variable(shape->q, kX, kZ);
        std::vector<MultiPoly> fwd = {MultiPoly::variable(3, kX),
                                      MultiPoly::variable(3, kY) - q_of_z,
                                      MultiPoly::variable(3, kZ)};
        std::vector<MultiPoly> inv = {MultiPoly::variable(3, kX),
                                      MultiPoly::variable(3, kY) + q_of_z,
                                      MultiPoly::variable(3, kZ)};
        AffineChange shear(PolyAutomorphism(fwd, inv), "middle-coordinate shear");
        pipe.current = conjugate(shear, pipe.current);
        pipe.chain.push_back(shear);
    }
    SpecialForm s = read_special(pipe.current);
    return classify_special(std::move(pipe), s, "H3 ");
}

ClassificationReport classify_h4(Pipeline pipe) {
    auto rough = match_h4(pipe.current.forward_components());
    normalize_shape(pipe, *rough);
    auto shape = match_h4(pipe.current.forward_components());
    if (!shape || !shape->strict) throw DomainError("normalization left the family shape");

    const GR c1 = coeff_at(shape->p, {2, 0, 0});
    const GR c2 = coeff_at(shape->p, {1, 1, 0});
    const GR c3 = coeff_at(shape->p, {0, 2, 0});
    const GR c4 = coeff_at(shape->q, {0, 2, 0});

    if (!c4.is_zero()) {
        if (!c1.is_zero()) {
            ProjectivePoint xm =
                expect_infinity_image(pipe.current, Direction::inverse, "the normal form");
            if (xm != point4(0, 0, 1, 0)) {
                throw DomainError("regular branch produced an unexpected infinity image");
            }
            return finish(std::move(pipe),
                          {"H4 Case A", TheoremOutcome::class1_regular, surd_int(2), surd_int(4),
                           {}, {}, xm, unconditional_attracting()});
        }
        if (!c2.is_zero()) {
            ProjectivePoint xm =
                expect_infinity_image(pipe.current, Direction::inverse, "the normal form");
            if (xm != point4(0, 0, 1, 0)) {
                throw DomainError("cubic-inverse branch produced an unexpected infinity image");
            }
            pipe.notes.push_back(
                "no explicit change onto the cubic-inverse display is constructed; the growth "
                "and infinity-image claims are checked on the family form directly");
            return finish(std::move(pipe),
                          {"H4 Case B", TheoremOutcome::class3, surd_int(2), surd_int(3), {}, {},
                           xm, unconditional_attracting()});
        }
        // dichotomy decided from finite degree data: either both sequences
        // double forever, or the square map is regular with growth (4, 2)
        int horizon = std::max(pipe.depth, 8);
        DegreeSequence seq_f = degree_sequence(pipe.current, horizon);
        DegreeSequence seq_i = degree_sequence(pipe.current, horizon, Direction::inverse);
        pipe.notes.push_back("dichotomy decided empirically from degree sequences at depth " +
                             std::to_string(horizon));
        if (powers_of(seq_f, 2) && powers_of(seq_i, 2)) {
            return finish(std::move(pipe),
                          {"H4 Case C", TheoremOutcome::equal_degrees, surd_int(2), surd_int(2),
                           {}, {}, {}, {}, false, true});
        }
        ProjectivePoint xp =
            expect_infinity_image(power_map(pipe.current, 2), Direction::forward, "the square map");
        if (xp != ProjectivePoint({c3, c4, gr(0), gr(0)})) {
            throw DomainError("square-regular branch produced an unexpected infinity image");
        }
        return finish(std::move(pipe),
                      {"H4 Case C", TheoremOutcome::class2_square_regular, surd_int(2), root_two(),
                       SquareGrowth{4, 2}, xp, {}, unconditional_attracting(), false, true});
    }

    // Q is affine: a triangular change absorbs it and lands on the reduced form
    MultiPoly q_of_z = reindex_variable(shape->q, kY, kZ);
    std::vector<MultiPoly> fwd = {MultiPoly::variable(3, kX) + shape->q,
                                  MultiPoly::variable(3, kZ), MultiPoly::variable(3, kY)};
    std::vector<MultiPoly> inv = {MultiPoly::variable(3, kX) - q_of_z,
                                  MultiPoly::variable(3, kZ), MultiPoly::variable(3, kY)};
    AffineChange fold(PolyAutomorphism(fwd, inv), "triangular absorption of the middle part");
    pipe.current = conjugate(fold, pipe.current);
    pipe.chain.push_back(fold);
    SpecialForm s = read_special(pipe.current);
    return classify_special(std::move(pipe), s, "H4 Case D / ");
}

ClassificationReport classify_h5(Pipeline pipe) {
    auto rough = match_h5(pipe.current.forward_components());
    normalize_shape(pipe, *rough);
    auto shape = match_h5(pipe.current.forward_components());
    if (!shape || !shape->strict) throw DomainError("normalization left the family shape");

    const GR a = shape->first_slot;
    const GR b = shape->second_slot;
    const GR c1 = coeff_at(shape->p, {2, 0, 0});
    const GR c2 = coeff_at(shape->p, {1, 1, 0});
    const GR c3 = coeff_at(shape->p, {0, 2, 0});
    const GR d1 = coeff_at(shape->p, {1, 0, 0});
    const GR d2 = coeff_at(shape->p, {0, 1, 0});
    const GR c4 = coeff_at(shape->q, {2, 0, 0});
    const GR e1 = coeff_at(shape->q, {1, 0, 0});
    const GR e2 = coeff_at(shape->q, {0, 0, 0});

    if (!c4.is_zero()) {
        if (!c3.is_zero()) {
            ProjectivePoint xm =
                expect_infinity_image(pipe.current, Direction::inverse, "the normal form");
            if (xm != point4(0, 0, 1, 0)) {
                throw DomainError("regular branch produced an unexpected infinity image");
            }
            return finish(std::move(pipe),
                          {"H5 Case A", TheoremOutcome::class1_regular, surd_int(2), surd_int(4),
                           {}, {}, xm, unconditional_attracting()});
        }
        if (!c2.is_zero()) {
            AttractingCondition attracting{"|b| > 1", norm_greater_than_one(b)};
            auto root = (c2 * c4).sqrt();
            if (root) {
                GR p = *root;
                GR q = p * d2 / c2;
                GR r = d1 - (q * c1 * gr(2)) / p;
                AffineChange collapse = AffineChange::from_matrix(
                    diagonal(p, c2, p), shifts(q, r, q),
                    "rescaling onto the cubic-inverse normal form");
                pipe.current = conjugate(collapse, pipe.current);
                pipe.chain.push_back(collapse);
                const auto& comps = pipe.current.forward_components();
                static const std::vector<Monomial> first_allowed = {
                    {1, 1, 0}, {2, 0, 0}, {0, 0, 1}, {0, 0, 0}};
                for (const auto& [mono, coeff] : comps[0].terms()) {
                    if (std::find(first_allowed.begin(), first_allowed.end(), mono) ==
                        first_allowed.end()) {
                        throw DomainError("class-5 normal form has an unexpected first component");
                    }
                }
                if (!coeff_at(comps[0], {1, 1, 0}).is_one() ||
                    !coeff_at(comps[1], {2, 0, 0}).is_one()) {
                    throw DomainError("class-5 normal form has unexpected leading coefficients");
                }
                ProjectivePoint xm =
                    expect_infinity_image(pipe.current, Direction::inverse, "the normal form");
                if (xm != point4(0, 0, 1, 0)) {
                    throw DomainError("class-5 normal form has an unexpected infinity image");
                }
                return finish(std::move(pipe),
                              {"H5 Case B", TheoremOutcome::class5, surd_int(2), surd_int(3), {},
                               {}, xm, attracting});
            }
            ProjectivePoint xm =
                expect_infinity_image(pipe.current, Direction::inverse, "the family form");
            if (xm != point4(0, 0, 1, 0)) {
                throw DomainError("class-5 branch produced an unexpected infinity image");
            }
            pipe.notes.push_back(
                "the rescaling needs a square root of the product of the two leading mixed "
                "coefficients, which is not a Gaussian rational here; claims are checked on the "
                "family form directly");
            return finish(std::move(pipe),
                          {"H5 Case B", TheoremOutcome::class5, surd_int(2), surd_int(3), {}, {},
                           xm, attracting, true});
        }
        GR gamma = d2 * c4 / b - c1;
        if (!c1.is_zero() && !gamma.is_zero()) {
            return finish(std::move(pipe),
                          {"H5 Case C", TheoremOutcome::equal_degrees, surd_int(2), surd_int(2),
                           {}, {}, {}, {}});
        }
        if (!c1.is_zero()) {
            InfinityImage im = infinity_image(power_map(pipe.current, 2), Direction::forward);
            std::optional<ProjectivePoint> xp;
            if (im.constant()) {
                xp = *im.point;
            } else {
                pipe.notes.push_back("the square map's infinity image is not constant here");
            }
            return finish(std::move(pipe),
                          {"H5 Case C", TheoremOutcome::class2_square_regular, surd_int(2),
                           root_two(), SquareGrowth{4, 2}, xp, {}, unconditional_attracting()});
        }
        if (!d2.is_zero()) {
            InfinityImage im = infinity_image(power_map(pipe.current, 2), Direction::inverse);
            std::optional<ProjectivePoint> xm;
            if (im.constant()) {
                xm = *im.point;
            } else {
                pipe.notes.push_back("the square map's infinity image is not constant here");
            }
            return finish(std::move(pipe),
                          {"H5 Case C", TheoremOutcome::class2_square_regular, root_two(),
                           surd_int(2), SquareGrowth{2, 4}, {}, xm, unconditional_attracting()});
        }
        pipe.notes.push_back("all iterate degrees stay at 2 or below");
        return finish(std::move(pipe),
                      {"H5 Case C", TheoremOutcome::bounded_degrees, surd_int(1), surd_int(1), {},
                       {}, {}, {}});
    }

    if (e1.is_zero()) {
        if (!c1.is_zero()) {
            return finish(std::move(pipe),
                          {"H5 Case D", TheoremOutcome::equal_degrees, surd_int(2), surd_int(2),
                           {}, {}, {}, {}});
        }
        pipe.notes.push_back("iterate degrees grow at most linearly");
        return finish(std::move(pipe),
                      {"H5 Case D", TheoremOutcome::bounded_degrees, surd_int(1), surd_int(1), {},
                       {}, {}, {}});
    }

    GR b_inv = b.inverse();
    AffineChange fold = AffineChange::from_matrix(
        {{e1, b, gr(0)}, {gr(0), b_inv, -e1 * b_inv}, {gr(0), gr(1), gr(0)}},
        shifts(e2 + e2 * b_inv, gr(0), e2 * b_inv), "mixing change onto the reduced form");
    pipe.current = conjugate(fold, pipe.current);
    pipe.chain.push_back(fold);
    SpecialForm s = read_special(pipe.current);
    return classify_special(std::move(pipe), s, "H5 Case E / ");
}

ClassificationReport classify_symmetric(Pipeline pipe) {
    DegreeSequence seq_f = degree_sequence(pipe.current, std::max(pipe.depth, 4));
    DegreeSequence seq_i =
        degree_sequence(pipe.current, std::max(pipe.depth, 4), Direction::inverse);
    DegreeEstimate est_f = dynamical_degree_estimate(seq_f);
    DegreeEstimate est_i = dynamical_degree_estimate(seq_i);
    if (!est_f.exact || !est_i.exact || !(est_f.value == est_i.value)) {
        throw PreconditionFailed(
            "triangular map shows asymmetric or unresolved degree growth; this bucket only "
            "covers maps with matching growth in both directions");
    }
    bool unit = est_f.value == surd_int(1);
    pipe.notes.push_back("growth measured from degree sequences in both directions");
    return finish(std::move(pipe),
                  {"elementary bucket",
                   unit ? TheoremOutcome::bounded_degrees : TheoremOutcome::equal_degrees,
                   est_f.value, est_i.value, {}, {}, {}, {}, false, true});
}

}  // namespace

std::string family_name(MapFamily f) {
    switch (f) {
        case MapFamily::affine:
            return "affine";
        case MapFamily::symmetric_bucket:
            return "elementary/H1/H2";
        case MapFamily::h3:
            return "H3";
        case MapFamily::h4:
            return "H4";
        case MapFamily::h5:
            return "H5";
    }
    return "unknown";
}

std::string outcome_name(TheoremOutcome o) {
    switch (o) {
        case TheoremOutcome::class1_regular:
            return "class1_regular";
        case TheoremOutcome::class2_square_regular:
            return "class2_square_regular";
        case TheoremOutcome::class3:
            return "class3";
        case TheoremOutcome::class4:
            return "class4";
        case TheoremOutcome::class5:
            return "class5";
        case TheoremOutcome::equal_degrees:
            return "equal_degrees";
        case TheoremOutcome::bounded_degrees:
            return "bounded_degrees";
    }
    return "unknown";
}

AffineChange::AffineChange(PolyAutomorphism change, std::string label)
    : change_(std::move(change)), label_(std::move(label)) {}

AffineChange AffineChange::from_matrix(const Matrix& matrix, const Translation& translation,
                                       std::string label) {
    int k = static_cast<int>(matrix.size());
    if (k == 0 || static_cast<int>(translation.size()) != k) {
        throw DomainError("affine change needs a square matrix and a matching translation");
    }
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != k) {
            throw DomainError("affine change needs a square matrix and a matching translation");
        }
    }
    Matrix inverse = invert_matrix(matrix);
    Translation inv_shift(k, GR::integer(0));
    for (int i = 0; i < k; ++i) {
        GR acc = GR::integer(0);
        for (int j = 0; j < k; ++j) acc = acc + inverse[i][j] * translation[j];
        inv_shift[i] = -acc;
    }
    AffineChange out(PolyAutomorphism(affine_components(matrix, translation),
                                      affine_components(inverse, inv_shift)),
                     std::move(label));
    out.matrix_ = matrix;
    out.translation_ = translation;
    return out;
}

PolyAutomorphism conjugate(const AffineChange& change, const PolyAutomorphism& map,
                           std::size_t term_limit) {
    const PolyAutomorphism& f = change.map();
    if (f.dimension() != map.dimension()) {
        throw DomainError("coordinate change and map live in different dimensions");
    }
    auto fwd = compose_map(
        f.forward_components(),
        compose_map(map.forward_components(), f.inverse_components(), term_limit), term_limit);
    auto inv = compose_map(
        f.forward_components(),
        compose_map(map.inverse_components(), f.inverse_components(), term_limit), term_limit);
    return PolyAutomorphism(std::move(fwd), std::move(inv));
}

PolyAutomorphism apply_chain(const std::vector<AffineChange>& chain,
                             const PolyAutomorphism& map) {
    PolyAutomorphism out = map;
    for (const AffineChange& step : chain) out = conjugate(step, out);
    return out;
}

PolyAutomorphism power_map(const PolyAutomorphism& f, int n) {
    if (n < 1) throw PreconditionFailed("power of an automorphism needs n >= 1");
    return PolyAutomorphism(f.iterate(n), f.iterate(n, Direction::inverse));
}

MapFamily detect_family(const PolyAutomorphism& map) {
    if (map.dimension() != 3) {
        throw UnsupportedDimension("the classification covers automorphisms of C^3 only");
    }
    const auto& comps = map.forward_components();
    int deg = map_degree(comps);
    if (deg > 2) throw NotQuadratic("the classification covers degree at most 2");
    if (deg <= 1) return MapFamily::affine;
    if (match_h3(comps)) return MapFamily::h3;
    if (match_h4(comps)) return MapFamily::h4;
    if (match_h5(comps)) return MapFamily::h5;
    if (match_elementary(comps)) return MapFamily::symmetric_bucket;
    throw NotInNormalShape(
        "quadratic map matches no family shape (shapes are recognized up to per-coordinate "
        "scaling and translation); conjugate it into a family shape first");
}

ClassificationReport classify(const PolyAutomorphism& map, int depth) {
    if (depth < 1) throw PreconditionFailed("classification depth must be at least 1");
    MapFamily family = detect_family(map);
    Pipeline pipe{map, family, Direction::forward, {}, map, {}, depth};
    switch (family) {
        case MapFamily::affine:
            pipe.notes.push_back("all components are affine");
            return finish(std::move(pipe),
                          {"affine", TheoremOutcome::bounded_degrees, surd_int(1), surd_int(1),
                           {}, {}, {}, {}});
        case MapFamily::symmetric_bucket:
            return classify_symmetric(std::move(pipe));
        case MapFamily::h3:
            return classify_h3(std::move(pipe));
        case MapFamily::h4:
            return classify_h4(std::move(pipe));
        case MapFamily::h5:
            return classify_h5(std::move(pipe));
    }
    throw DomainError("unreachable family");
}

std::vector<VerificationItem> verify_report(const ClassificationReport& report, int depth) {
    std::vector<VerificationItem> items;

    PolyAutomorphism base = report.normal_form_direction == Direction::forward
                                ? report.input
                                : report.input.inverted();
    PolyAutomorphism composed = apply_chain(report.chain, base);
    bool chain_ok =
        composed.forward_components() == report.normal_form.forward_components() &&
        composed.inverse_components() == report.normal_form.inverse_components();
    items.push_back({"conjugation chain reproduces the normal form", chain_ok,
                     chain_ok ? "exact polynomial identity" : "composed chain differs"});

    const bool flipped = report.normal_form_direction == Direction::inverse;
    const QuadraticSurd& nf_fwd = flipped ? report.lambda_inverse : report.lambda_forward;
    const QuadraticSurd& nf_inv = flipped ? report.lambda_forward : report.lambda_inverse;
    int horizon = report.square ? std::max(depth, 8) : depth;

    auto check_growth = [&](Direction dir, const QuadraticSurd& claim, const std::string& name) {
        DegreeSequence seq = degree_sequence(report.normal_form, horizon, dir);
        DegreeEstimate est = dynamical_degree_estimate(seq);
        bool ok;
        std::string detail;
        if (seq.truncated) {
            ok = false;
            detail = "degree sequence truncated before the requested depth";
        } else if (est.exact) {
            ok = est.value == claim;
            detail = "estimate " + est.value.to_string() + " vs claim " + claim.to_string();
        } else {
            ok = std::abs(est.approx - claim.to_double()) < 1e-6;
            detail = "numeric estimate " + std::to_string(est.approx) + " vs claim " +
                     claim.to_string();
        }
        items.push_back({name, ok, detail});
        return seq;
    };
    DegreeSequence seq_f =
        check_growth(Direction::forward, nf_fwd, "forward degree growth of the normal form");
    DegreeSequence seq_i =
        check_growth(Direction::inverse, nf_inv, "inverse degree growth of the normal form");

    if (report.square) {
        auto even_entries = [](const DegreeSequence& seq) {
            std::vector<long long> out;
            for (int n = 2; n <= seq.size(); n += 2) out.push_back(seq.value(n));
            return out;
        };
        auto check_square = [&](const DegreeSequence& seq, long long claim,
                                const std::string& name) {
            std::vector<long long> evens = even_entries(seq);
            bool ok = false;
            std::string detail;
            if (static_cast<int>(evens.size()) < 4) {
                detail = "not enough even-index degrees";
            } else {
                DegreeEstimate est = dynamical_degree_estimate(evens);
                ok = est.exact && est.value == surd_int(claim);
                detail = (est.exact ? "estimate " + est.value.to_string()
                                    : "numeric estimate " + std::to_string(est.approx)) +
                         " vs claim " + std::to_string(claim);
            }
            items.push_back({name, ok, detail});
        };
        check_square(seq_f, report.square->forward, "forward degree growth of the square map");
        check_square(seq_i, report.square->inverse, "inverse degree growth of the square map");
    }

    auto check_point = [&](const ProjectivePoint& claimed, Direction dir, const std::string& name) {
        PolyAutomorphism target =
            report.square ? power_map(report.normal_form, 2) : report.normal_form;
        InfinityImage im = infinity_image(target, dir);
        bool ok = im.constant() && *im.point == claimed;
        items.push_back({name, ok,
                         im.constant() ? "recomputed " + im.point->to_string() + " vs claimed " +
                                             claimed.to_string()
                                       : "recomputed image is not constant"});
    };
    if (report.x_plus) check_point(*report.x_plus, Direction::forward, "attracting point at infinity");
    if (report.x_minus) check_point(*report.x_minus, Direction::inverse, "repelling point at infinity");

    return items;
}

bool all_passed(const std::vector<VerificationItem>& items) {
    return std::all_of(items.begin(), items.end(),
                       [](const VerificationItem& it) { return it.passed; });
}

nlohmann::json classification_report_to_json(const ClassificationReport& report) {
    nlohmann::json j;
    j["family"] = family_name(report.family);
    j["sub_case"] = report.sub_case;
    j["outcome"] = outcome_name(report.outcome);
    j["normal_form_direction"] = direction_name(report.normal_form_direction);
    j["lambda"] = {{"forward",
                    {{"display", report.lambda_forward.to_string()},
                     {"approx", report.lambda_forward.to_double()}}},
                   {"inverse",
                    {{"display", report.lambda_inverse.to_string()},
                     {"approx", report.lambda_inverse.to_double()}}}};
    if (report.square) {
        j["square_growth"] = {{"forward", report.square->forward},
                              {"inverse", report.square->inverse}};
    }
    if (report.x_plus) j["x_plus"] = report.x_plus->to_string();
    if (report.x_minus) j["x_minus"] = report.x_minus->to_string();
    if (report.attracting) {
        j["attracting"] = {{"predicate", report.attracting->predicate},
                           {"holds", report.attracting->holds}};
    }
    j["conjugation_deferred"] = report.conjugation_deferred;
    j["horizon_limited"] = report.horizon_limited;
    nlohmann::json chain = nlohmann::json::array();
    for (const AffineChange& step : report.chain) {
        chain.push_back({{"label", step.label()}, {"change", automorphism_to_json(step.map())}});
    }
    j["chain"] = chain;
    j["normal_form"] = automorphism_to_json(report.normal_form);
    j["notes"] = report.notes;
    return j;
}

}  // namespace polydyn
