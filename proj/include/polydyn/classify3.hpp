#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polydyn/automorphism.hpp"
#include "polydyn/recurrence.hpp"

namespace polydyn {

// Normal-form families of quadratic polynomial automorphisms of C^3.
// Elementary maps carry no degree asymmetry and share one bucket; the two
// structured families with symmetric growth are folded into it as well.
enum class MapFamily { affine, symmetric_bucket, h3, h4, h5 };

std::string family_name(MapFamily f);

// A coordinate change used in a conjugation chain. Usually affine (kept as
// matrix + translation), but the reductions also use triangular polynomial
// changes of degree 2 such as (x + Q(y), z, y). The two-sided inverse
// identity is verified by the PolyAutomorphism constructor.
class AffineChange {
  public:
    AffineChange(PolyAutomorphism change, std::string label);

    static AffineChange from_matrix(const std::vector<std::vector<GaussianRational>>& matrix,
                                    const std::vector<GaussianRational>& translation,
                                    std::string label);

    const PolyAutomorphism& map() const { return change_; }
    const std::string& label() const { return label_; }
    bool is_affine() const { return matrix_.has_value(); }
    const std::optional<std::vector<std::vector<GaussianRational>>>& matrix() const {
        return matrix_;
    }
    const std::optional<std::vector<GaussianRational>>& translation() const {
        return translation_;
    }

  private:
    PolyAutomorphism change_;
    std::string label_;
    std::optional<std::vector<std::vector<GaussianRational>>> matrix_;
    std::optional<std::vector<GaussianRational>> translation_;
};

// F o H o F^-1, with the inverse identity re-verified on construction
PolyAutomorphism conjugate(const AffineChange& change, const PolyAutomorphism& map,
                           std::size_t term_limit = kDefaultTermLimit);

// folds the chain left to right: C_m o ... o C_1 o H o C_1^-1 o ... o C_m^-1
PolyAutomorphism apply_chain(const std::vector<AffineChange>& chain,
                             const PolyAutomorphism& map);

// f^n as a verified automorphism in its own right
PolyAutomorphism power_map(const PolyAutomorphism& f, int n);

enum class TheoremOutcome {
    class1_regular,
    class2_square_regular,
    class3,
    class4,
    class5,
    equal_degrees,
    bounded_degrees,
};

std::string outcome_name(TheoremOutcome o);

struct AttractingCondition {
    std::string predicate;  // e.g. "|b| < 1", or "unconditional"
    bool holds = false;
};

// first dynamical degrees claimed for the square map when the outcome is
// class2_square_regular
struct SquareGrowth {
    long long forward = 0;
    long long inverse = 0;
};

struct ClassificationReport {
    PolyAutomorphism input;
    MapFamily family;
    std::string sub_case;
    TheoremOutcome outcome;
    // the chain conjugates this direction of the input onto the normal form
    Direction normal_form_direction = Direction::forward;
    std::vector<AffineChange> chain;
    PolyAutomorphism normal_form;
    // claimed first dynamical degrees of the input map and of its inverse
    QuadraticSurd lambda_forward;
    QuadraticSurd lambda_inverse;
    std::optional<SquareGrowth> square;
    std::optional<ProjectivePoint> x_plus;
    std::optional<ProjectivePoint> x_minus;
    std::optional<AttractingCondition> attracting;
    // set when a conjugation needs a square root outside Q(i); claims are
    // then checked on the family form directly
    bool conjugation_deferred = false;
    // set when the verdict rests on finite-depth degree data
    bool horizon_limited = false;
    std::vector<std::string> notes;
};

// Shape recognition against the quadratic normal-form families. Inputs must
// already be written in a family shape (up to per-coordinate scaling and
// translation); reducing an arbitrary quadratic automorphism to these shapes
// is out of scope. Throws NotQuadratic above degree 2 and NotInNormalShape
// when nothing matches.
MapFamily detect_family(const PolyAutomorphism& map);

// Walks the coefficient decision tree of the detected family and emits the
// outcome with its conjugation chain, exact degree-growth claims, the
// constant image of the hyperplane at infinity where the case provides one,
// and the attracting predicate. `depth` bounds the degree data used by the
// empirical branches.
ClassificationReport classify(const PolyAutomorphism& map, int depth = 6);

struct VerificationItem {
    std::string check;
    bool passed = false;
    std::string detail;
};

// Independent cross-checks of a report: chain composition identity, degree
// sequences of the normal form in both directions against the claimed
// growth rates, recomputed infinity images, and the square-map growth for
// class2 outcomes.
std::vector<VerificationItem> verify_report(const ClassificationReport& report, int depth);

bool all_passed(const std::vector<VerificationItem>& items);

nlohmann::json classification_report_to_json(const ClassificationReport& report);

}  // namespace polydyn
