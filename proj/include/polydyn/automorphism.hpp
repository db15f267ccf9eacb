#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polydyn/multipoly.hpp"
#include "polydyn/recurrence.hpp"

namespace polydyn {

enum class Direction { forward, inverse };

inline const char* direction_name(Direction d) {
    return d == Direction::forward ? "forward" : "inverse";
}

std::vector<MultiPoly> identity_components(int k);

// componentwise composition outer(inner)
std::vector<MultiPoly> compose_map(const std::vector<MultiPoly>& outer,
                                   const std::vector<MultiPoly>& inner,
                                   std::size_t term_limit = kDefaultTermLimit);

// A polynomial automorphism of C^k given by forward and inverse component
// tuples; both composition identities are verified symbolically on
// construction. Copies share one thread-safe iterate memo.
class PolyAutomorphism {
  public:
    PolyAutomorphism(std::vector<MultiPoly> forward, std::vector<MultiPoly> inverse);

    int dimension() const { return k_; }
    const std::vector<MultiPoly>& forward_components() const { return forward_; }
    const std::vector<MultiPoly>& inverse_components() const { return inverse_; }
    const std::vector<MultiPoly>& components(Direction dir) const {
        return dir == Direction::forward ? forward_ : inverse_;
    }

    int first_degree() const { return lambda_; }
    int inverse_first_degree() const { return lambda_inverse_; }
    int first_degree(Direction dir) const {
        return dir == Direction::forward ? lambda_ : lambda_inverse_;
    }

    PolyAutomorphism inverted() const { return {inverse_, forward_}; }

    // components of f^n (or f^-n), memoized; n = 0 yields the identity
    const std::vector<MultiPoly>& iterate(int n, Direction dir = Direction::forward,
                                          std::size_t term_limit = kDefaultTermLimit) const;

  private:
    int k_;
    std::vector<MultiPoly> forward_;
    std::vector<MultiPoly> inverse_;
    int lambda_;
    int lambda_inverse_;

    struct IterateCache {
        std::mutex mu;
        std::map<std::pair<int, int>, std::vector<MultiPoly>> memo;
    };
    std::shared_ptr<IterateCache> cache_;
};

nlohmann::json automorphism_to_json(const PolyAutomorphism& f);
PolyAutomorphism automorphism_from_json(const nlohmann::json& j);

// point of P^k in homogeneous coordinates, scaled so the first nonzero
// coordinate is 1
class ProjectivePoint {
  public:
    explicit ProjectivePoint(std::vector<GaussianRational> coords);

    const std::vector<GaussianRational>& coords() const { return coords_; }
    int coordinate_count() const { return static_cast<int>(coords_.size()); }
    bool at_infinity() const { return coords_.back().is_zero(); }
    std::string to_string() const;

    friend bool operator==(const ProjectivePoint& a, const ProjectivePoint& b) {
        return a.coords_ == b.coords_;
    }
    friend bool operator!=(const ProjectivePoint& a, const ProjectivePoint& b) {
        return !(a == b);
    }

  private:
    std::vector<GaussianRational> coords_;
};

// homogeneous lift of f^n to P^k with the common t-power removed; degree
// is then the first algebraic degree of f^n
struct ReducedLift {
    std::vector<HomogPoly> components;  // k+1 entries, the last is the image of t
    int degree = 0;
    // t-power cancelled at step n relative to composing with the previous
    // reduced lift, i.e. lambda * deg(f^{n-1}) - deg(f^n)
    int dropped = 0;
};

ReducedLift reduced_lift(const PolyAutomorphism& f, int n,
                         Direction dir = Direction::forward,
                         std::size_t term_limit = kDefaultTermLimit);

enum class DegreeComputation { symbolic, certified };

struct DegreeSequence {
    Direction direction = Direction::forward;
    std::vector<long long> degrees;             // index i holds deg of the (i+1)-th iterate
    std::vector<DegreeComputation> computed_by;  // parallel to degrees
    int requested = 0;
    bool truncated = false;

    int size() const { return static_cast<int>(degrees.size()); }
    long long value(int n) const;  // n = 0 gives 1
};

// term budget for symbolic iteration before switching to certified bounds
constexpr std::size_t kDegreeSymbolicBudget = 4000;

// First algebraic degrees of f^n for n = 1..N. Iterates are composed
// symbolically while they fit in the term budget; past that point a degree
// is accepted only when the composition upper bound lambda*deg(f^{n-1})
// meets the mod-p line-restriction lower bound, with one full-ceiling
// symbolic retry before giving up. A shortfall is reported via `truncated`
// rather than by guessing.
DegreeSequence degree_sequence(const PolyAutomorphism& f, int N,
                               Direction dir = Direction::forward,
                               std::size_t symbolic_budget = kDegreeSymbolicBudget);

DegreeEstimate dynamical_degree_estimate(const DegreeSequence& seq);

struct InfinityImage {
    // the constant image of the hyperplane at infinity, absent when the
    // extended map is non-constant there
    std::optional<ProjectivePoint> point;
    // set when the top-degree parts share a common monomial factor of
    // positive degree; the identity check remains sound
    std::string note;

    bool constant() const { return point.has_value(); }
};

InfinityImage infinity_image(const PolyAutomorphism& f, Direction dir = Direction::forward);

// true iff the reduced lift of f vanishes identically at p, i.e. p lies in
// the indeterminacy locus of the extension of f to P^k
bool indeterminacy_membership(const PolyAutomorphism& f, const ProjectivePoint& p,
                              Direction dir = Direction::forward);

// second dynamical degree: exactly 1 for k = 2, estimated from inverse
// degrees for k = 3
DegreeEstimate second_dynamical_degree(const PolyAutomorphism& f, int N = 6);

}  // namespace polydyn
