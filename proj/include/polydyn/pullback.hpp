#pragma once

#include <vector>

#include "json.hpp"
#include "polydyn/automorphism.hpp"
#include "polydyn/multipoly.hpp"

namespace polydyn {

// algebraic divisor on P^k cut out by a homogeneous form, scaled so the
// graded-lex leading coefficient is 1
class Divisor {
  public:
    explicit Divisor(HomogPoly form);

    const HomogPoly& form() const { return form_; }
    int degree() const { return form_.degree(); }
    int ambient_vars() const { return form_.poly().num_vars(); }

    friend bool operator==(const Divisor& a, const Divisor& b) {
        return a.form_ == b.form_;
    }

  private:
    HomogPoly form_;
};

nlohmann::json divisor_to_json(const Divisor& s);
Divisor divisor_from_json(const nlohmann::json& j);

// one step of the Siu decomposition of lambda^{-n} (f^n)* S against [t=0]:
// the pullback form factors as t^m * residual with t not dividing residual
struct SiuDecomposition {
    int n = 0;
    long long t_multiplicity = 0;  // m_n
    HomogPoly residual;
    Rational c;  // m_n / (d * lambda^n), in [0, 1]
};

// defining form of f* S: the divisor form composed with the lift of f,
// homogeneous of degree d * lambda
HomogPoly pullback_divisor(const PolyAutomorphism& f, const Divisor& s,
                           std::size_t term_limit = kDefaultTermLimit);

// Siu decompositions for n = 1..N, computed by pulling back the previous
// residual and accumulating t-multiplicities: m_{n+1} = lambda*m_n + v where
// v is the t-valuation of the pulled-back residual. Requires the first
// algebraic degrees to grow as lambda^n up to the horizon.
std::vector<SiuDecomposition> siu_sequence(const PolyAutomorphism& f, const Divisor& s,
                                           int N,
                                           std::size_t term_limit = kDefaultTermLimit);

struct CLimitResult {
    Rational lo;
    Rational hi;
    bool stabilized = false;

    Rational value() const { return lo; }  // exact limit when stabilized
};

// limit of the c_n when the trailing half-window is constant; otherwise the
// honest interval [c_N, 1] implied by monotonicity
CLimitResult c_limit(const PolyAutomorphism& f, const Divisor& s, int N);

struct LelongPointCheck {
    std::vector<GaussianRational> point;
    int residual_order = 0;  // vanishing order of the n-th residual at the point
    int image_order = 0;     // vanishing order of the divisor form at f^n(point)
    bool equal = false;
    bool bound_ok = false;  // residual order within the degree-d mass bound
};

struct LelongReport {
    int n = 0;
    bool all_equal = true;
    bool all_bounded = true;
    std::vector<LelongPointCheck> points;
};

// multiplicities are preserved by the biholomorphism f^n on C^k: the order
// of the n-th residual at z must equal the order of the divisor at f^n(z),
// and stays within the normalized mass bound
LelongReport lelong_bound_check(const PolyAutomorphism& f, const Divisor& s, int n,
                                const std::vector<std::vector<GaussianRational>>& points);

// c_n(f* S) = c_{n+1}(S) for 1 <= n <= N
bool transformation_rule_check(const PolyAutomorphism& f, const Divisor& s, int N);

struct PositivityReport {
    bool c_positive = false;
    int mult_at_x_plus = 0;
    bool consistent = false;
    CLimitResult limit;
    ProjectivePoint x_plus;
};

// c_S > 0 if and only if the divisor form vanishes at X+ (checked in the
// affine chart where the leading coordinate of X+ is 1)
PositivityReport positivity_criterion_check(const PolyAutomorphism& f, const Divisor& s,
                                            int N);

}  // namespace polydyn
