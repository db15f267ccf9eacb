#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polydyn/errors.hpp"
#include "polydyn/rational.hpp"

namespace polydyn {

enum class Domain { exact, approx };

inline const char* domain_name(Domain d) { return d == Domain::exact ? "exact" : "approx"; }

// Exponent vector; length equals the polynomial's variable count.
using Monomial = std::vector<int>;

inline int monomial_degree(const Monomial& m) {
    int s = 0;
    for (int e : m) s += e;
    return s;
}

// Graded-lexicographic order: first by total degree, then lexicographically.
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        int da = monomial_degree(a), db = monomial_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

// A coefficient is exact (element of Q(i)) or approx (complex double).
// The domain is fixed per containing polynomial; mixing raises DomainError.
class Coefficient {
  public:
    Coefficient() : v_(GaussianRational()) {}
    static Coefficient exact(GaussianRational q) { return Coefficient(std::move(q)); }
    static Coefficient approx(std::complex<double> z);

    Domain domain() const {
        return std::holds_alternative<GaussianRational>(v_) ? Domain::exact : Domain::approx;
    }
    const GaussianRational& exact_value() const;
    std::complex<double> approx_value() const;
    std::complex<double> to_complex() const;

    bool is_zero() const;
    Coefficient operator-() const;
    friend Coefficient operator+(const Coefficient& a, const Coefficient& b);
    friend Coefficient operator*(const Coefficient& a, const Coefficient& b);
    friend bool operator==(const Coefficient& a, const Coefficient& b);
    friend bool operator!=(const Coefficient& a, const Coefficient& b) { return !(a == b); }

    std::string to_string() const;

  private:
    explicit Coefficient(GaussianRational q) : v_(std::move(q)) {}
    explicit Coefficient(std::complex<double> z) : v_(z) {}
    std::variant<GaussianRational, std::complex<double>> v_;
};

inline constexpr std::size_t kDefaultTermLimit = 1'000'000;

// Sparse multivariate polynomial with canonical graded-lex term storage.
// Invariants: no stored zero coefficients; every monomial has length
// num_vars() and nonnegative exponents; all coefficients share domain().
class MultiPoly {
  public:
    using TermMap = std::map<Monomial, Coefficient, GradedLexLess>;

    explicit MultiPoly(int num_vars, Domain domain = Domain::exact);

    static MultiPoly zero(int num_vars, Domain domain = Domain::exact) {
        return MultiPoly(num_vars, domain);
    }
    static MultiPoly constant(int num_vars, const Coefficient& c);
    static MultiPoly constant(int num_vars, const GaussianRational& q) {
        return constant(num_vars, Coefficient::exact(q));
    }
    static MultiPoly constant(int num_vars, long v) {
        return constant(num_vars, GaussianRational::integer(v));
    }
    static MultiPoly variable(int num_vars, int index, Domain domain = Domain::exact);
    // Convenience builder: monomial c * prod x_i^{e_i}.
    static MultiPoly term(const Monomial& exps, const Coefficient& c);

    int num_vars() const { return num_vars_; }
    Domain domain() const { return domain_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    // Total degree; nullopt is the minus-infinity sentinel of the zero polynomial.
    std::optional<int> total_degree() const;

    // Replaces the coefficient of a monomial (erases it when zero).
    void set_term(const Monomial& m, const Coefficient& c);
    // Adds into a monomial's coefficient.
    void add_term(const Monomial& m, const Coefficient& c);
    Coefficient coeff(const Monomial& m) const;

    MultiPoly operator-() const;
    MultiPoly scaled(const Coefficient& c) const;
    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend bool operator==(const MultiPoly& a, const MultiPoly& b);
    friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

    MultiPoly to_approx() const;

    // Substitutes 1 for one variable; the result has num_vars()-1 variables.
    MultiPoly substitute_one(int var_index) const;

    GaussianRational eval_exact(const std::vector<GaussianRational>& point) const;
    std::complex<double> eval_complex(const std::vector<std::complex<double>>& point) const;

    std::string to_string(const std::vector<std::string>& names = {}) const;

  private:
    void check_monomial(const Monomial& m) const;
    int num_vars_;
    Domain domain_;
    TermMap terms_;
};

MultiPoly mul(const MultiPoly& a, const MultiPoly& b, std::size_t term_limit);

// Substitutes maps[i] for variable i of p.  All maps share p's domain and a
// common variable count, which becomes the result's variable count.
// terms of total degree exactly d (zero polynomial when there are none)
MultiPoly homogeneous_part(const MultiPoly& p, int d);

MultiPoly compose(const MultiPoly& p, const std::vector<MultiPoly>& maps,
                  std::size_t term_limit = kDefaultTermLimit);

// Homogeneous polynomial in k+1 variables; the last variable is the
// homogenizing one (written t).  All terms share total degree().
class HomogPoly {
  public:
    explicit HomogPoly(MultiPoly p);
    const MultiPoly& poly() const { return poly_; }
    int degree() const { return degree_; }
    int affine_vars() const { return poly_.num_vars() - 1; }

    MultiPoly dehomogenized() const { return poly_.substitute_one(poly_.num_vars() - 1); }
    HomogPoly divided_by_t(int m) const;

    friend bool operator==(const HomogPoly& a, const HomogPoly& b) {
        return a.poly_ == b.poly_;
    }

  private:
    MultiPoly poly_;
    int degree_;
};

// Pads p's terms with powers of a fresh last variable up to target_degree.
HomogPoly homogenize(const MultiPoly& p, int target_degree);

// Exponent of the exact t-power dividing h (t = last variable).
int t_adic_valuation(const HomogPoly& h);

// Order of vanishing of exact p at an exact point (0 when p(point) != 0).
int vanishing_order(const MultiPoly& p, const std::vector<GaussianRational>& point);

std::vector<std::string> default_var_names(int num_vars, bool homogeneous = false);

}  // namespace polydyn
