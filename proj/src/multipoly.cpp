#include "polydyn/multipoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace polydyn {

Coefficient Coefficient::approx(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("approx coefficient must be finite");
    return Coefficient(z);
}

const GaussianRational& Coefficient::exact_value() const {
    if (domain() != Domain::exact) throw DomainError("coefficient is not exact");
    return std::get<GaussianRational>(v_);
}

std::complex<double> Coefficient::approx_value() const {
    if (domain() != Domain::approx) throw DomainError("coefficient is not approx");
    return std::get<std::complex<double>>(v_);
}

std::complex<double> Coefficient::to_complex() const {
    if (domain() == Domain::exact) return std::get<GaussianRational>(v_).to_complex();
    return std::get<std::complex<double>>(v_);
}

bool Coefficient::is_zero() const {
    if (domain() == Domain::exact) return std::get<GaussianRational>(v_).is_zero();
    auto z = std::get<std::complex<double>>(v_);
    return z.real() == 0.0 && z.imag() == 0.0;
}

Coefficient Coefficient::operator-() const {
    if (domain() == Domain::exact) return Coefficient(-std::get<GaussianRational>(v_));
    return Coefficient(-std::get<std::complex<double>>(v_));
}

static void require_same_domain(const Coefficient& a, const Coefficient& b) {
    if (a.domain() != b.domain())
        throw DomainError("coefficient domain mismatch (exact vs approx)");
}

Coefficient operator+(const Coefficient& a, const Coefficient& b) {
    require_same_domain(a, b);
    if (a.domain() == Domain::exact)
        return Coefficient::exact(a.exact_value() + b.exact_value());
    return Coefficient(a.approx_value() + b.approx_value());
}

Coefficient operator*(const Coefficient& a, const Coefficient& b) {
    require_same_domain(a, b);
    if (a.domain() == Domain::exact)
        return Coefficient::exact(a.exact_value() * b.exact_value());
    return Coefficient(a.approx_value() * b.approx_value());
}

bool operator==(const Coefficient& a, const Coefficient& b) {
    if (a.domain() != b.domain()) return false;
    if (a.domain() == Domain::exact) return a.exact_value() == b.exact_value();
    return a.approx_value() == b.approx_value();
}

std::string Coefficient::to_string() const {
    if (domain() == Domain::exact) return exact_value().to_string();
    std::ostringstream os;
    auto z = approx_value();
    os << z.real();
    if (z.imag() != 0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
    return os.str();
}

MultiPoly::MultiPoly(int num_vars, Domain domain) : num_vars_(num_vars), domain_(domain) {
    if (num_vars < 1) throw DomainError("polynomial needs at least one variable");
}

MultiPoly MultiPoly::constant(int num_vars, const Coefficient& c) {
    MultiPoly p(num_vars, c.domain());
    p.set_term(Monomial(num_vars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int num_vars, int index, Domain domain) {
    if (index < 0 || index >= num_vars) throw DomainError("variable index out of range");
    MultiPoly p(num_vars, domain);
    Monomial m(num_vars, 0);
    m[index] = 1;
    Coefficient one = domain == Domain::exact
                          ? Coefficient::exact(GaussianRational::integer(1))
                          : Coefficient::approx(1.0);
    p.set_term(m, one);
    return p;
}

MultiPoly MultiPoly::term(const Monomial& exps, const Coefficient& c) {
    MultiPoly p(static_cast<int>(exps.size()), c.domain());
    p.set_term(exps, c);
    return p;
}

void MultiPoly::check_monomial(const Monomial& m) const {
    if (static_cast<int>(m.size()) != num_vars_)
        throw DomainError("monomial length does not match variable count");
    for (int e : m)
        if (e < 0) throw DomainError("negative exponent");
}

std::optional<int> MultiPoly::total_degree() const {
    if (terms_.empty()) return std::nullopt;
    return monomial_degree(terms_.rbegin()->first);
}

void MultiPoly::set_term(const Monomial& m, const Coefficient& c) {
    check_monomial(m);
    if (c.domain() != domain_) throw DomainError("coefficient domain mismatch with polynomial");
    if (c.is_zero())
        terms_.erase(m);
    else
        terms_[m] = c;
}

void MultiPoly::add_term(const Monomial& m, const Coefficient& c) {
    check_monomial(m);
    if (c.domain() != domain_) throw DomainError("coefficient domain mismatch with polynomial");
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    Coefficient sum = it->second + c;
    if (sum.is_zero())
        terms_.erase(it);
    else
        it->second = sum;
}

Coefficient MultiPoly::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    if (it != terms_.end()) return it->second;
    return domain_ == Domain::exact ? Coefficient::exact(GaussianRational())
                                    : Coefficient::approx(0.0);
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out(num_vars_, domain_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
    return out;
}

MultiPoly MultiPoly::scaled(const Coefficient& c) const {
    if (c.domain() != domain_) throw DomainError("scale coefficient domain mismatch");
    MultiPoly out(num_vars_, domain_);
    if (c.is_zero()) return out;
    for (const auto& [m, v] : terms_) {
        Coefficient p = v * c;
        if (!p.is_zero()) out.terms_.emplace(m, p);
    }
    return out;
}

static void require_compatible(const MultiPoly& a, const MultiPoly& b) {
    if (a.num_vars() != b.num_vars())
        throw DomainError("variable count mismatch in polynomial arithmetic");
    if (a.domain() != b.domain())
        throw DomainError("coefficient domain mismatch (exact vs approx)");
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
    require_compatible(a, b);
    MultiPoly out = a;
    for (const auto& [m, c] : b.terms()) out.add_term(m, c);
    return out;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) {
    require_compatible(a, b);
    MultiPoly out = a;
    for (const auto& [m, c] : b.terms()) out.add_term(m, -c);
    return out;
}

namespace {
struct MonoHash {
    std::size_t operator()(const Monomial& m) const {
        std::size_t h = 1469598103934665603ull;
        for (int e : m) {
            h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};
}  // namespace

MultiPoly mul(const MultiPoly& a, const MultiPoly& b, std::size_t term_limit) {
    require_compatible(a, b);
    MultiPoly out(a.num_vars(), a.domain());
    if (a.is_zero() || b.is_zero()) return out;
    const MultiPoly& small = a.term_count() <= b.term_count() ? a : b;
    const MultiPoly& large = a.term_count() <= b.term_count() ? b : a;

    std::unordered_map<Monomial, Coefficient, MonoHash> acc;
    acc.reserve(large.term_count() * 2);
    Monomial m(a.num_vars());
    for (const auto& [ms, cs] : small.terms()) {
        for (const auto& [ml, cl] : large.terms()) {
            for (int i = 0; i < a.num_vars(); ++i) m[i] = ms[i] + ml[i];
            Coefficient p = cs * cl;
            auto it = acc.find(m);
            if (it == acc.end()) {
                if (!p.is_zero()) {
                    acc.emplace(m, std::move(p));
                    if (acc.size() > term_limit)
                        throw TermLimitExceeded("product exceeds term ceiling of " +
                                                std::to_string(term_limit));
                }
            } else {
                it->second = it->second + p;
            }
        }
    }
    MultiPoly::TermMap ordered;
    for (auto& [mm, cc] : acc)
        if (!cc.is_zero()) ordered.emplace(std::move(mm), std::move(cc));
    // rebuild through the public mutator-free path
    MultiPoly result(a.num_vars(), a.domain());
    for (auto& [mm, cc] : ordered) result.set_term(mm, cc);
    return result;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    return mul(a, b, kDefaultTermLimit);
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.num_vars_ == b.num_vars_ && a.domain_ == b.domain_ && a.terms_ == b.terms_;
}

MultiPoly MultiPoly::to_approx() const {
    if (domain_ == Domain::approx) return *this;
    MultiPoly out(num_vars_, Domain::approx);
    for (const auto& [m, c] : terms_) {
        auto z = c.to_complex();
        if (z.real() != 0.0 || z.imag() != 0.0)
            out.terms_.emplace(m, Coefficient::approx(z));
    }
    return out;
}

MultiPoly MultiPoly::substitute_one(int var_index) const {
    if (var_index < 0 || var_index >= num_vars_) throw DomainError("variable index out of range");
    if (num_vars_ < 2) throw DomainError("cannot eliminate the only variable");
    MultiPoly out(num_vars_ - 1, domain_);
    Monomial reduced(num_vars_ - 1);
    for (const auto& [m, c] : terms_) {
        int j = 0;
        for (int i = 0; i < num_vars_; ++i)
            if (i != var_index) reduced[j++] = m[i];
        out.add_term(reduced, c);
    }
    return out;
}

GaussianRational MultiPoly::eval_exact(const std::vector<GaussianRational>& point) const {
    if (domain_ != Domain::exact) throw DomainError("exact evaluation of approx polynomial");
    if (static_cast<int>(point.size()) != num_vars_)
        throw DomainError("evaluation point has wrong dimension");
    GaussianRational acc;
    for (const auto& [m, c] : terms_) {
        GaussianRational t = c.exact_value();
        for (int i = 0; i < num_vars_; ++i)
            for (int e = 0; e < m[i]; ++e) t = t * point[i];
        acc = acc + t;
    }
    return acc;
}

std::complex<double> MultiPoly::eval_complex(const std::vector<std::complex<double>>& point) const {
    if (static_cast<int>(point.size()) != num_vars_)
        throw DomainError("evaluation point has wrong dimension");
    std::complex<double> acc = 0.0;
    for (const auto& [m, c] : terms_) {
        std::complex<double> t = c.to_complex();
        for (int i = 0; i < num_vars_; ++i) {
            if (m[i] == 0) continue;
            std::complex<double> p = point[i];
            int e = m[i];
            std::complex<double> r = 1.0;
            while (e > 0) {
                if (e & 1) r *= p;
                p *= p;
                e >>= 1;
            }
            t *= r;
        }
        acc += t;
    }
    return acc;
}

MultiPoly homogeneous_part(const MultiPoly& p, int d) {
    MultiPoly out(p.num_vars(), p.domain());
    for (const auto& [mono, coeff] : p.terms())
        if (monomial_degree(mono) == d) out.set_term(mono, coeff);
    return out;
}

std::vector<std::string> default_var_names(int num_vars, bool homogeneous) {
    static const char* base[] = {"x", "y", "z", "w"};
    std::vector<std::string> names;
    int affine = homogeneous ? num_vars - 1 : num_vars;
    for (int i = 0; i < affine; ++i) {
        if (i < 4)
            names.push_back(base[i]);
        else
            names.push_back("x" + std::to_string(i + 1));
    }
    if (homogeneous) names.push_back("t");
    return names;
}

std::string MultiPoly::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::vector<std::string> vn = names.empty() ? default_var_names(num_vars_) : names;
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        std::string cs = c.to_string();
        if (!first) os << " + ";
        first = false;
        bool has_vars = monomial_degree(m) > 0;
        if (!has_vars || cs != "1") {
            bool needs_parens = cs.find('+') != std::string::npos ||
                                (cs.rfind('-') != std::string::npos && cs.rfind('-') > 0);
            if (needs_parens && has_vars)
                os << "(" << cs << ")";
            else
                os << cs;
            if (has_vars) os << "*";
        }
        bool firstv = true;
        for (int i = 0; i < num_vars_; ++i) {
            if (m[i] == 0) continue;
            if (!firstv) os << "*";
            firstv = false;
            os << vn[i];
            if (m[i] > 1) os << "^" << m[i];
        }
    }
    return os.str();
}

MultiPoly compose(const MultiPoly& p, const std::vector<MultiPoly>& maps,
                  std::size_t term_limit) {
    if (maps.empty()) throw DomainError("compose requires at least one substituted polynomial");
    if (static_cast<int>(maps.size()) != p.num_vars())
        throw DomainError("compose: substitution count must equal variable count");
    int out_vars = maps[0].num_vars();
    for (const auto& q : maps) {
        if (q.num_vars() != out_vars)
            throw DomainError("compose: substituted polynomials disagree on variable count");
        if (q.domain() != p.domain())
            throw DomainError("compose: coefficient domain mismatch");
    }
    // power cache per substituted variable
    std::vector<std::vector<MultiPoly>> powers(maps.size());
    auto power = [&](int i, int e) -> const MultiPoly& {
        auto& cache = powers[i];
        if (cache.empty())
            cache.push_back(MultiPoly::constant(out_vars,
                                                p.domain() == Domain::exact
                                                    ? Coefficient::exact(GaussianRational::integer(1))
                                                    : Coefficient::approx(1.0)));
        while (static_cast<int>(cache.size()) <= e)
            cache.push_back(mul(cache.back(), maps[i], term_limit));
        return cache[e];
    };

    MultiPoly out(out_vars, p.domain());
    for (const auto& [m, c] : p.terms()) {
        MultiPoly t = MultiPoly::constant(out_vars, c);
        for (int i = 0; i < p.num_vars(); ++i)
            if (m[i] > 0) t = mul(t, power(i, m[i]), term_limit);
        out = out + t;
        if (out.term_count() > term_limit)
            throw TermLimitExceeded("composition exceeds term ceiling of " +
                                    std::to_string(term_limit));
    }
    return out;
}

HomogPoly::HomogPoly(MultiPoly p) : poly_(std::move(p)), degree_(0) {
    if (poly_.num_vars() < 2)
        throw DomainError("homogeneous polynomial needs at least two variables");
    if (poly_.is_zero()) throw DomainError("zero polynomial is not a valid homogeneous form");
    auto it = poly_.terms().begin();
    degree_ = monomial_degree(it->first);
    for (const auto& [m, c] : poly_.terms())
        if (monomial_degree(m) != degree_)
            throw DomainError("polynomial is not homogeneous");
}

HomogPoly HomogPoly::divided_by_t(int m) const {
    if (m == 0) return *this;
    MultiPoly out(poly_.num_vars(), poly_.domain());
    int t_index = poly_.num_vars() - 1;
    for (const auto& [mono, c] : poly_.terms()) {
        if (mono[t_index] < m) throw DomainError("polynomial is not divisible by t^" + std::to_string(m));
        Monomial reduced = mono;
        reduced[t_index] -= m;
        out.set_term(reduced, c);
    }
    return HomogPoly(out);
}

HomogPoly homogenize(const MultiPoly& p, int target_degree) {
    if (p.is_zero()) throw DomainError("cannot homogenize the zero polynomial");
    auto d = p.total_degree();
    if (target_degree < *d)
        throw DomainError("homogenization target degree below polynomial degree");
    MultiPoly out(p.num_vars() + 1, p.domain());
    Monomial padded(p.num_vars() + 1);
    for (const auto& [m, c] : p.terms()) {
        for (int i = 0; i < p.num_vars(); ++i) padded[i] = m[i];
        padded[p.num_vars()] = target_degree - monomial_degree(m);
        out.set_term(padded, c);
    }
    return HomogPoly(out);
}

int t_adic_valuation(const HomogPoly& h) {
    if (h.poly().domain() != Domain::exact)
        throw DomainError("t-adic valuation requires the exact domain");
    int t_index = h.poly().num_vars() - 1;
    int v = h.degree() + 1;
    for (const auto& [m, c] : h.poly().terms()) v = std::min(v, m[t_index]);
    return v;
}

int vanishing_order(const MultiPoly& p, const std::vector<GaussianRational>& point) {
    if (p.domain() != Domain::exact)
        throw DomainError("vanishing order requires the exact domain");
    if (p.is_zero()) throw DomainError("vanishing order of the zero polynomial is undefined");
    if (static_cast<int>(point.size()) != p.num_vars())
        throw DomainError("point dimension mismatch");
    std::vector<MultiPoly> shift;
    for (int i = 0; i < p.num_vars(); ++i) {
        MultiPoly s = MultiPoly::variable(p.num_vars(), i);
        s.add_term(Monomial(p.num_vars(), 0), Coefficient::exact(point[i]));
        shift.push_back(s);
    }
    MultiPoly translated = compose(p, shift);
    // lowest total degree of a term = first entry in graded-lex order
    return monomial_degree(translated.terms().begin()->first);
}

}  // namespace polydyn
