#include "polydyn/modline.hpp"

#include "polydyn/errors.hpp"

namespace polydyn {

namespace {

// all = 3 (mod 4), so x^2 + 1 stays irreducible and F_p[i] is a field
constexpr std::uint64_t kLinePrimes[] = {2305843009213693951ULL,  // 2^61 - 1
                                         1000000007ULL, 2147483647ULL};

}  // namespace

std::uint64_t LineDegreeTracker::add(std::uint64_t a, std::uint64_t b) const {
    unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
    return static_cast<std::uint64_t>(s % p_);
}

std::uint64_t LineDegreeTracker::sub(std::uint64_t a, std::uint64_t b) const {
    return add(a, p_ - b % p_);
}

std::uint64_t LineDegreeTracker::mul(std::uint64_t a, std::uint64_t b) const {
    unsigned __int128 s = static_cast<unsigned __int128>(a) * b;
    return static_cast<std::uint64_t>(s % p_);
}

std::uint64_t LineDegreeTracker::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    a %= p_;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

LineDegreeTracker::Fp2 LineDegreeTracker::fadd(Fp2 a, Fp2 b) const {
    return {add(a.re, b.re), add(a.im, b.im)};
}

LineDegreeTracker::Fp2 LineDegreeTracker::fmul(Fp2 a, Fp2 b) const {
    return {sub(mul(a.re, b.re), mul(a.im, b.im)),
            add(mul(a.re, b.im), mul(a.im, b.re))};
}

LineDegreeTracker::Upoly LineDegreeTracker::umul(const Upoly& a, const Upoly& b) const {
    if (a.empty() || b.empty()) return {};
    Upoly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (fzero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] = fadd(out[i + j], fmul(a[i], b[j]));
    }
    trim(out);
    return out;
}

void LineDegreeTracker::uadd_scaled(Upoly& acc, const Upoly& a, Fp2 c) const {
    if (acc.size() < a.size()) acc.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) acc[i] = fadd(acc[i], fmul(a[i], c));
}

void LineDegreeTracker::trim(Upoly& u) {
    while (!u.empty() && u.back().re == 0 && u.back().im == 0) u.pop_back();
}

bool LineDegreeTracker::load_map(const std::vector<MultiPoly>& map, std::uint64_t prime) {
    p_ = prime;
    comps_.clear();
    static_assert(sizeof(unsigned long) == 8, "prime reduction assumes 64-bit unsigned long");
    mpz_class pz(static_cast<unsigned long>(prime));
    auto reduce = [&](const Rational& r, std::uint64_t& out) {
        mpz_class dm = r.get_den() % pz;
        if (dm == 0) return false;
        mpz_class nm = r.get_num() % pz;
        if (nm < 0) nm += pz;
        std::uint64_t n64 = mpz_get_ui(nm.get_mpz_t());
        std::uint64_t d64 = mpz_get_ui(dm.get_mpz_t());
        out = mul(n64, pow(d64, prime - 2));
        return true;
    };
    for (const MultiPoly& comp : map) {
        std::vector<Term> terms;
        for (const auto& [mono, coeff] : comp.terms()) {
            const GaussianRational& v = coeff.exact_value();
            Term t;
            t.e = mono;
            if (!reduce(v.re(), t.c.re)) return false;
            if (!reduce(v.im(), t.c.im)) return false;
            terms.push_back(std::move(t));
        }
        comps_.push_back(std::move(terms));
    }
    return true;
}

LineDegreeTracker::LineDegreeTracker(const std::vector<MultiPoly>& map, std::uint64_t seed) {
    if (map.empty()) throw DomainError("line tracker needs a nonempty map");
    vars_ = map.front().num_vars();
    for (const MultiPoly& c : map) {
        if (c.domain() != Domain::exact)
            throw DomainError("line tracker requires the exact domain");
        if (c.num_vars() != vars_)
            throw DomainError("line tracker components disagree on variable count");
    }
    for (std::uint64_t prime : kLinePrimes) {
        if (load_map(map, prime)) {
            valid_ = true;
            break;
        }
    }
    if (!valid_) return;

    SplitMix64 rng(seed);
    state_.resize(vars_);
    for (int i = 0; i < vars_; ++i) {
        std::uint64_t a = rng.next() % p_;
        std::uint64_t b = 0;
        while (b == 0) b = rng.next() % p_;
        state_[i] = Upoly{{a, 0}, {b, 0}};
    }
}

void LineDegreeTracker::advance() {
    if (!valid_) throw PreconditionFailed("line tracker has no usable prime");
    int max_exp = 0;
    for (const auto& terms : comps_)
        for (const Term& t : terms)
            for (int e : t.e) max_exp = std::max(max_exp, e);

    std::vector<std::vector<Upoly>> powers(vars_);
    for (int i = 0; i < vars_; ++i) {
        powers[i].resize(max_exp + 1);
        powers[i][0] = Upoly{{1, 0}};
        for (int e = 1; e <= max_exp; ++e) powers[i][e] = umul(powers[i][e - 1], state_[i]);
    }

    std::vector<Upoly> next(comps_.size());
    for (std::size_t j = 0; j < comps_.size(); ++j) {
        Upoly acc;
        for (const Term& t : comps_[j]) {
            Upoly prod{{1, 0}};
            for (int i = 0; i < vars_; ++i)
                if (t.e[i] > 0) prod = umul(prod, powers[i][t.e[i]]);
            uadd_scaled(acc, prod, t.c);
        }
        trim(acc);
        next[j] = std::move(acc);
    }
    state_ = std::move(next);
    ++steps_;
}

long long LineDegreeTracker::degree() const {
    long long best = -1;
    for (const Upoly& u : state_)
        best = std::max(best, static_cast<long long>(u.size()) - 1);
    return best;
}

}  // namespace polydyn
