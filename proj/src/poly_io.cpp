#include "polydyn/poly_io.hpp"

#include <fstream>
#include <limits>

#include "polydyn/errors.hpp"

namespace polydyn {

namespace {

nlohmann::json integer_to_json(const mpz_class& z) {
    if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
    return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return mpz_class(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) {
        try {
            return mpz_class(j.get<std::string>());
        } catch (const std::invalid_argument&) {
            throw InputError("invalid integer literal '" + j.get<std::string>() + "'");
        }
    }
    throw InputError("integer must be a JSON int or a decimal string");
}

}  // namespace

nlohmann::json rational_to_json(const Rational& r) {
    return nlohmann::json::array({integer_to_json(r.get_num()), integer_to_json(r.get_den())});
}

Rational rational_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InputError("rational must be a [num, den] pair");
    mpz_class num = integer_from_json(j[0]);
    mpz_class den = integer_from_json(j[1]);
    if (den == 0) throw InputError("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

nlohmann::json poly_to_json(const MultiPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [mono, coeff] : p.terms()) {
        nlohmann::json entry;
        entry["e"] = mono;
        if (p.domain() == Domain::exact) {
            const GaussianRational& v = coeff.exact_value();
            entry["re"] = rational_to_json(v.re());
            entry["im"] = rational_to_json(v.im());
        } else {
            std::complex<double> v = coeff.approx_value();
            entry["re"] = v.real();
            entry["im"] = v.imag();
        }
        terms.push_back(std::move(entry));
    }
    return nlohmann::json{{"vars", p.num_vars()},
                          {"domain", domain_name(p.domain())},
                          {"terms", std::move(terms)}};
}

MultiPoly poly_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("polynomial must be a JSON object");
    if (!j.contains("vars") || !j["vars"].is_number_integer())
        throw InputError("polynomial needs an integer 'vars' field");
    int vars = j["vars"].get<int>();
    if (vars < 1) throw InputError("polynomial needs at least one variable");

    Domain domain = Domain::exact;
    if (j.contains("domain")) {
        std::string d = j["domain"].get<std::string>();
        if (d == "exact")
            domain = Domain::exact;
        else if (d == "approx")
            domain = Domain::approx;
        else
            throw InputError("unknown coefficient domain '" + d + "'");
    }

    MultiPoly p(vars, domain);
    if (!j.contains("terms") || !j["terms"].is_array())
        throw InputError("polynomial needs a 'terms' array");
    for (const auto& entry : j["terms"]) {
        if (!entry.contains("e") || !entry["e"].is_array())
            throw InputError("term needs an exponent array 'e'");
        Monomial mono = entry["e"].get<Monomial>();
        if (static_cast<int>(mono.size()) != vars)
            throw InputError("term exponent arity disagrees with 'vars'");
        const nlohmann::json zero_pair = nlohmann::json::array({0, 1});
        const nlohmann::json& re = entry.contains("re") ? entry["re"] : zero_pair;
        const nlohmann::json& im = entry.contains("im") ? entry["im"] : zero_pair;
        if (domain == Domain::exact) {
            GaussianRational c(rational_from_json(re), rational_from_json(im));
            p.add_term(mono, Coefficient::exact(c));
        } else {
            if (!re.is_number() || !im.is_number())
                throw InputError("approx coefficients must be JSON numbers");
            p.add_term(mono, Coefficient::approx({re.get<double>(), im.get<double>()}));
        }
    }
    return p;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("malformed JSON in '" + path + "': " + e.what());
    }
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace polydyn
