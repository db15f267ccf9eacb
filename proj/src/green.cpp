#include "polydyn/green.hpp"

#include <cmath>
#include <limits>

#include "polydyn/errors.hpp"
#include "polydyn/modline.hpp"

namespace polydyn {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

// flat term list for tight evaluation loops; coefficients forced to complex
struct CompiledTerm {
    std::complex<double> coeff;
    Monomial exps;
};

struct CompiledPoly {
    std::vector<CompiledTerm> terms;
};

CompiledPoly compile(const MultiPoly& p) {
    CompiledPoly out;
    out.terms.reserve(p.term_count());
    for (const auto& [mono, coeff] : p.terms()) out.terms.push_back({coeff.to_complex(), mono});
    return out;
}

std::vector<CompiledPoly> compile_components(const std::vector<MultiPoly>& comps) {
    std::vector<CompiledPoly> out;
    out.reserve(comps.size());
    for (const MultiPoly& c : comps) out.push_back(compile(c));
    return out;
}

std::complex<double> eval_terms(const CompiledPoly& p, const ComplexPoint& z) {
    std::complex<double> acc{0.0, 0.0};
    for (const CompiledTerm& t : p.terms) {
        std::complex<double> v = t.coeff;
        for (std::size_t j = 0; j < t.exps.size(); ++j)
            for (int e = 0; e < t.exps[j]; ++e) v *= z[j];
        acc += v;
    }
    return acc;
}

ComplexPoint apply_components(const std::vector<CompiledPoly>& comps, const ComplexPoint& z) {
    ComplexPoint out(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) out[i] = eval_terms(comps[i], z);
    return out;
}

double sup_norm(const ComplexPoint& z) {
    double m = 0.0;
    for (const auto& c : z) m = std::max(m, std::abs(c));
    return m;
}

bool all_finite(const ComplexPoint& z) {
    for (const auto& c : z)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// Orbit point past float range: coordinate i is dir[i] * exp(log_mag[i]),
// with |dir[i]| = 1 and log_mag[i] = -inf, dir[i] = 0 for an exact zero.
// Per-coordinate scales keep lagging coordinates alive; a single shared
// scale would underflow them (their ratio to the sup norm shrinks
// double-exponentially along escaping orbits).
struct LogPoint {
    std::vector<double> log_mag;
    ComplexPoint dir;
};

LogPoint from_raw(const ComplexPoint& z) {
    LogPoint pt;
    pt.log_mag.resize(z.size());
    pt.dir.resize(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        double mag = std::abs(z[i]);
        if (mag == 0.0) {
            pt.log_mag[i] = kMinusInf;
            pt.dir[i] = 0.0;
        } else {
            pt.log_mag[i] = std::log(mag);
            pt.dir[i] = z[i] / mag;
        }
    }
    return pt;
}

double sup_log(const LogPoint& pt) {
    double m = kMinusInf;
    for (double l : pt.log_mag) m = std::max(m, l);
    return m;
}

struct LogValue {
    double log_mag = kMinusInf;
    std::complex<double> dir{0.0, 0.0};
};

// p evaluated at a log point: factor the largest term weight out of the sum
// so every summand has modulus at most the coefficient's
LogValue eval_log(const CompiledPoly& p, const LogPoint& pt) {
    std::vector<double> weight(p.terms.size(), kMinusInf);
    double top = kMinusInf;
    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        double w = 0.0;
        bool dead = false;
        const Monomial& e = p.terms[t].exps;
        for (std::size_t j = 0; j < e.size(); ++j) {
            if (e[j] == 0) continue;
            if (pt.log_mag[j] == kMinusInf) {
                dead = true;
                break;
            }
            w += e[j] * pt.log_mag[j];
        }
        if (dead) continue;
        weight[t] = w;
        top = std::max(top, w);
    }
    if (top == kMinusInf) return {};

    std::complex<double> sum{0.0, 0.0};
    for (std::size_t t = 0; t < p.terms.size(); ++t) {
        if (weight[t] == kMinusInf) continue;
        std::complex<double> v = p.terms[t].coeff * std::exp(weight[t] - top);
        const Monomial& e = p.terms[t].exps;
        for (std::size_t j = 0; j < e.size(); ++j)
            for (int rep = 0; rep < e[j]; ++rep) v *= pt.dir[j];
        sum += v;
    }
    double mag = std::abs(sum);
    if (mag == 0.0) return {};
    return {top + std::log(mag), sum / mag};
}

// One application of the map in log space. Stops (state untouched) only when
// the image is the origin or the scale collapses back to order one, i.e. the
// radius crossing was spurious; individual coordinates may lag or vanish.
bool advance_log(const std::vector<CompiledPoly>& comps, LogPoint& pt) {
    LogPoint next;
    next.log_mag.resize(comps.size());
    next.dir.resize(comps.size());
    double top = kMinusInf;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        LogValue v = eval_log(comps[i], pt);
        next.log_mag[i] = v.log_mag;
        next.dir[i] = v.dir;
        top = std::max(top, v.log_mag);
    }
    if (top == kMinusInf || top <= 0.0 || !std::isfinite(top)) return false;
    pt = std::move(next);
    return true;
}

void check_point_dimension(const PolyAutomorphism& f, const ComplexPoint& z) {
    if (static_cast<int>(z.size()) != f.dimension())
        throw DomainError("point dimension does not match the map");
}

void check_expanding_degree(const PolyAutomorphism& f) {
    if (f.first_degree() < 2)
        throw PreconditionFailed(
            "escape-rate potential needs first degree at least 2; degree-1 maps have no "
            "exponential escape scale");
}

}  // namespace

GreenEvaluation green_plus(const PolyAutomorphism& f, const ComplexPoint& z,
                           const GreenParams& params) {
    check_point_dimension(f, z);
    check_expanding_degree(f);
    if (!all_finite(z)) throw DomainError("point has non-finite coordinates");
    const double lambda = static_cast<double>(f.first_degree());
    const std::vector<CompiledPoly> comps = compile_components(f.forward_components());

    GreenEvaluation out;
    out.point = z;

    ComplexPoint cur = z;
    int n = 0;
    while (sup_norm(cur) <= params.escape_radius) {
        if (n >= params.max_iter) {
            out.iterations = n;
            return out;  // budgeted verdict: no escape seen, G = 0
        }
        cur = apply_components(comps, cur);
        ++n;
        if (!all_finite(cur))
            throw EscapeOverflow(
                "orbit overflowed float64 before crossing the escape radius; retry with a "
                "smaller escape_radius");
    }

    out.escaped = true;
    LogPoint pt = from_raw(cur);
    double estimate = sup_log(pt) / std::pow(lambda, n);
    double increment = 0.0;
    for (int step = 0; step < params.refine_steps; ++step) {
        if (!advance_log(comps, pt)) break;
        ++n;
        double next = sup_log(pt) / std::pow(lambda, n);
        increment = std::abs(next - estimate);
        estimate = next;
    }
    out.value = estimate;
    out.iterations = n;
    out.cauchy_increment = increment;
    return out;
}

double green_functional_residual(const PolyAutomorphism& f, const ComplexPoint& z,
                                 const GreenParams& params) {
    check_point_dimension(f, z);
    const std::vector<CompiledPoly> comps = compile_components(f.forward_components());
    ComplexPoint image = apply_components(comps, z);
    if (!all_finite(image)) throw EscapeOverflow("image of the point overflowed float64");
    double g_here = green_plus(f, z, params).value;
    double g_image = green_plus(f, image, params).value;
    return std::abs(g_image - static_cast<double>(f.first_degree()) * g_here);
}

ConvergenceTable potential_convergence_experiment(const PolyAutomorphism& f, const Divisor& s,
                                                  const std::vector<ComplexPoint>& grid,
                                                  int n_max, const GreenParams& params) {
    check_expanding_degree(f);
    if (s.ambient_vars() != f.dimension() + 1)
        throw DomainError("divisor lives in a different projective space than the map");
    if (n_max < 0) throw PreconditionFailed("n_max must be nonnegative");

    const int kStabilizeHorizon = 8;
    CLimitResult limit = c_limit(f, s, kStabilizeHorizon);
    if (!limit.stabilized)
        throw PreconditionFailed(
            "exact Siu coefficient did not stabilize; the experiment has no target");

    ConvergenceTable table;
    table.c_s = limit.value();
    const double target_factor = 1.0 - table.c_s.get_d();
    const double lambda = static_cast<double>(f.first_degree());
    const std::vector<CompiledPoly> comps = compile_components(f.forward_components());
    const CompiledPoly chart_form = compile(s.form().dehomogenized());

    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        const ComplexPoint& z = grid[idx];
        check_point_dimension(f, z);
        const double target = target_factor * green_plus(f, z, params).value;

        ComplexPoint cur = z;
        bool in_log_phase = false;
        bool dead = false;  // log-phase image degenerated; no further values
        LogPoint pt;
        for (int n = 0; n <= n_max; ++n) {
            ConvergenceRow row;
            row.point_index = static_cast<int>(idx);
            row.n = n;
            row.target = target;

            double log_h = kMinusInf;
            if (!dead) {
                if (!in_log_phase) {
                    double mag = std::abs(eval_terms(chart_form, cur));
                    log_h = mag == 0.0 ? kMinusInf : std::log(mag);
                } else {
                    log_h = eval_log(chart_form, pt).log_mag;
                }
            }
            if (log_h == kMinusInf) {
                row.excluded = true;  // orbit met the divisor's zero set
            } else {
                row.shifted_potential = log_h / std::pow(lambda, n);
                row.deviation = std::abs(row.shifted_potential - target);
            }
            table.rows.push_back(row);

            if (n == n_max || dead) continue;
            if (!in_log_phase) {
                cur = apply_components(comps, cur);
                if (!all_finite(cur))
                    throw EscapeOverflow(
                        "orbit overflowed float64 before crossing the escape radius; retry "
                        "with a smaller escape_radius");
                if (sup_norm(cur) > params.escape_radius) {
                    pt = from_raw(cur);
                    in_log_phase = true;
                }
            } else if (!advance_log(comps, pt)) {
                dead = true;
            }
        }
    }
    return table;
}

std::vector<OrbitVerdict> orbit_verdicts(const PolyAutomorphism& f,
                                         const std::vector<ComplexPoint>& points, int budget) {
    if (budget < 0) throw PreconditionFailed("budget must be nonnegative");
    const std::vector<CompiledPoly> fwd = compile_components(f.forward_components());
    const std::vector<CompiledPoly> inv = compile_components(f.inverse_components());
    const double radius = GreenParams{}.escape_radius;

    auto one_direction = [&](const std::vector<CompiledPoly>& comps,
                             const ComplexPoint& start) -> std::optional<bool> {
        std::vector<ComplexPoint> visited{start};
        ComplexPoint cur = start;
        for (int step = 0; step < budget; ++step) {
            cur = apply_components(comps, cur);
            if (!all_finite(cur) || sup_norm(cur) > radius) return false;
            for (const ComplexPoint& seen : visited)
                if (seen == cur) return true;  // exact revisit: periodic orbit
            visited.push_back(cur);
        }
        return std::nullopt;
    };

    std::vector<OrbitVerdict> out;
    out.reserve(points.size());
    for (const ComplexPoint& p : points) {
        check_point_dimension(f, p);
        OrbitVerdict v;
        v.point = p;
        v.budget = budget;
        v.forward_bounded = one_direction(fwd, p);
        v.backward_bounded = one_direction(inv, p);
        out.push_back(v);
    }
    return out;
}

std::vector<ComplexPoint> escaping_sample(const PolyAutomorphism& f, int count,
                                          std::uint64_t seed, double lo, double hi,
                                          const GreenParams& params) {
    if (count < 0) throw PreconditionFailed("sample count must be nonnegative");
    if (!(lo > 0.0) || !(hi >= lo)) throw PreconditionFailed("need 0 < lo <= hi");
    SplitMix64 rng(seed);
    std::vector<ComplexPoint> out;
    out.reserve(count);
    const int k = f.dimension();
    const double two_pi = 8.0 * std::atan(1.0);
    int attempts = 0;
    const int attempt_cap = 200 * count + 200;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > attempt_cap)
            throw PreconditionFailed("failed to find enough escaping points in the sample box");
        ComplexPoint z(k);
        for (int i = 0; i < k; ++i) {
            double mag = lo * std::pow(hi / lo, rng.next_unit());
            double phase = two_pi * rng.next_unit();
            z[i] = std::polar(mag, phase);
        }
        if (green_plus(f, z, params).escaped) out.push_back(std::move(z));
    }
    return out;
}

}  // namespace polydyn
