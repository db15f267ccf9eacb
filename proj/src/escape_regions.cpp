#include "polydyn/escape_regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "polydyn/errors.hpp"
#include "polydyn/modline.hpp"

namespace polydyn {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double log_uniform(SplitMix64& rng, double lo, double hi) {
    return lo * std::pow(hi / lo, rng.next_unit());
}

std::complex<double> random_phase(SplitMix64& rng, double magnitude) {
    return std::polar(magnitude, kTwoPi * rng.next_unit());
}

// independent stream per (seed, region tag, sample index); SplitMix64's
// output scrambler decorrelates nearby states
SplitMix64 sample_stream(std::uint64_t seed, char tag, long long index) {
    std::uint64_t h = seed;
    h ^= 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(tag);
    h += 0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(index + 1);
    return SplitMix64(h);
}

// winning magnitude strictly above the right-hand bound: mostly well inside
// (up to three decades), one fifth hugging the boundary
double winning_magnitude(SplitMix64& rng, double bound) {
    if (rng.next_unit() < 0.2) return bound * (1.0 + log_uniform(rng, 1e-6, 1e-2));
    return log_uniform(rng, bound * 1.02, bound * 1e3);
}

// magnitude for a coordinate that must stay at or below a cap, biased toward
// the cap where the proof's case split changes hands
double subordinate_magnitude(SplitMix64& rng, double cap) {
    if (rng.next_unit() < 0.2) return cap * (1.0 - log_uniform(rng, 1e-6, 1e-2));
    return log_uniform(rng, 1e-3, cap);
}

std::complex<double> aligned_y(SplitMix64& rng, const RegionParams& q,
                               const std::complex<double>& z) {
    // y/a close to z/b: the delicate direction of the proof's final case
    return (q.a / q.b) * z * (1.0 + 0.01 * (2.0 * rng.next_unit() - 1.0));
}

SpacePoint draw_in_v(SplitMix64& rng, const RegionParams& q, double r_level) {
    const double alpha = q.alpha();
    const double root3 = std::cbrt(r_level);
    const double x_pivot = 2.0 * std::pow(r_level, 2.0 / 3.0);  // where R^{1/3}|x| passes 2R

    double mag_x = rng.next_unit() < 0.5 ? log_uniform(rng, 1e-3, x_pivot)
                                         : log_uniform(rng, x_pivot, 1e3 * x_pivot);
    std::complex<double> x = random_phase(rng, mag_x);
    const double bound = std::max(2.0 * r_level, root3 * std::abs(x));
    const double winner = winning_magnitude(rng, bound);

    std::complex<double> y, z;
    if (rng.next_unit() < 0.5) {
        y = random_phase(rng, winner / (2.0 * alpha));
        z = random_phase(rng, subordinate_magnitude(rng, winner));
    } else {
        z = random_phase(rng, winner);
        y = rng.next_unit() < 0.2
                ? aligned_y(rng, q, z)
                : random_phase(rng, subordinate_magnitude(rng, winner / (2.0 * alpha)));
    }
    return {x, y, z};
}

SpacePoint draw_in_w(SplitMix64& rng, const RegionParams& q, double r_level) {
    const double alpha = q.alpha();
    const double root3 = std::cbrt(r_level);
    const double gap_pivot = std::pow(r_level, 2.0 / 3.0);  // where R^{1/3}|x-z| passes R

    double mag_gap = rng.next_unit() < 0.5 ? log_uniform(rng, 1e-3, gap_pivot)
                                           : log_uniform(rng, gap_pivot, 1e3 * gap_pivot);
    std::complex<double> gap = random_phase(rng, mag_gap);
    const double bound = std::max(r_level, root3 * std::abs(gap));
    const double winner = winning_magnitude(rng, bound);

    std::complex<double> x, y;
    if (rng.next_unit() < 0.5) {
        y = random_phase(rng, winner / alpha);
        x = random_phase(rng, subordinate_magnitude(rng, winner));
    } else {
        x = random_phase(rng, winner);
        y = rng.next_unit() < 0.2
                ? aligned_y(rng, q, x - gap)
                : random_phase(rng, subordinate_magnitude(rng, winner / alpha));
    }
    return {x, y, x - gap};
}

int worker_count(long long samples) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("POLYDYN_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(std::min<long>(v, 64));
    }
    long long by_load = std::max<long long>(1, samples / 4096);
    return static_cast<int>(std::min<long long>(n, by_load));
}

}  // namespace

double RegionParams::alpha() const {
    validate();
    return std::abs(b) / (4.0 * std::abs(a));
}

std::optional<double> RegionParams::epsilon() const {
    validate();
    double mag = std::abs(b);
    if (mag >= 1.0) return std::nullopt;
    return 0.9 * (1.0 - mag) / (2.0 + mag);
}

void RegionParams::validate() const {
    if (a == std::complex<double>{} || b == std::complex<double>{})
        throw CoefficientDegeneracy("class-4 coefficients need a != 0 and b != 0");
    if (!(R > 1.0)) throw PreconditionFailed("region level R must exceed 1");
}

SpacePoint class4_image(const RegionParams& params, const SpacePoint& p) {
    params.validate();
    return {p[0] * p[0] - p[0] * p[2] + params.c + p[1], params.a * p[2],
            params.b * p[0] + params.c_prime};
}

SpacePoint class4_preimage(const RegionParams& params, const SpacePoint& p) {
    params.validate();
    std::complex<double> first = (p[2] - params.c_prime) / params.b;
    std::complex<double> last = p[1] / params.a;
    return {first, p[0] - first * (first - last) - params.c, last};
}

RegionMembership region_membership(const SpacePoint& p, const RegionParams& params) {
    const double alpha = params.alpha();  // validates
    const double root3 = std::cbrt(params.R);
    const double ax = std::abs(p[0]), ay = std::abs(p[1]), az = std::abs(p[2]);
    RegionMembership m;
    m.in_v = std::max(2.0 * alpha * ay, az) > std::max(2.0 * params.R, root3 * ax);
    m.in_w = std::max(alpha * ay, ax) > std::max(params.R, root3 * std::abs(p[0] - p[2]));
    return m;
}

InclusionReport verify_inclusions(const RegionParams& params, double R, long long samples,
                                  std::uint64_t seed, bool corrupted_control) {
    params.validate();
    if (!(R > 1.0)) throw PreconditionFailed("region level R must exceed 1");
    if (samples < 0) throw PreconditionFailed("sample count must be nonnegative");
    std::optional<double> eps = params.epsilon();
    if (!eps)
        throw PreconditionFailed(
            "the inclusion system requires |b| < 1; with |b| >= 1 the plane at infinity is "
            "not attracting for the inverse map");

    const double blow = corrupted_control ? 2.0 : 1.0;
    RegionParams source_v = params;
    source_v.R = R;
    RegionParams source_w = source_v;
    RegionParams target_double = params;
    target_double.R = 2.0 * R * blow;
    RegionParams target_eps = params;
    target_eps.R = (1.0 + *eps) * R * blow;

    struct Chunk {
        std::vector<InclusionViolation> violations;
    };
    const int workers = worker_count(samples);
    std::vector<Chunk> chunks(workers);

    auto run_range = [&](int w, long long lo, long long hi) {
        for (long long i = lo; i < hi; ++i) {
            {
                SplitMix64 rng = sample_stream(seed, 'V', i);
                SpacePoint p = draw_in_v(rng, source_v, R);
                if (!region_membership(p, source_v).in_v)
                    throw DomainError("sampler produced a point outside V_R");
                SpacePoint pre = class4_preimage(params, p);
                RegionMembership m = region_membership(pre, target_double);
                if (!m.in_v && !m.in_w) chunks[w].violations.push_back({'V', i, p, pre});
            }
            {
                SplitMix64 rng = sample_stream(seed, 'W', i);
                SpacePoint p = draw_in_w(rng, source_w, R);
                if (!region_membership(p, source_w).in_w)
                    throw DomainError("sampler produced a point outside W_R");
                SpacePoint pre = class4_preimage(params, p);
                bool in_v = region_membership(pre, target_double).in_v;
                bool in_w = region_membership(pre, target_eps).in_w;
                if (!in_v && !in_w) chunks[w].violations.push_back({'W', i, p, pre});
            }
        }
    };

    if (workers == 1) {
        run_range(0, 0, samples);
    } else {
        std::vector<std::thread> pool;
        long long step = (samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long long lo = std::min<long long>(samples, w * step);
            long long hi = std::min<long long>(samples, lo + step);
            pool.emplace_back(run_range, w, lo, hi);
        }
        for (std::thread& t : pool) t.join();
    }

    InclusionReport report;
    report.checked = 2 * samples;
    for (Chunk& ch : chunks)
        report.violations.insert(report.violations.end(), ch.violations.begin(),
                                 ch.violations.end());
    return report;
}

InvariantLineReport invariant_line_check(const GaussianRational& a, const GaussianRational& b,
                                         const GaussianRational& c,
                                         const GaussianRational& c_prime) {
    InvariantLineReport rep;
    rep.applicable = c.is_zero() && c_prime.is_zero() && a == b * b;
    if (!rep.applicable) return rep;

    MultiPoly zeta = MultiPoly::variable(1, 0);
    MultiPoly line_x = zeta;
    MultiPoly line_y = zeta.scaled(Coefficient::exact(b));
    MultiPoly line_z = zeta;

    MultiPoly image_x = line_x * line_x - line_x * line_z + MultiPoly::constant(1, c) + line_y;
    MultiPoly image_y = line_z.scaled(Coefficient::exact(a));
    MultiPoly image_z = line_x.scaled(Coefficient::exact(b)) + MultiPoly::constant(1, c_prime);

    MultiPoly shifted_x = zeta.scaled(Coefficient::exact(b));
    MultiPoly shifted_y = zeta.scaled(Coefficient::exact(b * b));
    MultiPoly shifted_z = zeta.scaled(Coefficient::exact(b));

    rep.verified = image_x == shifted_x && image_y == shifted_y && image_z == shifted_z;
    if (rep.verified) {
        rep.note = "the map sends (w, b w, w) to (b w, b^2 w, b w)";
        if (b.norm2() >= Rational(1))
            rep.note +=
                "; with |b| >= 1 these orbits keep finite distance, so the plane at infinity "
                "is not attracting for the inverse map";
    }
    return rep;
}

}  // namespace polydyn
