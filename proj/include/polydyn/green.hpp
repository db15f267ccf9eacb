#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "polydyn/automorphism.hpp"
#include "polydyn/pullback.hpp"

namespace polydyn {

using ComplexPoint = std::vector<std::complex<double>>;

struct GreenParams {
    double escape_radius = 1e8;
    int max_iter = 200;
    // log-space steps taken after escape; each one shrinks the truncation
    // error by roughly the first degree
    int refine_steps = 30;
};

struct GreenEvaluation {
    ComplexPoint point;
    double value = 0.0;
    int iterations = 0;
    double cauchy_increment = 0.0;
    bool escaped = false;
};

// escape-rate potential in the affine chart: lambda^{-n} log ||f^n(z)|| once
// the orbit leaves the escape radius, refined past float range by iterating
// the scale/direction split (L, u) with z_n = u * exp(L). A non-escaping
// orbit within budget reports 0 with escaped=false, a budgeted verdict.
GreenEvaluation green_plus(const PolyAutomorphism& f, const ComplexPoint& z,
                           const GreenParams& params = {});

// |G(f(z)) - lambda * G(z)|
double green_functional_residual(const PolyAutomorphism& f, const ComplexPoint& z,
                                 const GreenParams& params = {});

struct ConvergenceRow {
    int point_index = 0;
    int n = 0;
    double shifted_potential = 0.0;  // lambda^{-n} log |h(f^n(z))|
    double target = 0.0;             // (1 - c_S) * G(z)
    double deviation = 0.0;
    bool excluded = false;  // orbit met the divisor's zero set at this step
};

struct ConvergenceTable {
    Rational c_s;  // exact coefficient behind the target
    std::vector<ConvergenceRow> rows;
};

// per-point, per-step comparison of the shifted divisor potential against
// its predicted limit; judgement is the caller's job. The coefficient comes
// from the exact Siu route and must have stabilized.
ConvergenceTable potential_convergence_experiment(const PolyAutomorphism& f, const Divisor& s,
                                                  const std::vector<ComplexPoint>& grid,
                                                  int n_max, const GreenParams& params = {});

struct OrbitVerdict {
    ComplexPoint point;
    std::optional<bool> forward_bounded;
    std::optional<bool> backward_bounded;
    int budget = 0;
};

// escape/revisit/budget verdicts in both directions; nullopt means the
// budget ran out before either resolution, never a silent false
std::vector<OrbitVerdict> orbit_verdicts(const PolyAutomorphism& f,
                                         const std::vector<ComplexPoint>& points, int budget);

// deterministic sample of points whose forward orbit escapes within budget;
// coordinate magnitudes are log-uniform in [lo, hi]
std::vector<ComplexPoint> escaping_sample(const PolyAutomorphism& f, int count,
                                          std::uint64_t seed, double lo = 10.0,
                                          double hi = 1e3, const GreenParams& params = {});

}  // namespace polydyn
