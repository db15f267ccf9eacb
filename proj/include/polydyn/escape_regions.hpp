#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polydyn/multipoly.hpp"

namespace polydyn {

using SpacePoint = std::array<std::complex<double>, 3>;

// Coefficients of the class-4 normal form (x^2 - xz + c + y, a z, b x + c')
// together with the region level R. alpha and epsilon are derived on demand
// so they can never go stale.
struct RegionParams {
    std::complex<double> a{1.0, 0.0};
    std::complex<double> b{0.5, 0.0};
    std::complex<double> c{0.0, 0.0};
    std::complex<double> c_prime{0.0, 0.0};
    double R = 1e4;

    double alpha() const;
    // 0.9 of the largest value with |b| < (1-2e)/(1+e); empty when |b| >= 1
    std::optional<double> epsilon() const;
    void validate() const;
};

SpacePoint class4_image(const RegionParams& params, const SpacePoint& p);
// closed-form inverse obtained by solving the triangular system; the
// constant in the first coordinate comes out as -c'/b rather than being
// transcribed
SpacePoint class4_preimage(const RegionParams& params, const SpacePoint& p);

struct RegionMembership {
    bool in_v = false;
    bool in_w = false;
};

// strict-inequality membership in
//   V_R = { max(2a|y|, |z|) > max(2R, R^{1/3}|x|) }
//   W_R = { max(a|y|, |x|)  > max(R,  R^{1/3}|x-z|) }   with a = alpha
RegionMembership region_membership(const SpacePoint& p, const RegionParams& params);

struct InclusionViolation {
    char source = 'V';  // which left-hand region the sample came from
    long long sample_index = 0;
    SpacePoint point;
    SpacePoint preimage;
};

struct InclusionReport {
    std::vector<InclusionViolation> violations;
    long long checked = 0;
};

// Randomized check of the two preimage inclusions
//   g^{-1}(V_R) in V_{2R} union W_{2R}
//   g^{-1}(W_R) in V_{2R} union W_{(1+eps)R}
// drawing `samples` seeded points in each left-hand region. Requires |b| < 1.
// The corrupted control doubles the right-hand levels, shrinking the target
// union; it exists to prove the harness can see violations at all.
InclusionReport verify_inclusions(const RegionParams& params, double R, long long samples,
                                  std::uint64_t seed, bool corrupted_control = false);

struct InvariantLineReport {
    bool applicable = false;
    bool verified = false;
    std::string note;
};

// For exact coefficients with c = c' = 0 and a = b^2 the line (w, b w, w) is
// invariant; verified symbolically in one variable. With |b| >= 1 this is
// the witness that the inverse map does not attract toward infinity.
InvariantLineReport invariant_line_check(const GaussianRational& a, const GaussianRational& b,
                                         const GaussianRational& c,
                                         const GaussianRational& c_prime);

}  // namespace polydyn
