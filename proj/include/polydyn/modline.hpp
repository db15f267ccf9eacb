#pragma once

#include <cstdint>
#include <vector>

#include "polydyn/multipoly.hpp"

namespace polydyn {

// splitmix64: the deterministic stream behind every seeded draw in the project
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform double in [0, 1)
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Tracks the degree of iterates restricted to a random affine line, with
// coefficients reduced modulo a large prime p = 3 (mod 4) so that i stays
// a field element. Each advance() applies the map once more; degree() is
// then a certified lower bound for the first algebraic degree of the
// iterate, since restriction and reduction can only lower degrees.
class LineDegreeTracker {
  public:
    LineDegreeTracker(const std::vector<MultiPoly>& map, std::uint64_t seed);

    // false when every candidate prime divides some coefficient denominator
    bool valid() const { return valid_; }
    std::uint64_t prime() const { return p_; }
    void advance();
    int steps() const { return steps_; }
    long long degree() const;

  private:
    struct Fp2 {
        std::uint64_t re = 0, im = 0;
    };
    using Upoly = std::vector<Fp2>;  // dense coefficient list in the line parameter
    struct Term {
        Fp2 c;
        Monomial e;
    };

    std::uint64_t p_ = 0;
    bool valid_ = false;
    int vars_ = 0;
    std::vector<std::vector<Term>> comps_;
    std::vector<Upoly> state_;
    int steps_ = 0;

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
    Fp2 fadd(Fp2 a, Fp2 b) const;
    Fp2 fmul(Fp2 a, Fp2 b) const;
    bool fzero(Fp2 a) const { return a.re == 0 && a.im == 0; }
    Upoly umul(const Upoly& a, const Upoly& b) const;
    void uadd_scaled(Upoly& acc, const Upoly& a, Fp2 c) const;
    static void trim(Upoly& u);

    bool load_map(const std::vector<MultiPoly>& map, std::uint64_t prime);
};

}  // namespace polydyn
