// Regenerates the fixture corpus under fixtures/. Every map is built with
// its exact inverse and the automorphism constructor re-verifies both
// composition identities, so a bad fixture cannot be written.
#include <iostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polydyn/automorphism.hpp"
#include "polydyn/multipoly.hpp"
#include "polydyn/poly_io.hpp"
#include "polydyn/pullback.hpp"
#include "polydyn/rational.hpp"

using namespace polydyn;

namespace {

MultiPoly v3(int i) { return MultiPoly::variable(3, i); }

MultiPoly scaled(const MultiPoly& p, long num, long den = 1) {
    return p.scaled(Coefficient::exact(GaussianRational(make_rational(num, den), Rational(0))));
}

MultiPoly con3(long num, long den = 1) {
    return MultiPoly::constant(3, GaussianRational(make_rational(num, den), Rational(0)));
}

void write_map(const std::string& dir, const std::string& name, std::vector<MultiPoly> forward,
               std::vector<MultiPoly> inverse) {
    PolyAutomorphism map(std::move(forward), std::move(inverse));
    save_json_file(dir + "/" + name + ".json", automorphism_to_json(map));
    std::cout << name << ".json\n";
}

void write_divisor(const std::string& dir, const std::string& name, const MultiPoly& form,
                   int degree) {
    Divisor divisor(homogenize(form, degree));
    save_json_file(dir + "/" + name + ".json", divisor_to_json(divisor));
    std::cout << name << ".json\n";
}

}  // namespace

int main(int argc, char** argv) {
    std::string dir = argc > 1 ? argv[1] : "fixtures";

    MultiPoly x2 = MultiPoly::variable(2, 0), y2 = MultiPoly::variable(2, 1);
    write_map(dir, "henon", {y2, y2 * y2 + x2}, {y2 - x2 * x2, x2});

    MultiPoly x = v3(0), y = v3(1), z = v3(2);

    write_map(dir, "case1", {x * x + z, y * y + x, y}, {y - z * z, z, x - (y - z * z) * (y - z * z)});
    write_map(dir, "case2", {x * x + y, z, x}, {z, x - z * z, y});
    write_map(dir, "case3", {x * y + z, y * y + x, y}, {y - z * z, z, x - (y - z * z) * z});

    MultiPoly u = scaled(z, 2) - con3(6);
    write_map(dir, "case4", {x * x - x * z + con3(1) + y, scaled(z, 2), scaled(x, 1, 2) + con3(3)},
              {u, x - u * u + u * scaled(y, 1, 2) - con3(1), scaled(y, 1, 2)});

    MultiPoly half_gap = scaled(y - z * z, 1, 2);
    write_map(dir, "case5", {x * y + x * x + z, x * x + scaled(y, 2), x},
              {z, half_gap, x - z * half_gap - z * z});

    write_map(dir, "h3_special", {x * x + x * z + z * z + y, z, x},
              {z, x - z * z - z * y - y * y, y});
    write_map(dir, "twin_square", {y * y + z, y * y + x, y}, {y - z * z, z, x - z * z});

    write_map(dir, "change_diag", {scaled(x, 2), scaled(y, 3) + con3(1), z - con3(2)},
              {scaled(x, 1, 2), scaled(y - con3(1), 1, 3), z + con3(2)});

    // divisors on P^2 over the plane fixture: affine forms in (x, y), the
    // homogenizing variable is t
    MultiPoly one2 = MultiPoly::constant(2, 1L);
    write_divisor(dir, "divisor_x", x2, 1);
    write_divisor(dir, "divisor_y", y2, 1);
    write_divisor(dir, "divisor_t", one2, 1);
    write_divisor(dir, "divisor_y_minus_t", y2 - one2, 1);
    return 0;
}
