// Acceptance harness. Each criterion prints exactly one PASS/FAIL line with
// its elapsed time and a short factual detail; the process exits 0 only when
// every criterion passes. Takes the CLI binary path and the fixtures
// directory on the command line.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "polydyn/classify3.hpp"
#include "polydyn/errors.hpp"
#include "polydyn/escape_regions.hpp"
#include "polydyn/green.hpp"
#include "polydyn/modline.hpp"
#include "polydyn/poly_io.hpp"
#include "polydyn/pullback.hpp"
#include "polydyn/rational.hpp"

#include "classify_fixtures.hpp"

using namespace polydyn;

namespace {

// pinned experiment constants; changing any of these changes what the
// harness certifies
constexpr int kDegreeCount = 8;
constexpr int kDrawsPerSubCase = 20;
constexpr int kVerifyDepth = 6;
constexpr int kSiuHorizon = 6;
constexpr int kRouteAgreementHorizon = 3;
constexpr int kRuleHorizon = 4;
constexpr int kPositivityHorizon = 6;
constexpr int kConicCount = 20;
constexpr int kResidualPoints = 100;
constexpr double kResidualTol = 1e-5;
constexpr int kShadowPoints = 20;
constexpr int kShadowHorizon = 25;
constexpr double kShadowTrimmedTol = 1e-3;
constexpr double kRegionLevel = 1e4;
constexpr long long kRegionSamples = 1000000;
constexpr long long kControlSamples = 20000;
constexpr std::uint64_t kRegionSeed = 42;
constexpr std::uint64_t kShadowSeed = 42;
constexpr std::uint64_t kSweepSeed = 20260815u;
constexpr std::uint64_t kConicSeed = 77;
constexpr std::uint64_t kResidualSeed = 500;

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

std::string run_cli(const std::string& command, int& exit_code) {
    std::string out;
    FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
    if (!pipe) {
        exit_code = -1;
        return out;
    }
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

std::vector<std::string> payload_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    return lines;
}

PolyAutomorphism load_map(const std::string& path) {
    return automorphism_from_json(load_json_file(path));
}

Divisor load_div(const std::string& path) { return divisor_from_json(load_json_file(path)); }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

GaussianRational gint(long re, long im = 0) {
    return GaussianRational(Rational(re), Rational(im));
}

// all lines a x + b y + c t with integer slots in {-2..2}, plus seeded conics
std::vector<Divisor> divisor_corpus() {
    std::vector<Divisor> out;
    MultiPoly x = MultiPoly::variable(2, 0), y = MultiPoly::variable(2, 1);
    for (long a = -2; a <= 2; ++a)
        for (long b = -2; b <= 2; ++b)
            for (long c = -2; c <= 2; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                MultiPoly form = x.scaled(Coefficient::exact(gint(a))) +
                                 y.scaled(Coefficient::exact(gint(b))) +
                                 MultiPoly::constant(2, gint(c));
                out.emplace_back(homogenize(form, 1));
            }

    static const GaussianRational pool[] = {gint(0), gint(0),  gint(1),  gint(-1), gint(2),
                                            gint(-2), gint(3),  gint(0, 1), gint(1, 1),
                                            gint(0, -1), gint(-1, 2)};
    constexpr int kPoolSize = sizeof(pool) / sizeof(pool[0]);
    const Monomial slots[] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    SplitMix64 rng(kConicSeed);
    int made = 0;
    while (made < kConicCount) {
        MultiPoly form = MultiPoly::zero(2);
        for (const Monomial& m : slots) {
            GaussianRational coeff = pool[rng.next() % kPoolSize];
            if (!coeff.is_zero()) form.add_term(m, Coefficient::exact(coeff));
        }
        if (form.is_zero()) continue;
        out.emplace_back(homogenize(form, 2));
        ++made;
    }
    return out;
}

// ---- criteria ------------------------------------------------------------

CriterionResult fibonacci_degrees(const std::string& bin, const std::string& fix) {
    int code = 0;
    std::string out =
        run_cli(bin + " degrees --map " + fix + "/case4.json --direction inverse --N 8", code);
    std::vector<std::string> lines = payload_lines(out);
    if (code != 0 || lines.size() != 1 || lines[0] != "2,3,5,8,13,21,34,55")
        return {false, "CLI payload was '" + (lines.empty() ? "" : lines[0]) + "' (exit " +
                           std::to_string(code) + ")"};

    PolyAutomorphism map = load_map(fix + "/case4.json");
    DegreeSequence seq = degree_sequence(map, kDegreeCount, Direction::inverse);
    DegreeEstimate est = dynamical_degree_estimate(seq);
    const QuadraticSurd golden{make_rational(1, 2), make_rational(1, 2), 5};
    const std::vector<long long> fib_rec{1, 1};
    if (!est.exact || est.recurrence != fib_rec || !(est.value == golden))
        return {false, "estimate was " + est.value.to_string() + " by " + est.method};
    return {true, "inverse degrees 2,3,5,8,13,21,34,55; estimate " + est.value.to_string() +
                      " from recurrence d(n+2) = d(n+1) + d(n)"};
}

CriterionResult classification_sweep() {
    SplitMix64 rng(kSweepSeed);
    int total = 0, failed = 0;
    std::string first_failure;
    for (const std::string& tag : fixtures::all_sub_case_tags()) {
        for (int i = 0; i < kDrawsPerSubCase; ++i) {
            fixtures::SubCaseDraw draw = fixtures::draw_sub_case(tag, rng);
            ++total;
            ClassificationReport rep = classify(draw.map, kVerifyDepth);
            bool outcome_ok;
            if (draw.empirical) {
                outcome_ok = (rep.outcome == TheoremOutcome::equal_degrees ||
                              rep.outcome == TheoremOutcome::class2_square_regular) &&
                             rep.horizon_limited;
            } else {
                outcome_ok =
                    rep.outcome == draw.expected && rep.sub_case == draw.expected_label;
            }
            bool verified = all_passed(verify_report(rep, kVerifyDepth));
            if (!outcome_ok || !verified) {
                ++failed;
                if (first_failure.empty())
                    first_failure = tag + " draw " + std::to_string(i) + " got " +
                                    outcome_name(rep.outcome) +
                                    (verified ? "" : " with verification failures");
            }
        }
    }
    if (failed)
        return {false, std::to_string(failed) + "/" + std::to_string(total) +
                           " draws failed; first: " + first_failure};
    return {true, std::to_string(total) + "/" + std::to_string(total) +
                      " draws matched their documented outcome and verified at depth " +
                      std::to_string(kVerifyDepth)};
}

CriterionResult siu_patterns(const std::string& fix) {
    PolyAutomorphism map = load_map(fix + "/henon.json");
    struct Expectation {
        const char* file;
        const char* label;
        // empty means: the pattern is whatever the direct route computes,
        // then pinned to the constant recorded here
        Rational constant;
    };
    const Expectation cases[] = {{"divisor_x", "Z(x)", make_rational(1, 2)},
                                 {"divisor_y", "Z(y)", make_rational(0)},
                                 {"divisor_t", "Z(t)", make_rational(1)},
                                 {"divisor_y_minus_t", "Z(y-t)", make_rational(0)}};

    for (const Expectation& expectation : cases) {
        Divisor s = load_div(fix + "/" + expectation.file + ".json");
        std::vector<SiuDecomposition> seq = siu_sequence(map, s, kSiuHorizon);
        if (static_cast<int>(seq.size()) != kSiuHorizon)
            return {false, std::string(expectation.label) + ": short sequence"};

        // the residual-iteration route must match the constant pattern
        for (const SiuDecomposition& step : seq)
            if (step.c != expectation.constant)
                return {false, std::string(expectation.label) + ": c_" + std::to_string(step.n) +
                                   " = " + rational_to_string(step.c) + ", expected " +
                                   rational_to_string(expectation.constant)};

        // the independent direct-composition route must agree exactly
        for (int n = 1; n <= kRouteAgreementHorizon; ++n) {
            PolyAutomorphism iterate_map = power_map(map, n);
            HomogPoly direct = pullback_divisor(iterate_map, s);
            long long scale = s.degree();
            for (int k = 0; k < n; ++k) scale *= map.first_degree();
            Rational c_direct = make_rational(t_adic_valuation(direct), scale);
            if (c_direct != seq[n - 1].c)
                return {false, std::string(expectation.label) + ": direct route gives c_" +
                                   std::to_string(n) + " = " + rational_to_string(c_direct)};
        }
    }
    return {true, "c_n constants 1/2, 0, 1, 0 for Z(x), Z(y), Z(t), Z(y-t); both routes agree "
                  "for n <= " +
                      std::to_string(kRouteAgreementHorizon)};
}

CriterionResult monotone_and_rule(const std::string& fix) {
    PolyAutomorphism map = load_map(fix + "/henon.json");
    std::vector<Divisor> corpus = divisor_corpus();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        std::vector<SiuDecomposition> seq = siu_sequence(map, corpus[i], kSiuHorizon);
        Rational prev(0);
        for (const SiuDecomposition& step : seq) {
            if (step.c < prev || step.c < 0 || step.c > 1)
                return {false, "divisor " + std::to_string(i) + ": c_" + std::to_string(step.n) +
                                   " = " + rational_to_string(step.c) + " breaks monotonicity"};
            prev = step.c;
        }
        if (!transformation_rule_check(map, corpus[i], kRuleHorizon))
            return {false, "divisor " + std::to_string(i) + " fails the transformation rule"};
    }
    return {true, std::to_string(corpus.size()) +
                      " divisors monotone in [0,1] with the transformation rule to n = " +
                      std::to_string(kRuleHorizon)};
}

CriterionResult positivity(const std::string& fix) {
    PolyAutomorphism map = load_map(fix + "/henon.json");
    std::vector<Divisor> corpus = divisor_corpus();
    int inconsistent = 0;
    for (const Divisor& s : corpus)
        if (!positivity_criterion_check(map, s, kPositivityHorizon).consistent) ++inconsistent;
    if (inconsistent)
        return {false, std::to_string(inconsistent) + " of " + std::to_string(corpus.size()) +
                           " corpus divisors inconsistent"};
    return {true, std::to_string(corpus.size()) +
                      "/" + std::to_string(corpus.size()) + " positivity checks consistent"};
}

CriterionResult functional_equation(const std::string& fix) {
    const char* maps[] = {"henon", "case1", "case2",      "case3",
                          "case4", "case5", "h3_special", "twin_square"};
    double worst = 0.0;
    std::string worst_map;
    int map_index = 0;
    for (const char* name : maps) {
        PolyAutomorphism map = load_map(fix + "/" + std::string(name) + ".json");
        std::vector<ComplexPoint> points =
            escaping_sample(map, kResidualPoints, kResidualSeed + map_index++);
        for (const ComplexPoint& z : points) {
            double residual = green_functional_residual(map, z);
            if (residual > worst) {
                worst = residual;
                worst_map = name;
            }
        }
    }
    if (!(worst < kResidualTol))
        return {false, "max residual " + fmt(worst) + " on " + worst_map + ", tolerance " +
                           fmt(kResidualTol)};
    return {true, "max |G(f z) - lambda G(z)| = " + fmt(worst) + " over 8 maps x " +
                      std::to_string(kResidualPoints) + " escaping points (tol " +
                      fmt(kResidualTol) + ")"};
}

CriterionResult potential_shadow(const std::string& fix) {
    PolyAutomorphism map = load_map(fix + "/henon.json");
    Divisor s = load_div(fix + "/divisor_x.json");
    std::vector<ComplexPoint> grid = escaping_sample(map, kShadowPoints, kShadowSeed);
    ConvergenceTable table = potential_convergence_experiment(map, s, grid, kShadowHorizon);
    if (table.c_s != make_rational(1, 2))
        return {false, "exact module gave c_S = " + rational_to_string(table.c_s)};

    std::vector<double> deviations;
    for (const ConvergenceRow& row : table.rows)
        if (row.n == kShadowHorizon && !row.excluded) deviations.push_back(row.deviation);
    if (static_cast<int>(deviations.size()) < kShadowPoints - 1)
        return {false, "only " + std::to_string(deviations.size()) + " usable rows at n = " +
                           std::to_string(kShadowHorizon)};

    std::sort(deviations.begin(), deviations.end());
    std::size_t drop = (deviations.size() + 19) / 20;  // worst 5%, rounded up
    double trimmed_max = deviations[deviations.size() - 1 - drop];
    if (!(trimmed_max < kShadowTrimmedTol))
        return {false, "trimmed max deviation " + fmt(trimmed_max) + " at n = " +
                           std::to_string(kShadowHorizon)};
    return {true, "trimmed max |lambda^-n log|x o f^n| - (1/2) G| = " + fmt(trimmed_max) +
                      " at n = " + std::to_string(kShadowHorizon) + " with exact c_S = 1/2 (tol " +
                      fmt(kShadowTrimmedTol) + ")"};
}

CriterionResult region_inclusions() {
    RegionParams params;  // a = 1, b = 1/2, c = c' = 0
    InclusionReport honest =
        verify_inclusions(params, kRegionLevel, kRegionSamples, kRegionSeed);
    if (!honest.violations.empty())
        return {false, std::to_string(honest.violations.size()) + " violations in " +
                           std::to_string(honest.checked) + " checks"};

    InclusionReport control =
        verify_inclusions(params, kRegionLevel, kControlSamples, kRegionSeed, true);
    if (control.violations.empty()) return {false, "corrupted control saw no violations"};

    InvariantLineReport line = invariant_line_check(gint(1), gint(1), gint(0), gint(0));
    if (!line.applicable || !line.verified)
        return {false, "invariant line certificate failed for (1, 1, 0, 0)"};

    return {true, std::to_string(honest.checked) + " preimage checks clean at R = 1e4; control " +
                      "found " + std::to_string(control.violations.size()) +
                      "; line (w, w, w) certificate exact"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <polydyn-binary> <fixtures-dir>\n";
        return 2;
    }
    const std::string bin = argv[1];
    const std::string fix = argv[2];

    std::vector<std::pair<const char*, double>> meta = {
        {"Fibonacci inverse degrees", 60.0}, {"classification sweep", 600.0},
        {"Siu coefficient patterns", 60.0},  {"monotonicity and transformation rule", 0.0},
        {"positivity criterion", 0.0},       {"Green functional equation", 60.0},
        {"potential convergence shadow", 120.0}, {"escape-region inclusions", 300.0}};

    bool all_pass = true;
    for (int k = 0; k < 8; ++k) {
        auto start = std::chrono::steady_clock::now();
        CriterionResult r;
        switch (k) {
            case 0: r = fibonacci_degrees(bin, fix); break;
            case 1: r = classification_sweep(); break;
            case 2: r = siu_patterns(fix); break;
            case 3: r = monotone_and_rule(fix); break;
            case 4: r = positivity(fix); break;
            case 5: r = functional_equation(fix); break;
            case 6: r = potential_shadow(fix); break;
            case 7: r = region_inclusions(); break;
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (meta[k].second > 0 && seconds >= meta[k].second) {
            r.pass = false;
            r.detail += " [over budget " + fmt(meta[k].second) + "s]";
        }
        all_pass &= r.pass;
        char line[1024];
        std::snprintf(line, sizeof(line), "criterion %d: %s (%.1fs) %s: %s", k + 1,
                      r.pass ? "PASS" : "FAIL", seconds, meta[k].first, r.detail.c_str());
        std::cout << line << std::endl;
    }
    return all_pass ? 0 : 1;
}
