#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "polydyn/automorphism.hpp"
#include "polydyn/classify3.hpp"
#include "polydyn/errors.hpp"
#include "polydyn/escape_regions.hpp"
#include "polydyn/green.hpp"
#include "polydyn/poly_io.hpp"
#include "polydyn/pullback.hpp"
#include "polydyn/rational.hpp"

using nlohmann::json;
using namespace polydyn;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double strict_double(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InputError("not a number: '" + text + "'");
    }
    if (used != text.size()) throw InputError("trailing junk in number: '" + text + "'");
    return v;
}

// accepts "1.5", "re,im", and "re+imi" forms like "0.3+0.4i", "-2i", "1-i"
std::complex<double> parse_complex(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw InputError("empty complex literal");

    if (std::size_t comma = s.find(','); comma != std::string::npos)
        return {strict_double(s.substr(0, comma)), strict_double(s.substr(comma + 1))};

    if (s.back() == 'i' || s.back() == 'j') {
        std::string body = s.substr(0, s.size() - 1);
        std::size_t split = std::string::npos;
        for (std::size_t p = body.size(); p-- > 1;) {
            if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
                split = p;
                break;
            }
        }
        if (split == std::string::npos) {
            if (body.empty() || body == "+") return {0.0, 1.0};
            if (body == "-") return {0.0, -1.0};
            return {0.0, strict_double(body)};
        }
        std::string im = body.substr(split);
        if (im == "+") im = "1";
        if (im == "-") im = "-1";
        return {strict_double(body.substr(0, split)), strict_double(im)};
    }
    return {strict_double(s), 0.0};
}

PolyAutomorphism load_map(const std::string& path) {
    return automorphism_from_json(load_json_file(path));
}

Divisor load_divisor(const std::string& path) {
    return divisor_from_json(load_json_file(path));
}

void emit_artifact(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw InputError("cannot open output file: " + out_path);
    file << content;
    if (!file) throw InputError("failed while writing: " + out_path);
}

std::ostream& summary_stream(const std::string& out_path) {
    // the artifact owns stdout when no output file is given
    return out_path.empty() ? std::cerr : std::cout;
}

json complex_to_json(const std::complex<double>& z) { return json::array({z.real(), z.imag()}); }

json space_point_to_json(const SpacePoint& p) {
    return json::array({complex_to_json(p[0]), complex_to_json(p[1]), complex_to_json(p[2])});
}

json estimate_to_json(const DegreeEstimate& e) {
    json j;
    j["exact"] = e.exact;
    j["approx"] = e.approx;
    j["method"] = e.method;
    j["recurrence"] = e.recurrence;
    if (e.exact) j["value"] = e.value.to_string();
    return j;
}

bool estimates_agree(const DegreeEstimate& x, const DegreeEstimate& y) {
    if (x.exact && y.exact) return x.value == y.value;
    double ax = x.exact ? x.value.to_double() : x.approx;
    double ay = y.exact ? y.value.to_double() : y.approx;
    return std::abs(ax - ay) <= 0.1 * std::max({1.0, std::abs(ax), std::abs(ay)});
}

// one axis of a green-grid evaluation window: a real linspace or a pinned
// complex constant
struct AxisSpec {
    double lo = 0.0;
    double hi = 0.0;
    long long count = 1;
    std::optional<std::complex<double>> constant;
};

std::vector<AxisSpec> parse_grid(const std::string& spec, int dimension) {
    std::vector<AxisSpec> axes;
    std::stringstream parts(spec);
    std::string part;
    while (std::getline(parts, part, ';')) {
        AxisSpec axis;
        std::size_t c1 = part.find(':');
        if (c1 == std::string::npos) {
            axis.constant = parse_complex(part);
        } else {
            std::size_t c2 = part.find(':', c1 + 1);
            if (c2 == std::string::npos)
                throw InputError("grid axis needs lo:hi:count, got '" + part + "'");
            axis.lo = strict_double(part.substr(0, c1));
            axis.hi = strict_double(part.substr(c1 + 1, c2 - c1 - 1));
            axis.count = static_cast<long long>(strict_double(part.substr(c2 + 1)));
            if (axis.count < 1) throw InputError("grid axis count must be >= 1");
        }
        axes.push_back(axis);
    }
    if (static_cast<int>(axes.size()) != dimension)
        throw InputError("grid has " + std::to_string(axes.size()) + " axes but the map acts on C^" +
                         std::to_string(dimension));
    long long total = 1;
    for (const AxisSpec& a : axes) {
        total *= a.constant ? 1 : a.count;
        if (total > 200000) throw InputError("grid larger than 200000 points");
    }
    return axes;
}

std::vector<ComplexPoint> expand_grid(const std::vector<AxisSpec>& axes) {
    std::vector<long long> radix;
    long long total = 1;
    for (const AxisSpec& a : axes) {
        radix.push_back(a.constant ? 1 : a.count);
        total *= radix.back();
    }
    std::vector<ComplexPoint> points;
    points.reserve(total);
    for (long long idx = 0; idx < total; ++idx) {
        ComplexPoint p(axes.size());
        long long rest = idx;
        for (std::size_t k = axes.size(); k-- > 0;) {
            long long step = rest % radix[k];
            rest /= radix[k];
            const AxisSpec& a = axes[k];
            if (a.constant) {
                p[k] = *a.constant;
            } else if (a.count == 1) {
                p[k] = {a.lo, 0.0};
            } else {
                p[k] = {a.lo + step * (a.hi - a.lo) / static_cast<double>(a.count - 1), 0.0};
            }
        }
        points.push_back(std::move(p));
    }
    return points;
}

struct HeaderLine {
    std::string key;
    std::string value;
};

void write_header(std::ostream& out, const std::string& subcommand,
                  const std::vector<HeaderLine>& lines) {
    out << "# polydyn " << subcommand << "\n";
    for (const HeaderLine& l : lines) out << "# " << l.key << ": " << l.value << "\n";
}

// ---- subcommands --------------------------------------------------------

int run_degrees(const std::string& map_path, const std::string& direction_name_opt, int count,
                const std::string& out_path) {
    if (direction_name_opt != "forward" && direction_name_opt != "inverse")
        throw InputError("--direction must be forward or inverse");
    Direction dir =
        direction_name_opt == "forward" ? Direction::forward : Direction::inverse;
    PolyAutomorphism map = load_map(map_path);
    DegreeSequence seq = degree_sequence(map, count, dir);

    bool all_symbolic = true;
    for (DegreeComputation c : seq.computed_by) all_symbolic &= c == DegreeComputation::symbolic;

    std::ostringstream body;
    std::vector<HeaderLine> header = {{"map", map_path},
                                      {"direction", direction_name_opt},
                                      {"N", std::to_string(count)},
                                      {"domain", "exact (integer degrees)"},
                                      {"computed_by", all_symbolic ? "symbolic" : "mixed"}};
    if (seq.truncated)
        header.push_back({"truncated", "computed " + std::to_string(seq.size()) + " of " +
                                           std::to_string(seq.requested)});
    write_header(body, "degrees", header);
    for (int i = 0; i < seq.size(); ++i) body << (i ? "," : "") << seq.degrees[i];
    body << "\n";
    emit_artifact(out_path, body.str());
    return 0;
}

int run_siu(const std::string& map_path, const std::string& divisor_path, int count,
            const std::string& out_path) {
    PolyAutomorphism map = load_map(map_path);
    Divisor divisor = load_divisor(divisor_path);
    std::vector<SiuDecomposition> steps = siu_sequence(map, divisor, count);

    std::ostringstream body;
    write_header(body, "siu",
                 {{"map", map_path},
                  {"divisor", divisor_path},
                  {"N", std::to_string(count)},
                  {"domain", "exact"},
                  {"columns",
                   "n (step), m_n (t-multiplicity), c_n_num/c_n_den (exact rational c_n), "
                   "residual_degree"}});
    body << "n,m_n,c_n_num,c_n_den,residual_degree\n";
    for (const SiuDecomposition& step : steps) {
        Rational c = step.c;
        body << step.n << "," << step.t_multiplicity << "," << c.get_num().get_str() << ","
             << c.get_den().get_str() << "," << step.residual.degree() << "\n";
    }
    emit_artifact(out_path, body.str());
    return 0;
}

int run_classify(const std::string& map_path, int depth, const std::string& out_path) {
    PolyAutomorphism map = load_map(map_path);
    ClassificationReport report = classify(map, depth);
    std::vector<VerificationItem> checks = verify_report(report, depth);
    bool ok = all_passed(checks);

    json artifact;
    artifact["config"] = {{"subcommand", "classify"}, {"map", map_path}, {"depth", depth}};
    artifact["report"] = classification_report_to_json(report);
    json items = json::array();
    for (const VerificationItem& item : checks)
        items.push_back({{"check", item.check}, {"passed", item.passed}, {"detail", item.detail}});
    artifact["verification"] = items;
    artifact["all_passed"] = ok;
    emit_artifact(out_path, artifact.dump(2) + "\n");

    int passed = static_cast<int>(std::count_if(checks.begin(), checks.end(),
                                                [](const VerificationItem& i) { return i.passed; }));
    std::ostream& out = summary_stream(out_path);
    out << "family: " << family_name(report.family) << "\n";
    out << "sub-case: " << report.sub_case << "\n";
    out << "outcome: " << outcome_name(report.outcome) << "\n";
    out << "lambda_1 forward: " << report.lambda_forward.to_string() << "\n";
    out << "lambda_1 inverse: " << report.lambda_inverse.to_string() << "\n";
    if (report.x_plus) out << "X+: " << report.x_plus->to_string() << "\n";
    if (report.attracting)
        out << "attracting: " << report.attracting->predicate << " ("
            << (report.attracting->holds ? "holds" : "fails") << ")\n";
    if (report.conjugation_deferred) out << "conjugation: deferred (square root outside Q(i))\n";
    if (report.horizon_limited) out << "verdict: horizon-limited at depth " << depth << "\n";
    out << "verification: " << passed << "/" << checks.size() << " passed\n";
    return ok ? 0 : 2;
}

int run_green_grid(const std::string& map_path, const std::string& grid_spec, double escape_radius,
                   int max_iter, int refine_steps, const std::string& out_path) {
    PolyAutomorphism map = load_map(map_path);
    GreenParams params;
    params.escape_radius = escape_radius;
    params.max_iter = max_iter;
    params.refine_steps = refine_steps;
    std::vector<ComplexPoint> points = expand_grid(parse_grid(grid_spec, map.dimension()));

    std::ostringstream body;
    write_header(body, "green-grid",
                 {{"map", map_path},
                  {"grid", grid_spec},
                  {"escape_radius", fmt(params.escape_radius)},
                  {"max_iter", std::to_string(params.max_iter)},
                  {"refine_steps", std::to_string(params.refine_steps)},
                  {"domain", "approx (float64); G in natural-log units"}});
    for (int k = 0; k < map.dimension(); ++k) body << "re" << k << ",im" << k << ",";
    body << "G,n_star,increment,escaped\n";
    for (const ComplexPoint& z : points) {
        GreenEvaluation eval = green_plus(map, z, params);
        for (const std::complex<double>& c : z) body << fmt(c.real()) << "," << fmt(c.imag()) << ",";
        body << fmt(eval.value) << "," << eval.iterations << "," << fmt(eval.cauchy_increment)
             << "," << (eval.escaped ? 1 : 0) << "\n";
    }
    emit_artifact(out_path, body.str());
    return 0;
}

int run_converge(const std::string& map_path, const std::string& divisor_path, int horizon,
                 int sample_count, std::uint64_t seed, double lo, double hi,
                 const std::string& out_path) {
    PolyAutomorphism map = load_map(map_path);
    Divisor divisor = load_divisor(divisor_path);
    std::vector<ComplexPoint> grid = escaping_sample(map, sample_count, seed, lo, hi);
    ConvergenceTable table = potential_convergence_experiment(map, divisor, grid, horizon);

    std::ostringstream body;
    write_header(body, "converge",
                 {{"map", map_path},
                  {"divisor", divisor_path},
                  {"n", std::to_string(horizon)},
                  {"sample", std::to_string(sample_count)},
                  {"seed", std::to_string(seed)},
                  {"box", fmt(lo) + ".." + fmt(hi)},
                  {"c_s", rational_to_string(table.c_s) + " (exact)"},
                  {"domain", "approx rows against the exact coefficient"}});
    body << "point_index,n,shifted_potential,target,deviation,excluded\n";
    for (const ConvergenceRow& row : table.rows) {
        body << row.point_index << "," << row.n << "," << fmt(row.shifted_potential) << ","
             << fmt(row.target) << "," << fmt(row.deviation) << "," << (row.excluded ? 1 : 0)
             << "\n";
    }
    emit_artifact(out_path, body.str());
    return 0;
}

int run_verify_regions(const std::string& a_text, const std::string& b_text,
                       const std::string& c_text, const std::string& cprime_text, double level,
                       long long samples, std::uint64_t seed, bool corrupted,
                       const std::string& out_path) {
    RegionParams params;
    params.a = parse_complex(a_text);
    params.b = parse_complex(b_text);
    params.c = parse_complex(c_text);
    params.c_prime = parse_complex(cprime_text);
    params.R = level;

    InclusionReport report = verify_inclusions(params, level, samples, seed, corrupted);

    json artifact;
    artifact["config"] = {{"subcommand", "verify-regions"},
                          {"a", complex_to_json(params.a)},
                          {"b", complex_to_json(params.b)},
                          {"c", complex_to_json(params.c)},
                          {"cprime", complex_to_json(params.c_prime)},
                          {"R", level},
                          {"samples", samples},
                          {"seed", seed},
                          {"corrupted", corrupted}};
    artifact["alpha"] = params.alpha();
    artifact["epsilon"] = *params.epsilon();
    artifact["checked"] = report.checked;
    artifact["violation_count"] = report.violations.size();
    constexpr std::size_t kMaxListed = 100;
    json listed = json::array();
    for (std::size_t i = 0; i < report.violations.size() && i < kMaxListed; ++i) {
        const InclusionViolation& v = report.violations[i];
        listed.push_back({{"source", std::string(1, v.source)},
                          {"sample_index", v.sample_index},
                          {"point", space_point_to_json(v.point)},
                          {"preimage", space_point_to_json(v.preimage)}});
    }
    artifact["violations"] = listed;
    artifact["violations_truncated"] = report.violations.size() > kMaxListed;
    emit_artifact(out_path, artifact.dump(2) + "\n");
    return report.violations.empty() ? 0 : 2;
}

int run_conjugacy(const std::string& map_path, const std::string& change_path, int depth,
                  const std::string& out_path) {
    PolyAutomorphism map = load_map(map_path);
    PolyAutomorphism change_map = load_map(change_path);

    bool affine = true;
    for (Direction dir : {Direction::forward, Direction::inverse})
        for (const MultiPoly& comp : change_map.components(dir))
            affine &= comp.total_degree().value_or(0) <= 1;

    AffineChange change(change_map, "cli change");
    PolyAutomorphism conjugated = conjugate(change, map);

    json artifact;
    artifact["config"] = {{"subcommand", "conjugacy-check"},
                          {"map", map_path},
                          {"change", change_path},
                          {"depth", depth}};
    artifact["change_is_affine"] = affine;

    bool verified = true;
    for (Direction dir : {Direction::forward, Direction::inverse}) {
        DegreeSequence base = degree_sequence(map, depth, dir);
        DegreeSequence conj = degree_sequence(conjugated, depth, dir);
        bool equal = !base.truncated && !conj.truncated && base.degrees == conj.degrees;
        DegreeEstimate base_est = dynamical_degree_estimate(base);
        DegreeEstimate conj_est = dynamical_degree_estimate(conj);
        bool agree = estimates_agree(base_est, conj_est);

        json side;
        side["original"] = base.degrees;
        side["conjugated"] = conj.degrees;
        side["degrees_equal"] = equal;
        side["estimate_original"] = estimate_to_json(base_est);
        side["estimate_conjugated"] = estimate_to_json(conj_est);
        side["estimates_agree"] = agree;
        artifact[direction_name(dir)] = side;

        // affine conjugation preserves degrees exactly; any change must
        // still preserve the growth rate
        verified &= agree && (!affine || equal);
    }
    artifact["verified"] = verified;
    emit_artifact(out_path, artifact.dump(2) + "\n");
    return verified ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polynomial automorphism dynamics toolkit"};
    app.require_subcommand(1);

    std::string map_path, divisor_path, change_path, out_path;
    std::string direction = "forward";
    std::string grid_spec;
    std::string a_text = "1", b_text = "0.5", c_text = "0", cprime_text = "0";
    int count = 8, siu_count = 6, depth = 6, horizon = 25, sample_count = 20;
    int max_iter = 200, refine_steps = 30;
    double escape_radius = 1e8, level = 1e4, lo = 10.0, hi = 1e3;
    long long samples = 1000000;
    std::uint64_t seed = 42;
    bool corrupted = false;

    CLI::App* degrees_cmd = app.add_subcommand("degrees", "first algebraic degrees of iterates");
    degrees_cmd->add_option("--map", map_path, "automorphism JSON")->required();
    degrees_cmd->add_option("--direction", direction, "forward or inverse");
    degrees_cmd->add_option("--N", count, "number of iterates");
    degrees_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    CLI::App* siu_cmd = app.add_subcommand("siu", "Siu coefficients of a divisor pullback");
    siu_cmd->add_option("--map", map_path, "automorphism JSON")->required();
    siu_cmd->add_option("--divisor", divisor_path, "divisor JSON")->required();
    siu_cmd->add_option("--N", siu_count, "number of steps");
    siu_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    CLI::App* classify_cmd = app.add_subcommand("classify", "quadratic C^3 normal-form outcome");
    classify_cmd->add_option("--map", map_path, "automorphism JSON")->required();
    classify_cmd->add_option("--depth", depth, "degree-data horizon for empirical branches");
    classify_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    CLI::App* green_cmd = app.add_subcommand("green-grid", "escape-rate potential on a grid");
    green_cmd->add_option("--map", map_path, "automorphism JSON")->required();
    green_cmd->add_option("--grid", grid_spec, "per-axis lo:hi:count or complex constant, ';'-separated")
        ->required();
    green_cmd->add_option("--escape-radius", escape_radius, "raw-orbit escape radius");
    green_cmd->add_option("--max-iter", max_iter, "raw-orbit budget");
    green_cmd->add_option("--refine-steps", refine_steps, "log-space refinement steps");
    green_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    CLI::App* converge_cmd =
        app.add_subcommand("converge", "shifted divisor potential against its predicted limit");
    converge_cmd->add_option("--map", map_path, "automorphism JSON")->required();
    converge_cmd->add_option("--divisor", divisor_path, "divisor JSON")->required();
    converge_cmd->add_option("--n", horizon, "orbit horizon");
    converge_cmd->add_option("--sample", sample_count, "number of escaping sample points");
    converge_cmd->add_option("--seed", seed, "sample seed");
    converge_cmd->add_option("--lo", lo, "sample box lower magnitude");
    converge_cmd->add_option("--hi", hi, "sample box upper magnitude");
    converge_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    CLI::App* regions_cmd =
        app.add_subcommand("verify-regions", "randomized escape-region inclusion check");
    regions_cmd->add_option("--a", a_text, "coefficient a (complex)");
    regions_cmd->add_option("--b", b_text, "coefficient b (complex, |b| < 1)");
    regions_cmd->add_option("--c", c_text, "coefficient c (complex)");
    regions_cmd->add_option("--cprime", cprime_text, "coefficient c' (complex)");
    regions_cmd->add_option("--R", level, "region level");
    regions_cmd->add_option("--samples", samples, "samples per inclusion");
    regions_cmd->add_option("--seed", seed, "sample seed");
    regions_cmd->add_flag("--corrupted", corrupted, "negative control with doubled target levels");
    regions_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    CLI::App* conj_cmd =
        app.add_subcommand("conjugacy-check", "degree growth invariance under a coordinate change");
    conj_cmd->add_option("--map", map_path, "automorphism JSON")->required();
    conj_cmd->add_option("--change", change_path, "coordinate change JSON (with its inverse)")
        ->required();
    conj_cmd->add_option("--depth", depth, "degree horizon");
    conj_cmd->add_option("--out", out_path, "artifact path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (degrees_cmd->parsed()) return run_degrees(map_path, direction, count, out_path);
        if (siu_cmd->parsed()) return run_siu(map_path, divisor_path, siu_count, out_path);
        if (classify_cmd->parsed()) return run_classify(map_path, depth, out_path);
        if (green_cmd->parsed())
            return run_green_grid(map_path, grid_spec, escape_radius, max_iter, refine_steps,
                                  out_path);
        if (converge_cmd->parsed())
            return run_converge(map_path, divisor_path, horizon, sample_count, seed, lo, hi,
                                out_path);
        if (regions_cmd->parsed())
            return run_verify_regions(a_text, b_text, c_text, cprime_text, level, samples, seed,
                                      corrupted, out_path);
        if (conj_cmd->parsed()) return run_conjugacy(map_path, change_path, depth, out_path);
    } catch (const std::exception& e) {
        std::cerr << "polydyn: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
