#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fraclap/counterexample.hpp"
#include "fraclap/inversion.hpp"
#include "fraclap/jintegrals.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/oracle.hpp"
#include "fraclap/report.hpp"

using json = nlohmann::ordered_json;
using namespace fraclap;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { ok = 0, invalid = 2, cert_failed = 3, no_convergence = 4 };

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::vector<double> parse_list(const std::string& s, const char* what)
{
    if (s.empty()) throw DomainError(std::string(what) + ": empty list");
    std::vector<double> v;
    for (auto& t : split(s, ',')) v.push_back(detail::parse_number(t));
    return v;
}

std::pair<double, double> parse_pair(const std::string& s, const char* what)
{
    auto v = parse_list(s, what);
    if (v.size() != 2) throw DomainError(std::string(what) + ": expected two comma-separated values");
    return {v[0], v[1]};
}

std::pair<int, int> parse_grid(const std::string& s)
{
    auto [p, q] = parse_pair(s, "--grid");
    if (p != std::floor(p) || q != std::floor(q) || p < 2 || q < 2 || p > 1e5 || q > 1e5)
        throw DomainError("--grid: need integers >= 2");
    return {static_cast<int>(p), static_cast<int>(q)};
}

// --axes with an optional --n: a ball when only n is given, n must match otherwise.
EllipsoidSpec resolve_ellipsoid(const std::string& axes, int n)
{
    if (axes.empty()) {
        if (n < 1) throw DomainError("need --axes or --n");
        return EllipsoidSpec::ball(n);
    }
    EllipsoidSpec E(parse_list(axes, "--axes"));
    if (n > 0 && n != E.n) throw DomainError("--n does not match the number of --axes");
    return E;
}

json point_json(std::span<const double> x) { return json(std::vector<double>(x.begin(), x.end())); }

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open '" + path + "' for writing");
    f << text;
}

void emit_json(const json& j, const std::string& path) { emit(j.dump(2) + "\n", path); }

json header(const char* command)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    return j;
}

// Uniform points with |x|_a <= margin, reproducible from the seed.
std::vector<Point> random_points(const EllipsoidSpec& E, int count, std::uint64_t seed, double margin)
{
    std::mt19937_64 rng(seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < count) {
        Point y(E.n);
        for (auto& v : y) v = 2 * unit() - 1;
        double r2 = 0;
        for (double v : y) r2 += v * v;
        if (r2 > 1.0) continue;
        for (int i = 0; i < E.n; ++i) y[i] *= margin / std::sqrt(E.axes[i]);
        pts.push_back(std::move(y));
    }
    return pts;
}

std::vector<Point> parse_points(const std::string& s, int n)
{
    std::vector<Point> pts;
    for (auto& t : split(s, ';')) {
        Point p = parse_list(t, "--points");
        if (static_cast<int>(p.size()) != n) throw DomainError("point '" + t + "' has the wrong dimension");
        pts.push_back(std::move(p));
    }
    return pts;
}

json certificate_json(const Certificate& c, const CertificateCheck& chk)
{
    json j;
    j["gamma"] = c.gamma;
    j["delta"] = c.delta;
    j["delta_rule"] = c.delta_rule;
    j["epsilon"] = c.epsilon;
    j["quad_min"] = c.quad_min;
    j["q_coeffs"] = c.q_coeffs;
    j["rhs_lower_bound"] = c.rhs_lower_bound;
    j["A"] = c.A;
    j["B"] = c.B;
    j["C"] = c.C;
    j["J0"] = c.J0;
    j["p2_plus"] = c.p2_plus ? json(*c.p2_plus) : json(nullptr);
    j["p1_plus"] = c.p1_plus;
    j["x_minus"] = c.x_minus;
    j["x_plus"] = c.x_plus;
    json v;
    v["ok"] = chk.ok;
    v["grid_points"] = chk.points;
    v["min_rhs"] = chk.min_rhs;
    v["u_minus"] = chk.u_minus;
    v["u_plus"] = chk.u_plus;
    j["verification"] = v;
    return j;
}

Criterion parse_criterion(const std::string& s)
{
    if (s == "D") return Criterion::D;
    if (s == "h") return Criterion::h;
    throw DomainError("--criterion must be D or h");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fractional Laplacians of ellipsoid-supported profiles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fraclap 1.0");

    // torsion
    struct {
        int n = 0;
        double s = 0;
        std::string axes, point, out;
    } to;
    auto* torsion = app.add_subcommand("torsion", "torsion constant kappa and normalization of u_s");
    torsion->add_option("--n", to.n, "dimension (ball if --axes is omitted)");
    torsion->add_option("--s", to.s, "order s > 0")->required();
    torsion->add_option("--axes", to.axes, "a_1,...,a_n");
    torsion->add_option("--point", to.point, "also report the torsion function at this point");
    torsion->add_option("--out", to.out, "output file (default stdout)");

    // eval
    struct {
        double s = 0;
        std::string axes, profile, point, out;
    } ev;
    auto* eval = app.add_subcommand("eval", "closed-form value of the operator on a profile");
    eval->add_option("--profile", ev.profile, "ubeta:B | xi:K | xisq:K | q:K | p:G,D | shifted(P,EPS)")->required();
    eval->add_option("--point", ev.point, "x_1,...,x_n")->required();
    eval->add_option("--s", ev.s, "order s > 0")->required();
    eval->add_option("--axes", ev.axes, "a_1,...,a_n")->required();
    eval->add_option("--out", ev.out, "output file (default stdout)");

    // verify
    struct {
        double s = 0, tol = 1e-8, margin = 0.7;
        int m = 0, random = 0, resolution = 0;
        std::uint64_t seed = 1;
        std::string axes, profile, points, out;
    } ve;
    auto* verify = app.add_subcommand("verify", "closed form against the hypersingular-integral oracle");
    verify->add_option("--profile", ve.profile, "profile, as for eval")->required();
    verify->add_option("--s", ve.s, "order s > 0")->required();
    verify->add_option("--axes", ve.axes, "a_1,...,a_n")->required();
    auto* pts_opt = verify->add_option("--points", ve.points, "x;y;... with comma-separated coordinates");
    auto* rnd_opt = verify->add_option("--random", ve.random, "number of random interior points");
    pts_opt->excludes(rnd_opt);
    verify->add_option("--seed", ve.seed, "seed for --random");
    verify->add_option("--margin", ve.margin, "random points satisfy |x|_a <= margin");
    verify->add_option("--m", ve.m, "difference order (0 = default)");
    verify->add_option("--tol", ve.tol, "relative tolerance of the radial quadrature");
    verify->add_option("--resolution", ve.resolution, "angular nodes per polar angle (0 = default)");
    verify->add_option("--out", ve.out, "output file (default stdout)");

    // scan
    struct {
        std::string criterion = "D", s_range, a_range, grid = "100,100", format = "csv", out, svg;
    } sc;
    auto* scan_cmd = app.add_subcommand("scan", "sign grid of D(s,a) or h(s,a)");
    scan_cmd->add_option("--criterion", sc.criterion, "D or h")->capture_default_str();
    scan_cmd->add_option("--s-range", sc.s_range, "lo,hi (default 1,2 for D and 2,4 for h)");
    scan_cmd->add_option("--a-range", sc.a_range, "lo,hi (default 1,2000 for D and 5,1000 for h)");
    scan_cmd->add_option("--grid", sc.grid, "ns,na")->capture_default_str();
    scan_cmd->add_option("--format", sc.format, "csv, json or svg")->capture_default_str();
    scan_cmd->add_option("--out", sc.out, "output file (default stdout)");
    scan_cmd->add_option("--svg", sc.svg, "additionally write the SVG sign grid here");

    // threshold
    struct {
        std::string criterion = "h", bracket, out;
        double s = std::nan(""), a = std::nan(""), tol = 1e-9;
    } th;
    auto* threshold = app.add_subcommand("threshold", "root of the criterion in a (fixed s) or in s (fixed a)");
    auto* th_s = threshold->add_option("--s", th.s, "fixed s; root in a");
    auto* th_a = threshold->add_option("--a", th.a, "fixed a; root in s");
    th_s->excludes(th_a);
    threshold->add_option("--bracket", th.bracket, "lo,hi")->required();
    threshold->add_option("--criterion", th.criterion, "D or h")->capture_default_str();
    threshold->add_option("--tol", th.tol, "absolute tolerance of the root")->capture_default_str();
    threshold->add_option("--out", th.out, "output file (default stdout)");

    // certify
    struct {
        int n = 2, points = 1000;
        double s = 0, a = 0;
        std::string out;
    } ce;
    auto* certify = app.add_subcommand("certify", "counterexample certificate on E_(1,...,1,a)");
    certify->add_option("--n", ce.n, "dimension >= 2")->capture_default_str();
    certify->add_option("--s", ce.s, "order s > 1")->required();
    certify->add_option("--a", ce.a, "eccentricity a > 1")->required();
    certify->add_option("--points", ce.points, "grid size of the positivity check")->capture_default_str();
    certify->add_option("--out", ce.out, "output file (default stdout)");

    // inversion
    struct {
        double c = 1.0;
        int samples = 256;
        std::string axes, nu, out;
    } in;
    auto* inversion = app.add_subcommand("inversion", "boundary of the inverted ellipsoid as a JSON mesh");
    inversion->add_option("--axes", in.axes, "a_1,...,a_n (n = 2 or 3)")->required();
    inversion->add_option("--c", in.c, "inversion constant c > 0")->capture_default_str();
    inversion->add_option("--nu", in.nu, "nu_1,...,nu_n")->required();
    inversion->add_option("--samples", in.samples, "vertices per curve (>= 16)")->capture_default_str();
    inversion->add_option("--out", in.out, "output file (default stdout)");

    // asymptotics
    struct {
        double s = 0;
        int i = 1, n = 2;
        std::string a_list = "10,100,1000,10000,100000", out;
    } as;
    auto* asym = app.add_subcommand("asymptotics", "scaled moments a^i J_i / J0 against their limits");
    asym->add_option("--s", as.s, "order s > 0")->required();
    asym->add_option("--i", as.i, "moment index i >= 0")->capture_default_str();
    asym->add_option("--n", as.n, "dimension >= 2")->capture_default_str();
    asym->add_option("--a-list", as.a_list, "comma-separated a values")->capture_default_str();
    asym->add_option("--out", as.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : invalid;
    }

    try {
        if (*torsion) {
            const EllipsoidSpec E = resolve_ellipsoid(to.axes, to.n);
            FractionalLaplacian L(E, to.s);
            json j = header("torsion");
            j["parameters"] = {{"n", E.n}, {"s", to.s}, {"axes", E.axes}};
            j["kappa"] = L.torsion_constant();
            j["scale"] = L.scale();
            j["J0"] = L.table().J0;
            j["J0_provenance"] = to_string(L.table().provenance);
            j["normalization"] = "tau = u_s / kappa solves the equation with right-hand side 1";
            if (!to.point.empty()) {
                Point x = parse_list(to.point, "--point");
                if (static_cast<int>(x.size()) != E.n) throw DomainError("--point has the wrong dimension");
                j["parameters"]["point"] = x;
                j["tau"] = L.torsion_value(x);
            }
            emit_json(j, to.out);
        } else if (*eval) {
            const EllipsoidSpec E(parse_list(ev.axes, "--axes"));
            const Profile p = parse_profile(ev.profile, E.n);
            const Point x = parse_list(ev.point, "--point");
            if (static_cast<int>(x.size()) != E.n) throw DomainError("--point has the wrong dimension");
            FractionalLaplacian L(E, ev.s);
            json j = header("eval");
            j["parameters"] = {{"n", E.n}, {"s", ev.s}, {"axes", E.axes}, {"profile", describe(p)}, {"point", x}};
            j["profile_value"] = L.eval(p, x);
            j["value"] = L.apply(p, x);
            emit_json(j, ev.out);
        } else if (*verify) {
            const EllipsoidSpec E(parse_list(ve.axes, "--axes"));
            const Profile p = parse_profile(ve.profile, E.n);
            if (!(ve.margin > 0 && ve.margin < 1)) throw DomainError("--margin must lie in (0,1)");
            std::vector<Point> pts;
            if (!ve.points.empty())
                pts = parse_points(ve.points, E.n);
            else if (ve.random > 0)
                pts = random_points(E, ve.random, ve.seed, ve.margin);
            else
                throw DomainError("verify: give --points or --random");
            OracleConfig cfg;
            cfg.m = ve.m;
            cfg.radial_tol = ve.tol;
            cfg.angular_resolution = ve.resolution;
            cfg.interior_margin = std::max(ve.margin, cfg.interior_margin);
            FractionalLaplacian L(E, ve.s);
            const auto rep = verify_profile(L, p, pts, cfg);
            json j = header("verify");
            j["parameters"] = {{"n", E.n},
                               {"s", ve.s},
                               {"axes", E.axes},
                               {"profile", rep.profile},
                               {"m", cfg.m > 0 ? cfg.m : default_order(ve.s)},
                               {"tol", cfg.radial_tol},
                               {"resolution", cfg.angular_resolution},
                               {"seed", ve.seed},
                               {"margin", ve.margin}};
            j["kappa"] = L.torsion_constant();
            j["max_rel_err"] = rep.max_rel_err;
            json arr = json::array();
            for (const auto& vp : rep.per_point)
                arr.push_back({{"x", vp.x}, {"closed", vp.closed}, {"oracle", vp.oracle}, {"rel_err", vp.rel_err}});
            j["points"] = arr;
            emit_json(j, ve.out);
        } else if (*scan_cmd) {
            const Criterion c = parse_criterion(sc.criterion);
            auto [s_lo, s_hi] = sc.s_range.empty() ? (c == Criterion::D ? std::pair{1.0, 2.0} : std::pair{2.0, 4.0})
                                                    : parse_pair(sc.s_range, "--s-range");
            auto [a_lo, a_hi] = sc.a_range.empty() ? (c == Criterion::D ? std::pair{1.0, 2000.0} : std::pair{5.0, 1000.0})
                                                    : parse_pair(sc.a_range, "--a-range");
            auto [ns, na] = parse_grid(sc.grid);
            if (sc.format != "csv" && sc.format != "json" && sc.format != "svg")
                throw DomainError("--format must be csv, json or svg");
            const ScanGrid g = scan(c, s_lo, s_hi, a_lo, a_hi, ns, na);
            const std::optional<double> marker = c == Criterion::h ? std::optional{h_scan_marker()} : std::nullopt;
            if (sc.format == "csv") {
                emit(scan_csv(g), sc.out);
            } else if (sc.format == "svg") {
                emit(scan_svg(g, marker), sc.out);
            } else {
                json j = header("scan");
                j["parameters"] = {{"criterion", to_string(c)},
                                   {"s_range", {s_lo, s_hi}},
                                   {"a_range", {a_lo, a_hi}},
                                   {"grid", {ns, na}}};
                j["s_values"] = g.s_values;
                j["a_values"] = g.a_values;
                j["values"] = g.values;
                j["signs"] = g.signs;
                emit_json(j, sc.out);
            }
            if (!sc.svg.empty()) emit(scan_svg(g, marker), sc.svg);
        } else if (*threshold) {
            const Criterion c = parse_criterion(th.criterion);
            auto [lo, hi] = parse_pair(th.bracket, "--bracket");
            const bool in_s = !std::isnan(th.a);
            if (!in_s && std::isnan(th.s)) throw DomainError("threshold: give --s (root in a) or --a (root in s)");
            if (!(th.tol > 0)) throw DomainError("--tol must be positive");
            const double fixed = in_s ? th.a : th.s;
            const double root = find_threshold(c, fixed, lo, hi, in_s, th.tol);
            json j = header("threshold");
            j["parameters"] = {{"criterion", to_string(c)},
                               {in_s ? "a" : "s", fixed},
                               {"variable", in_s ? "s" : "a"},
                               {"bracket", {lo, hi}},
                               {"tol", th.tol}};
            j["threshold"] = root;
            emit_json(j, th.out);
        } else if (*certify) {
            if (ce.points < 1) throw DomainError("--points must be positive");
            const Certificate cert = build_certificate(ce.n, ce.s, ce.a);
            const CertificateCheck chk = verify_certificate(cert, static_cast<std::size_t>(ce.points));
            if (!chk.ok)
                throw CertificationFailure("certificate built but the grid check failed (min rhs "
                                           + detail::fmt_double(chk.min_rhs) + ")");
            json j = header("certify");
            j["parameters"] = {{"n", ce.n}, {"s", ce.s}, {"a", ce.a}, {"points", ce.points}};
            j["certificate"] = certificate_json(cert, chk);
            emit_json(j, ce.out);
        } else if (*inversion) {
            const EllipsoidSpec E(parse_list(in.axes, "--axes"));
            const InversionSpec sp(in.c, parse_list(in.nu, "--nu"), E);
            const BoundaryMesh m = boundary_polyline(sp, in.samples);
            json j = header("inversion");
            j["parameters"] = {{"n", E.n}, {"axes", E.axes}, {"c", sp.c}, {"nu", sp.nu}, {"samples", in.samples}};
            j["bounded"] = m.bounded;
            j["region"] = m.bounded ? "interior" : "exterior";
            json verts = json::array();
            for (const auto& v : m.vertices) verts.push_back(point_json(v));
            j["vertices"] = verts;
            if (m.n == 2)
                j["segments"] = m.segments;
            else
                j["triangles"] = m.triangles;
            emit_json(j, in.out);
        } else if (*asym) {
            if (as.n < 2) throw DomainError("--n must be >= 2");
            if (as.i < 1) throw DomainError("--i must be >= 1");
            const auto lim = asymptotic_limits(as.s, as.i, as.n);
            json j = header("asymptotics");
            j["parameters"] = {{"n", as.n}, {"s", as.s}, {"i", as.i}};
            auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
            auto finite = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
            j["limits"] = {{"a_J1_over_J0", finite(lim.j1)},
                           {"a2_J2_over_J0", finite(lim.j2)},
                           {"ai_Ji_over_J0", opt(lim.ji_product)},
                           {"sqrt_a_Ji", opt(lim.ji_scaled_limit)}};
            json rows = json::array();
            for (double a : parse_list(as.a_list, "--a-list")) {
                if (!(a > 1)) throw DomainError("--a-list values must exceed 1");
                const double J0 = j_closed(as.n, as.s, a, 0, 0);
                const double J1 = j_closed(as.n, as.s, a, 1, 0), J2 = j_closed(as.n, as.s, a, 2, 0);
                const double Ji = j_closed(as.n, as.s, a, as.i, 0);
                rows.push_back({{"a", a},
                                {"a_J1_over_J0", a * J1 / J0},
                                {"a2_J2_over_J0", a * a * J2 / J0},
                                {"ai_Ji_over_J0", std::pow(a, as.i) * Ji / J0},
                                {"sqrt_a_Ji", std::sqrt(a) * Ji}});
            }
            j["rows"] = rows;
            emit_json(j, as.out);
        }
    } catch (const CertificationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cert_failed;
    } catch (const NonConvergence& e) {
        std::cerr << "oracle did not converge: " << e.what() << "\n";
        return no_convergence;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return invalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return invalid;
    }
    return ok;
}
