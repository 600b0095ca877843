#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "limitends/conjugate.hpp"
#include "limitends/domain.hpp"
#include "limitends/graph_solver.hpp"
#include "limitends/hyp_geom.hpp"
#include "limitends/jenkins.hpp"
#include "oracles.hpp"

using namespace limitends;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "failed: " + what;
        }
    }
    void note(const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += s;
    }
};

std::string num(double v, int digits = 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SemiIdealPolygon omega1() {
    FiniteParams p;
    p.seeds = {std::pair{-0.5, 0.5}};
    return build_omega1(p);
}

Horocycle random_horocycle(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::normal_distribution<double> lev(0.0, 1.0);
    std::bernoulli_distribution inf(0.2);
    const IdealPoint base = inf(rng) ? IdealPoint::infinity() : IdealPoint::finite(ux(rng));
    return horocycle_at_level(base, lev(rng));
}

Outcome geometry() {
    Outcome o;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const HPoint p = oracle::random_point(rng), q = oracle::random_point(rng);
        const double d = dist(p, q);
        worst = std::max(worst, std::abs(d - oracle::geodesic_length(p, q)) / d);
    }
    o.require(worst < 1e-8, "dist vs quadrature");
    o.note("dist rel err " + num(worst));

    double incidence = 0.0;
    int points = 0;
    for (int i = 0; i < 500; ++i) {
        const Horocycle a = random_horocycle(rng);
        Horocycle b = random_horocycle(rng);
        while (b.base.same_as(a.base, 1e-9)) b = random_horocycle(rng);
        for (const HPoint& p : horocycle_intersection(a, b)) {
            incidence = std::max({incidence, horocycle_residual(a, p), horocycle_residual(b, p)});
            ++points;
        }
    }
    o.require(incidence < 1e-10, "horocycle incidence");
    o.note("incidence " + num(incidence) + " over " + std::to_string(points) + " points");
    return o;
}

std::vector<std::vector<EndKind>> all_specs(int m0) {
    std::vector<std::vector<EndKind>> out{{}};
    for (int m = 0; m < m0; ++m) {
        std::vector<std::vector<EndKind>> next;
        for (const auto& s : out)
            for (EndKind e : {EndKind::Left, EndKind::Right, EndKind::TwoSided}) {
                next.push_back(s);
                next.back().push_back(e);
            }
        out = std::move(next);
    }
    return out;
}

bool constructed_ok(const SemiIdealPolygon& poly, double& worst_star) {
    const auto rep = validate_polygon(poly);
    const auto star = check_star(poly);
    worst_star = std::max(worst_star, star.max_residual);
    if (!rep.alternation || !rep.ordering || !rep.convex || !(rep.convexity_margin > 0.0)) return false;
    if (!(star.max_residual < 1e-9)) return false;
    const auto car = check_car(poly, star);
    return car.is_js && car.margin > 0.0;
}

Outcome construction() {
    Outcome o;
    int polygons = 0, bad = 0, bad_nesting = 0;
    double worst_star = 0.0;
    for (int m0 = 1; m0 <= 3; ++m0)
        for (const auto& specs : all_specs(m0)) {
            std::optional<SemiIdealPolygon> prev;
            for (int k = 1; k <= 4; ++k) {
                FiniteParams p;
                p.m0 = m0;
                p.end_specs = specs;
                p.k = k;
                for (int j = 2; j <= m0; ++j) p.limit_abscissae.push_back(j - 2.0);
                const auto poly = build_omega_k(p);
                ++polygons;
                bad += !constructed_ok(poly, worst_star);
                if (prev && !polygon_contains(poly, *prev)) ++bad_nesting;
                prev = poly;
            }
        }
    int bad_count = 0;
    for (const auto& specs : all_specs(3)) {
        std::optional<SemiIdealPolygon> prev;
        for (int k = 1; k <= 2; ++k) {
            CountableParams p;
            p.k = k;
            p.limit_count = k + 3;
            p.end_specs = specs;
            const auto poly = build_countable_omega_k(p);
            ++polygons;
            bad += !constructed_ok(poly, worst_star);
            if (prev && !polygon_contains(poly, *prev)) ++bad_nesting;
            prev = poly;
            auto spec = [&](int m) { return specs[(m - 1) % specs.size()]; };
            int N = 0;
            for (int m = 1; m <= k + 1; ++m) {
                N += spec(m) != EndKind::Right ? 2 * k - 1 : 1;
                N += spec(m + 1) != EndKind::Left ? 2 * k - 1 : 1;
            }
            bad_count += poly.size() != static_cast<std::size_t>(4 * (k + 1) + 2 + N);
        }
    }
    o.require(bad == 0, std::to_string(bad) + " polygons with a failed property");
    o.require(bad_nesting == 0, std::to_string(bad_nesting) + " nesting failures");
    o.require(bad_count == 0, std::to_string(bad_count) + " countable vertex counts");
    o.note(std::to_string(polygons) + " polygons, max star residual " + num(worst_star));
    return o;
}

// An interior vertex strictly inside the horodisk of a non-adjacent ideal vertex.
bool has_violation(const SemiIdealPolygon& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!poly.vertices[i].is_ideal()) continue;
        const IdealPoint& base = poly.vertices[i].ideal();
        const double level = busemann(base, poly.at(static_cast<std::ptrdiff_t>(i) + 1).point());
        for (std::size_t j = 0; j < n; ++j) {
            if (poly.vertices[j].is_ideal() || j == (i + 1) % n || j == (i + n - 1) % n) continue;
            if (busemann(base, poly.vertices[j].point()) < level - 1e-9) return true;
        }
    }
    return false;
}

Outcome js_equivalence() {
    Outcome o;
    std::mt19937_64 rng(303);
    int agree = 0, total = 0, violations = 0;
    double affinity = 0.0;
    for (int i = 0; i < 220; ++i) {
        SampleOptions opt;
        opt.k = 2 + i % 2;
        SemiIdealPolygon poly;
        if (i < 200) {
            poly = sample_star_polygon(rng, opt);
        } else {
            opt.k = 3;
            opt.boost = 3.0;
            do poly = sample_star_polygon(rng, opt);
            while (!has_violation(poly));
        }
        const auto car = check_car(poly, check_star(poly));
        const auto tr = check_js_truncated(poly, {10, 20, 30});
        agree += car.is_js == tr.is_js;
        violations += !car.is_js;
        affinity = std::max(affinity, tr.affinity_residual);
        ++total;
    }
    o.require(agree == total, "verdicts disagree");
    o.require(violations >= 20, "fewer than 20 violations");
    o.require(affinity < 1e-8, "slack affinity");
    o.note(std::to_string(agree) + "/" + std::to_string(total) + " agree, " + std::to_string(violations) +
           " not JS, affinity residual " + num(affinity));
    return o;
}

double triangle_energy(const TriMesh& mesh, const std::array<int, 3>& t, const std::vector<double>& u) {
    const HPoint &a = mesh.points[t[0]], &b = mesh.points[t[1]], &c = mesh.points[t[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double du1 = u[t[1]] - u[t[0]], du2 = u[t[2]] - u[t[0]];
    const double gx = (du1 * (c.y - a.y) - du2 * (b.y - a.y)) / det;
    const double gy = (du2 * (b.x - a.x) - du1 * (c.x - a.x)) / det;
    const double yc = (a.y + b.y + c.y) / 3.0;
    return 0.5 * det * std::sqrt(1.0 + yc * yc * (gx * gx + gy * gy)) / (yc * yc);
}

Outcome solver() {
    Outcome o;
    TruncationParams tp;
    tp.n = 4;
    tp.M = 4;
    tp.h = 0.05;
    const auto pr = truncate_and_mesh(omega1(), tp);

    auto u = harmonic_extension(pr);
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uu(-0.5, 0.5);
    for (std::size_t v = 0; v < u.size(); ++v)
        if (!pr.is_fixed(v)) u[v] += uu(rng);
    const auto g = graph_energy_gradient(*pr.mesh, u);
    double fd_err = 0.0;
    const double eps = 1e-5;
    for (int dir = 0; dir < 20; ++dir) {
        std::vector<double> d(u.size()), up = u, um = u;
        double gd = 0.0;
        for (std::size_t v = 0; v < u.size(); ++v) {
            d[v] = uu(rng);
            up[v] += eps * d[v];
            um[v] -= eps * d[v];
            gd += g[v] * d[v];
        }
        double diff = 0.0;
        for (const auto& t : pr.mesh->triangles) diff += triangle_energy(*pr.mesh, t, up) - triangle_energy(*pr.mesh, t, um);
        fd_err = std::max(fd_err, std::abs(diff / (2.0 * eps) - gd) / std::abs(gd));
    }
    o.require(fd_err < 1e-6, "gradient vs finite differences");

    double const_dev = 0.0;
    for (double c : {0.0, 1.0, -3.25}) {
        const auto sol = solve_graph(with_constant_data(pr, c));
        for (double v : sol.values) const_dev = std::max(const_dev, std::abs(v - c));
    }
    o.require(const_dev <= 1e-12, "constant data");

    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = solve_graph(pr);
    const double solve_time = seconds_since(t0);
    int violations = 0;
    for (std::size_t v = 0; v < sol.values.size(); ++v)
        if (!pr.is_fixed(v) && (sol.values[v] < -4.0 || sol.values[v] > 4.0)) ++violations;
    o.require(violations == 0, "maximum principle");
    o.require(solve_time < 60.0, "solve time");

    TruncationParams sp = tp;
    sp.mirror_axis = 0.0;
    const auto spr = truncate_and_mesh(symmetric_quadrilateral(), sp);
    const auto ssol = solve_graph(spr);
    const auto& pts = ssol.mesh->points;
    std::map<std::pair<double, double>, std::size_t> index;
    for (std::size_t v = 0; v < pts.size(); ++v) index[{pts[v].x, pts[v].y}] = v;
    double axis = 0.0;
    int on_axis = 0;
    for (std::size_t v = 0; v < pts.size(); ++v)
        if (pts[v].x == 0.0) {
            axis += ssol.values[v];
            ++on_axis;
        }
    axis /= std::max(on_axis, 1);
    double odd = 0.0;
    for (std::size_t v = 0; v < pts.size(); ++v) {
        const auto it = index.find({-pts[v].x, pts[v].y});
        odd = it == index.end() ? INFINITY
                                : std::max(odd, std::abs(ssol.values[v] + ssol.values[it->second] - 2.0 * axis));
    }
    o.require(odd < 1e-6, "antisymmetry");
    o.note("fd err " + num(fd_err) + ", constant dev " + num(const_dev) + ", antisymmetry " + num(odd) + ", solve " +
           num(solve_time) + " s at " + std::to_string(sol.values.size()) + " vertices");
    return o;
}

std::vector<HPoint> geodesic_polyline(const HPoint& a, const HPoint& b, int pieces) {
    const Geodesic g = geodesic_through(a, b);
    const double sa = geodesic_coordinate(g, a), sb = geodesic_coordinate(g, b);
    std::vector<HPoint> out{a};
    for (int i = 1; i < pieces; ++i) out.push_back(geodesic_point(g, sa + (sb - sa) * i / pieces));
    out.push_back(b);
    return out;
}

Outcome flux_suite() {
    Outcome o;
    TruncationParams tp;
    tp.n = 4;
    tp.M = 4;
    tp.h = 0.05;
    const auto pr = truncate_and_mesh(omega1(), tp);
    const auto sol = solve_graph(pr);

    std::vector<int> inner;
    for (std::size_t v = 0; v < sol.mesh->points.size(); ++v)
        if (!pr.is_fixed(v)) inner.push_back(static_cast<int>(v));
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<std::size_t> pick(0, inner.size() - 1);
    double loop = 0.0;
    for (int trial = 0; trial < 200; ++trial)
        for (const auto& l : dual_cell_loops(*sol.mesh, {inner[pick(rng)]})) {
            const auto r = flux(sol, l);
            loop = std::max(loop, std::abs(r.value) / r.curve_length);
        }
    o.require(loop < 1e-10, "closed-loop flux");

    std::uniform_int_distribution<std::size_t> tri(0, sol.mesh->triangles.size() - 1);
    int done = 0, exceed = 0;
    double ratio = 0.0;
    while (done < 50) {
        const HPoint a = sol.mesh->centroid(tri(rng)), b = sol.mesh->centroid(tri(rng));
        if (dist(a, b) < 0.2) continue;
        FluxResult r;
        try {
            r = flux(sol, geodesic_polyline(a, b, 64));
        } catch (const std::exception&) {
            continue;
        }
        exceed += !(std::abs(r.value) < r.curve_length);
        ratio = std::max(ratio, std::abs(r.value) / r.curve_length);
        ++done;
    }
    o.require(exceed == 0, "|F| < |C|");

    TruncationParams sp = tp;
    sp.n = 6;
    const auto rows = flux_convergence_sweep(omega1(), sp, {2.0, 4.0, 8.0}, {0});
    bool increasing = true;
    for (std::size_t i = 1; i < rows.size(); ++i) increasing = increasing && rows[i].ratio > rows[i - 1].ratio;
    o.require(increasing, "sweep ratio increasing");
    o.require(std::abs(rows.back().ratio - 1.0) < 0.05, "ratio within 5% of 1 at M=8");
    o.note("loop flux " + num(loop) + ", max |F|/|C| " + num(ratio) + ", ratios " + num(rows[0].ratio, 6) + " " +
           num(rows[1].ratio, 6) + " " + num(rows[2].ratio, 6));
    return o;
}

std::vector<SemiIdealPolygon> two_sided_sequence() {
    std::vector<SemiIdealPolygon> polys;
    for (int k = 1; k <= 4; ++k) {
        FiniteParams p;
        p.end_specs = {EndKind::TwoSided};
        p.k = k;
        polys.push_back(build_omega_k(p));
    }
    return polys;
}

TruncationParams sequence_truncation() {
    TruncationParams tp;
    tp.n = 4;
    tp.M = 4;
    tp.h = 0.05;
    return tp;
}

const SequenceReport& sequence_report() {
    static const SequenceReport rep =
        sequence_diagnostics(two_sided_sequence(), sequence_truncation(), CompactDisk{}, HPoint{0.0, 0.5});
    return rep;
}

Outcome nested_sequence() {
    Outcome o;
    const auto& rep = sequence_report();
    o.require(!rep.divergence_flag, "divergence flag");
    o.require(rep.gradient_factor < 2.0, "gradient sup factor");
    bool decreasing = true;
    for (std::size_t i = 2; i < rep.rows.size(); ++i)
        decreasing = decreasing && rep.rows[i].diff_sup < rep.rows[i - 1].diff_sup;
    o.require(decreasing, "sup|u_k+1 - u_k| decreasing");
    std::string diffs;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) diffs += " " + num(rep.rows[i].diff_sup);
    o.note("gradient factor " + num(rep.gradient_factor) + ", diffs" + diffs);
    return o;
}

Outcome conjugation() {
    Outcome o;
    TruncationParams tp;
    tp.n = 4;
    tp.M = 4;
    tp.h = 0.05;
    const auto coarse = solve_graph(truncate_and_mesh(omega1(), tp));
    tp.h = 0.025;
    const auto fine = solve_graph(truncate_and_mesh(omega1(), tp));
    const auto dc = conjugate_height(coarse), df = conjugate_height(fine);
    o.require(dc.loop_defect < 1e-6 * coarse.mesh->diameter(), "loop defect bound");
    o.require(df.loop_defect < dc.loop_defect, "loop defect decreases under refinement");

    bool nu_ok = true;
    for (const auto* d : {&dc, &df})
        for (double v : d->nu) nu_ok = nu_ok && v > 0.0 && v <= 1.0;
    o.require(nu_ok, "nu in (0, 1]");

    const auto& rep = sequence_report();
    double lo = 1.0;
    for (const auto& r : rep.rows) lo = std::min(lo, r.min_nu);
    o.require(rep.rows.front().min_nu > 0.0 && lo >= 0.5 * rep.rows.front().min_nu, "min nu on K bounded below");

    TruncationParams sp;
    sp.n = 4;
    sp.h = 0.05;
    sp.M = 2;
    sp.mirror_axis = 0.0;
    const auto base = truncate_and_mesh(symmetric_quadrilateral(), sp);
    std::vector<double> flat;
    for (double M : {2.0, 4.0, 8.0}) {
        const auto pr = with_cap(base, M);
        const auto sol = solve_graph(pr);
        double worst = 0.0;
        for (const auto& arc : boundary_flatness(conjugate_height(sol), pr, sol)) worst = std::max(worst, arc.normalized);
        flat.push_back(worst);
    }
    o.require(flat[1] < flat[0] && flat[2] < flat[1], "normalized boundary variation decreasing");
    o.note("loop defect h=0.05 " + num(dc.loop_defect) + ", h=0.025 " + num(df.loop_defect) + ", min nu on K " +
           num(lo) + ", flatness " + num(flat[0]) + " " + num(flat[1]) + " " + num(flat[2]));
    return o;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(LIMITENDS_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome reproducibility() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / ("limitends_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    for (const char* run : {"a", "b"}) {
        const fs::path d = root / run;
        fs::create_directories(d);
        const std::string poly = (d / "polygon.json").string();
        const std::string dir = d.string();
        const fs::path log = d / "log.txt";
        const std::vector<std::pair<std::string, int>> steps = {
            {"construct --m0 1 --ends two_sided --k 2 -o " + poly + " --report " + dir + "/construct.txt", 0},
            {"check -i " + poly + " -o " + dir + "/check.json", 0},
            {"solve -i " + poly + " --out-dir " + dir + " --h 0.1", 0},
            {"sweep -i " + poly + " --out-dir " + dir + " --caps 2,4,8 --edge A:1:1 --h 0.1", 0},
            {"conjugate -i " + poly + " --out-dir " + dir + " --caps 2,4,8 --h 0.1", 0},
            {"construct --random --random-k 3 --seed 7 --boost 3 -o " + dir + "/random.json", 0},
            {"check -i " + dir + "/random.json -o " + dir + "/random_check.json", 1},
        };
        for (const auto& [args, expect] : steps) {
            const int code = run_cli(args, log);
            o.require(code == expect, "exit code " + std::to_string(code) + " for: " + args.substr(0, args.find(' ')));
        }
        fs::remove(log);
    }
    int compared = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
        const auto ext = e.path().extension();
        if (ext != ".json" && ext != ".csv") continue;
        ++compared;
        const fs::path other = root / "b" / e.path().filename();
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
            ++differ;
            o.require(false, e.path().filename().string() + " differs");
        }
    }
    o.require(compared >= 6, "too few artifacts");
    o.note(std::to_string(compared) + " JSON/CSV artifacts compared, " + std::to_string(differ) + " differ");
    fs::remove_all(root);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"geometry oracles", geometry},
        {"construction suite", construction},
        {"JS criterion equivalence", js_equivalence},
        {"solver correctness", solver},
        {"flux suite", flux_suite},
        {"nested-sequence diagnostics", nested_sequence},
        {"conjugation diagnostics", conjugation},
        {"reproducibility", reproducibility},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::printf("criterion %zu %s: %s (%.1f s) %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    seconds_since(t0), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
