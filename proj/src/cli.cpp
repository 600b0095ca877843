#include "limitends/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "limitends/conjugate.hpp"
#include "limitends/domain.hpp"
#include "limitends/errors.hpp"
#include "limitends/graph_solver.hpp"
#include "limitends/jenkins.hpp"
#include "limitends/output.hpp"

namespace limitends {

namespace {

using json = nlohmann::json;          // sorted keys: canonical form for hashing
using ojson = nlohmann::ordered_json;  // insertion order: human-facing files

struct Options {
    std::string command;
    std::string input;
    std::string output;
    std::string out_dir = ".";
    std::string report;

    int m0 = 1;
    std::string ends = "two_sided";
    std::vector<double> limits;
    int k = 1;
    double lambda = 0.5;
    bool no_wrap = false;

    bool countable = false;
    double x2 = -0.5;
    double x3 = 0.5;
    int limit_count = 4;
    double limit_choice = 0.5;

    bool random = false;
    std::uint64_t seed = 1;
    int random_k = 3;
    double boost = 0.0;

    double tol_geom = 1e-9;
    double tol_star = 1e-9;
    std::vector<double> levels{10.0, 20.0, 30.0};

    double n = 4.0;
    double M = 4.0;
    double h = 0.05;
    double boundary_factor = 1.0;
    std::string blend = "linear";
    std::optional<double> mirror_axis;
    double solver_tol = 1e-12;
    int max_iters = 100;

    std::vector<double> caps{2.0, 4.0, 8.0};
    std::string edge = "A:1:1";
    double t0 = 0.25;
    double t1 = 0.75;
    double flat_radius = 0.1;
    bool disk = false;
    bool obj = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << content;
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Effective configuration of the run; output locations are excluded so that the hash
// identifies the computation, not where it was written.
json config_json(const Options& o) {
    json j;
    j["command"] = o.command;
    if (!o.input.empty()) j["input_fnv1a"] = hex64(fnv1a(read_file(o.input)));
    j["tol"] = {{"geom", o.tol_geom}, {"star", o.tol_star}};
    if (o.command == "construct") {
        if (o.countable) {
            j["countable"] = {{"x2", o.x2},         {"x3", o.x3}, {"limit_count", o.limit_count},
                              {"limit_choice", o.limit_choice}, {"ends", o.ends}, {"k", o.k}, {"lambda", o.lambda}};
        } else if (o.random) {
            j["random"] = {{"seed", o.seed}, {"k", o.random_k}, {"boost", o.boost}};
        } else {
            j["finite"] = {{"m0", o.m0}, {"ends", o.ends}, {"limits", o.limits},
                           {"k", o.k},   {"lambda", o.lambda}, {"wrap_ends", !o.no_wrap}};
        }
    }
    if (o.command == "check") j["levels"] = o.levels;
    if (o.command == "solve" || o.command == "sweep" || o.command == "conjugate" || o.command == "export") {
        json t = {{"n", o.n},   {"M", o.M},         {"h", o.h}, {"boundary_factor", o.boundary_factor},
                  {"blend", o.blend}, {"solver_tol", o.solver_tol}, {"max_iters", o.max_iters}};
        if (o.mirror_axis) t["mirror_axis"] = *o.mirror_axis;
        j["truncation"] = t;
    }
    if (o.command == "solve") j["segment"] = {o.t0, o.t1};
    if (o.command == "sweep") {
        j["caps"] = o.caps;
        j["edge"] = o.edge;
        j["segment"] = {o.t0, o.t1};
    }
    if (o.command == "conjugate") {
        j["caps"] = o.caps;
        j["flat_radius"] = o.flat_radius;
    }
    if (o.command == "export") j["disk"] = o.disk;
    return j;
}

Provenance provenance(const Options& o) { return {o.command, hex64(fnv1a(config_json(o).dump()))}; }

ojson provenance_json(const Provenance& p) {
    return {{"tool", kToolName}, {"version", kToolVersion}, {"command", p.command}, {"config", p.config_hash}};
}

// nlohmann writes non-finite numbers as null; keep that explicit.
ojson num(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::vector<EndKind> parse_ends(const std::string& s) {
    std::vector<EndKind> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_end_kind(item));
    if (out.empty()) throw InvalidParams("empty end specification");
    return out;
}

ToleranceConfig tolerances(const Options& o) { return {o.tol_geom, o.tol_star}; }

SemiIdealPolygon construct_polygon(const Options& o) {
    if (o.random) {
        std::mt19937_64 rng(o.seed);
        SampleOptions so;
        so.k = o.random_k;
        so.boost = o.boost;
        return sample_star_polygon(rng, so, tolerances(o));
    }
    if (o.countable) {
        CountableParams cp;
        cp.x2 = o.x2;
        cp.x3 = o.x3;
        cp.limit_count = o.limit_count;
        cp.limit_choice = o.limit_choice;
        cp.end_specs = parse_ends(o.ends);
        cp.k = o.k;
        cp.lambda = o.lambda;
        cp.tol = tolerances(o);
        return build_countable_omega_k(cp);
    }
    FiniteParams fp;
    fp.m0 = o.m0;
    fp.end_specs = parse_ends(o.ends);
    if (fp.end_specs.size() == 1 && o.m0 > 1) fp.end_specs.assign(o.m0, fp.end_specs[0]);
    fp.limit_abscissae = o.limits;
    if (fp.limit_abscissae.empty()) {
        for (int j = 2; j <= o.m0; ++j) fp.limit_abscissae.push_back(j - 2.0);
    }
    fp.k = o.k;
    fp.lambda = o.lambda;
    fp.wrap_ends = !o.no_wrap;
    fp.tol = tolerances(o);
    return build_omega_k(fp);
}

std::string polygon_file(const SemiIdealPolygon& poly, const Provenance& p) {
    ojson j = ojson::parse(polygon_to_json(poly));
    j["provenance"] = provenance_json(p);
    return j.dump(2) + "\n";
}

SemiIdealPolygon load_polygon(const Options& o, const ToleranceConfig& tol) {
    if (o.input.empty()) throw ParseError("--input is required");
    SemiIdealPolygon poly = polygon_from_json(read_file(o.input));
    const ValidationReport rep = validate_polygon(poly, tol);
    if (!rep.ok()) {
        std::string msg = "invalid polygon:";
        for (const auto& f : rep.failures) msg += " " + f + ";";
        throw ParseError(msg);
    }
    return poly;
}

TruncationParams truncation(const Options& o) {
    TruncationParams tp;
    tp.n = o.n;
    tp.M = o.M;
    tp.h = o.h;
    tp.boundary_factor = o.boundary_factor;
    if (o.blend == "linear") {
        tp.blend = ArcBlend::Linear;
    } else if (o.blend == "cosine") {
        tp.blend = ArcBlend::Cosine;
    } else {
        throw InvalidParams("blend must be linear or cosine");
    }
    tp.mirror_axis = o.mirror_axis;
    return tp;
}

SolverOptions solver_options(const Options& o) {
    SolverOptions so;
    so.tol = o.solver_tol;
    so.max_iters = o.max_iters;
    return so;
}

std::string fmt(double v) { return format_double(v); }

std::size_t curve_of_edge(const TruncatedProblem& p, std::size_t edge) {
    for (std::size_t c = 0; c < p.curves.size(); ++c) {
        const auto piece = p.curves[c].piece;
        if ((piece == BoundaryTag::Piece::AEdge || piece == BoundaryTag::Piece::BEdge) &&
            p.curves[c].index == static_cast<int>(edge)) {
            return c;
        }
    }
    throw InvalidParams("edge " + std::to_string(edge) + " not found");
}

// "A:m:i" (edge leaving p^m_i, i may be "inf"), "B:m:i" (leaving q^m_i, i may be "lim"),
// or "edge:N".
std::size_t parse_edge(const std::string& spec, const SemiIdealPolygon& poly) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 2 && parts[0] == "edge") {
        const std::size_t e = std::stoul(parts[1]);
        if (e >= poly.size()) throw InvalidParams("edge index out of range");
        return e;
    }
    if (parts.size() != 3 || (parts[0] != "A" && parts[0] != "B")) throw InvalidParams("bad edge spec '" + spec + "'");
    const bool a = parts[0] == "A";
    VertexTag tag;
    tag.m = std::stoi(parts[1]);
    if (a && parts[2] == "inf") {
        tag.kind = VertexTag::Kind::PInf;
    } else if (!a && parts[2] == "lim") {
        tag.kind = VertexTag::Kind::QLimit;
    } else {
        tag.kind = a ? VertexTag::Kind::P : VertexTag::Kind::Q;
        tag.index = std::stoi(parts[2]);
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
        if (poly.vertices[i].tag == tag) return i;
    }
    throw InvalidParams("no edge leaves vertex " + to_string(tag));
}

int cmd_construct(const Options& o, std::ostream& out, std::ostream& err) {
    const ToleranceConfig tol = tolerances(o);
    SemiIdealPolygon poly;
    try {
        poly = construct_polygon(o);
    } catch (const InvalidParams&) {
        throw;
    } catch (const InvalidSeeds&) {
        throw;
    } catch (const InvalidLimits&) {
        throw;
    } catch (const EmptyChoiceInterval&) {
        throw;
    } catch (const Error& e) {
        err << "construction failed: " << e.what() << '\n';
        return kExitNumeric;
    }
    const Provenance prov = provenance(o);
    const ValidationReport rep = validate_polygon(poly, tol);
    const StarCertificate star = check_star(poly, tol);

    std::ostringstream text;
    text << provenance_line(prov) << '\n';
    text << "vertices " << poly.size() << '\n';
    text << std::left << std::setw(6) << "index" << std::setw(14) << "tag" << std::setw(10) << "kind" << std::setw(26)
         << "x" << "y\n";
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vertex& v = poly.vertices[i];
        text << std::setw(6) << i << std::setw(14) << to_string(v.tag);
        if (v.is_ideal()) {
            text << std::setw(10) << "ideal" << std::setw(26) << (v.ideal().is_infinity() ? "inf" : fmt(v.ideal().x()))
                 << "-\n";
        } else {
            text << std::setw(10) << "interior" << std::setw(26) << fmt(v.point().x) << fmt(v.point().y) << '\n';
        }
    }
    text << "edge labels ";
    for (EdgeLabel l : poly.edge_labels()) text << (l == EdgeLabel::A ? 'A' : 'B');
    text << '\n';
    text << "alternation " << (rep.alternation ? "ok" : "FAIL") << ", convex " << (rep.convex ? "ok" : "FAIL")
         << ", ordering " << (rep.ordering ? "ok" : "FAIL") << '\n';
    text << "convexity margin " << fmt(rep.convexity_margin) << '\n';
    text << "star residuals";
    for (const auto& e : star.entries) text << ' ' << to_string(poly.vertices[e.vertex].tag) << '=' << fmt(e.residual);
    text << "\nstar max residual " << fmt(star.max_residual) << (star.valid ? " (valid)" : " (INVALID)") << '\n';
    for (const auto& f : rep.failures) text << "failure: " << f << '\n';

    write_file(o.output.empty() ? "polygon.json" : o.output, polygon_file(poly, prov));
    if (!o.report.empty()) write_file(o.report, text.str());
    out << text.str();
    if (!rep.ok() || !star.valid) return kExitNumeric;
    return kExitOk;
}

int cmd_check(const Options& o, std::ostream& out) {
    const ToleranceConfig tol = tolerances(o);
    const SemiIdealPolygon poly = load_polygon(o, tol);
    const Provenance prov = provenance(o);
    const StarCertificate star = check_star(poly, tol);
    CarVerdict car;
    std::optional<TruncatedVerdict> trunc;
    if (star.valid) {
        car = check_car(poly, star, tol);
        if (!o.levels.empty()) {
            try {
                trunc = check_js_truncated(poly, o.levels, tol);
            } catch (const TooLarge&) {
                trunc.reset();
            }
        }
    }
    ojson j = ojson::parse(jenkins_report_json(poly, star, car, trunc));
    j["provenance"] = provenance_json(prov);
    j["is_js"] = star.valid && car.is_js;
    write_file(o.output.empty() ? "check.json" : o.output, j.dump(2) + "\n");

    out << provenance_line(prov) << '\n';
    out << "star " << (star.valid ? "valid" : "INVALID") << " max residual " << fmt(star.max_residual) << '\n';
    if (star.valid) {
        out << "horodisk margin " << (car.vacuous ? "vacuous" : fmt(car.margin)) << '\n';
        if (trunc) {
            for (const auto& lv : trunc->levels) {
                out << "  n=" << fmt(lv.n) << " alpha=" << fmt(lv.alpha_omega) << " beta=" << fmt(lv.beta_omega)
                    << " min_slack=" << fmt(lv.min_slack) << '\n';
            }
            out << "truncated oracle " << (trunc->is_js ? "JS" : "not JS") << '\n';
        }
    }
    const bool js = star.valid && car.is_js;
    out << "verdict " << (js ? "JS" : "not JS") << '\n';
    if (!js && car.witness) {
        out << "witness " << to_string(poly.vertices[car.witness->first].tag) << ' '
            << to_string(poly.vertices[car.witness->second].tag) << '\n';
    }
    return js ? kExitOk : kExitNegative;
}

bool certified(const SemiIdealPolygon& poly, const ToleranceConfig& tol, std::ostream& err) {
    const StarCertificate star = check_star(poly, tol);
    if (!star.valid) {
        err << "polygon violates the equal-horocycle condition\n";
        return false;
    }
    const CarVerdict car = check_car(poly, star, tol);
    if (!car.is_js) {
        err << "polygon is not a Jenkins-Serrin domain\n";
        return false;
    }
    return true;
}

struct Solved {
    TruncatedProblem problem;
    Solution sol;
};

Solved solve_with_trace(const Options& o, const TruncatedProblem& problem) {
    try {
        return {problem, solve_graph(problem, solver_options(o))};
    } catch (const NonConvergence& e) {
        ojson j;
        j["provenance"] = provenance_json(provenance(o));
        j["error"] = e.what();
        ojson tr = ojson::array();
        for (double v : e.energy_trace) tr.push_back(num(v));
        j["energy_trace"] = tr;
        write_file(join(o.out_dir, "energy_trace.json"), j.dump(2) + "\n");
        throw;
    }
}

void write_objs(const Options& o, const Solution& sol, const Provenance& prov, bool disk) {
    std::ostringstream g, d;
    write_obj(g, *sol.mesh, sol.values, prov);
    write_file(join(o.out_dir, "graph.obj"), g.str());
    ObjOptions mo;
    mo.mirrored = true;
    write_obj(d, *sol.mesh, sol.values, prov, mo);
    write_file(join(o.out_dir, "double.obj"), d.str());
    if (disk) {
        std::ostringstream k;
        ObjOptions dk;
        dk.disk = true;
        write_obj(k, *sol.mesh, sol.values, prov, dk);
        write_file(join(o.out_dir, "disk.obj"), k.str());
    }
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err, bool export_only) {
    const ToleranceConfig tol = tolerances(o);
    const SemiIdealPolygon poly = load_polygon(o, tol);
    if (!certified(poly, tol, err)) return kExitNegative;
    const Provenance prov = provenance(o);
    const TruncatedProblem problem = truncate_and_mesh(poly, truncation(o), tol);
    const Solved s = solve_with_trace(o, problem);
    write_objs(o, s.sol, prov, o.disk);
    if (export_only) {
        out << "wrote " << s.sol.mesh->points.size() << " vertices to " << o.out_dir << '\n';
        return kExitOk;
    }

    CsvTable flux_table;
    flux_table.header = {"edge", "label", "from", "to", "t0", "t1", "flux", "length", "ratio"};
    const auto labels = poly.edge_labels();
    for (std::size_t e = 0; e < poly.size(); ++e) {
        const FluxResult f = boundary_flux(s.sol, problem, curve_of_edge(problem, e), o.t0, o.t1);
        flux_table.rows.push_back({std::to_string(e), labels[e] == EdgeLabel::A ? "A" : "B",
                                   to_string(poly.vertices[e].tag),
                                   to_string(poly.at(static_cast<std::ptrdiff_t>(e) + 1).tag), fmt(o.t0), fmt(o.t1),
                                   fmt(f.value), fmt(f.curve_length), fmt(f.value / f.curve_length)});
    }
    std::ostringstream csv;
    write_csv(csv, flux_table, prov);
    write_file(join(o.out_dir, "flux.csv"), csv.str());

    const ConjugateDiagnostics cd = conjugate_height(s.sol);
    const auto [nu_min, nu_max] = std::minmax_element(cd.nu.begin(), cd.nu.end());
    ojson j;
    j["provenance"] = provenance_json(prov);
    j["vertices"] = problem.mesh->points.size();
    j["triangles"] = problem.mesh->triangles.size();
    j["min_angle_deg"] = num(problem.mesh->min_angle_deg);
    j["corner_triangles"] = problem.mesh->corner_triangles;
    j["energy"] = num(s.sol.energy);
    j["residual_norm"] = num(s.sol.residual_norm);
    j["newton_iters"] = s.sol.newton_iters;
    j["nu_min"] = num(*nu_min);
    j["nu_max"] = num(*nu_max);
    j["loop_defect"] = num(cd.loop_defect);
    j["warnings"] = s.sol.warnings;
    write_file(join(o.out_dir, "diagnostics.json"), j.dump(2) + "\n");
    out << provenance_line(prov) << '\n'
        << "vertices " << problem.mesh->points.size() << ", Newton iterations " << s.sol.newton_iters << ", residual "
        << fmt(s.sol.residual_norm) << ", energy " << fmt(s.sol.energy) << '\n';
    return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const ToleranceConfig tol = tolerances(o);
    const SemiIdealPolygon poly = load_polygon(o, tol);
    if (!certified(poly, tol, err)) return kExitNegative;
    const Provenance prov = provenance(o);
    const SweepSegment seg{parse_edge(o.edge, poly), o.t0, o.t1};
    const auto rows = flux_convergence_sweep(poly, truncation(o), o.caps, seg, solver_options(o));
    CsvTable t;
    t.header = {"M", "flux", "length", "ratio", "energy", "newton_iters", "vertices"};
    for (const auto& r : rows) {
        t.rows.push_back({fmt(r.M), fmt(r.flux), fmt(r.length), fmt(r.ratio), fmt(r.energy),
                          std::to_string(r.newton_iters), std::to_string(r.vertices)});
    }
    std::ostringstream csv;
    write_csv(csv, t, prov);
    write_file(o.output.empty() ? join(o.out_dir, "sweep.csv") : o.output, csv.str());
    out << csv.str();
    return kExitOk;
}

int cmd_conjugate(const Options& o, std::ostream& out, std::ostream& err) {
    const ToleranceConfig tol = tolerances(o);
    const SemiIdealPolygon poly = load_polygon(o, tol);
    if (!certified(poly, tol, err)) return kExitNegative;
    const Provenance prov = provenance(o);
    const TruncatedProblem base = truncate_and_mesh(poly, truncation(o), tol);
    CsvTable t;
    t.header = {"M", "polygon_vertex", "tag", "variation", "surface_length", "normalized"};
    ojson runs = ojson::array();
    for (double M : o.caps) {
        const Solved s = solve_with_trace(o, with_cap(base, M));
        const ConjugateDiagnostics cd = conjugate_height(s.sol);
        for (const auto& a : boundary_flatness(cd, s.problem, s.sol, o.flat_radius)) {
            t.rows.push_back({fmt(M), std::to_string(a.polygon_vertex), to_string(poly.vertices[a.polygon_vertex].tag),
                              fmt(a.variation), fmt(a.surface_length), fmt(a.normalized)});
        }
        const auto [nu_min, nu_max] = std::minmax_element(cd.nu.begin(), cd.nu.end());
        ojson r;
        r["M"] = M;
        r["loop_defect"] = num(cd.loop_defect);
        r["loop_defect_sum"] = num(cd.loop_defect_sum);
        r["cycles"] = cd.cycles;
        r["nu_min"] = num(*nu_min);
        r["nu_max"] = num(*nu_max);
        r["boundary_variation"] = cd.boundary_variation;
        r["mesh_diameter"] = num(s.sol.mesh->diameter());
        runs.push_back(r);
        if (o.obj && M == o.caps.back()) {
            std::ostringstream obj;
            ObjOptions opt;
            opt.color = cd.h_star;
            write_obj(obj, *s.sol.mesh, s.sol.values, prov, opt);
            write_file(join(o.out_dir, "conjugate.obj"), obj.str());
        }
    }
    std::ostringstream csv;
    write_csv(csv, t, prov);
    write_file(join(o.out_dir, "conjugate.csv"), csv.str());
    ojson j;
    j["provenance"] = provenance_json(prov);
    j["runs"] = runs;
    write_file(join(o.out_dir, "conjugate.json"), j.dump(2) + "\n");
    out << csv.str();
    return kExitOk;
}

void add_tolerance_options(CLI::App* c, Options& o) {
    c->add_option("--tol-geom", o.tol_geom, "geometric tolerance");
    c->add_option("--tol-star", o.tol_star, "equal-horocycle tolerance");
}

void add_truncation_options(CLI::App* c, Options& o) {
    c->add_option("-i,--input", o.input, "polygon JSON")->required();
    c->add_option("--out-dir", o.out_dir, "directory for artifacts");
    c->add_option("--n", o.n, "truncation depth below the star horocycles");
    c->add_option("--M", o.M, "cap replacing infinite boundary values");
    c->add_option("--h", o.h, "mesh size in units of y");
    c->add_option("--boundary-factor", o.boundary_factor, "initial boundary spacing relative to h");
    c->add_option("--blend", o.blend, "data on truncation arcs: linear or cosine");
    c->add_option("--mirror-axis", o.mirror_axis, "mesh half the domain and reflect");
    c->add_option("--solver-tol", o.solver_tol, "Newton residual tolerance");
    c->add_option("--max-iters", o.max_iters, "Newton iteration limit");
    add_tolerance_options(c, o);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Semi-ideal polygons, Jenkins-Serrin certification and capped minimal graphs"};
    app.set_help_flag("--help", "print help");
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    auto* construct = app.add_subcommand("construct", "build a polygon and write it as JSON");
    construct->add_option("-o,--output", o.output, "polygon JSON (default polygon.json)");
    construct->add_option("--report", o.report, "text report file");
    construct->add_option("--m0", o.m0, "number of limit ends");
    construct->add_option("--ends", o.ends, "comma separated left/right/two_sided");
    construct->add_option("--limits", o.limits, "finite limit abscissae")->delimiter(',');
    construct->add_option("--k", o.k, "truncation index");
    construct->add_option("--lambda", o.lambda, "interpolation parameter in (0,1)");
    construct->add_flag("--no-wrap", o.no_wrap, "do not read E^{m0+1} as E^1");
    construct->add_flag("--countable", o.countable, "countable-ends construction");
    construct->add_option("--x2", o.x2);
    construct->add_option("--x3", o.x3);
    construct->add_option("--limit-count", o.limit_count);
    construct->add_option("--limit-choice", o.limit_choice);
    construct->add_flag("--random", o.random, "random equal-horocycle polygon");
    construct->add_option("--seed", o.seed);
    construct->add_option("--random-k", o.random_k, "ideal vertices of the random polygon");
    construct->add_option("--boost", o.boost, "raise one horocycle to provoke a violation");
    add_tolerance_options(construct, o);

    auto* check = app.add_subcommand("check", "certify a polygon as a Jenkins-Serrin domain");
    check->add_option("-i,--input", o.input, "polygon JSON")->required();
    check->add_option("-o,--output", o.output, "report JSON (default check.json)");
    check->add_option("--levels", o.levels, "truncation levels of the oracle")->delimiter(',');
    add_tolerance_options(check, o);

    auto* solve = app.add_subcommand("solve", "solve the capped problem and write all artifacts");
    add_truncation_options(solve, o);
    solve->add_option("--t0", o.t0, "flux sub-arc start");
    solve->add_option("--t1", o.t1, "flux sub-arc end");
    solve->add_flag("--disk", o.disk, "also write the Poincare disk OBJ");

    auto* sweep = app.add_subcommand("sweep", "flux ratio across caps");
    add_truncation_options(sweep, o);
    sweep->add_option("-o,--output", o.output, "CSV file (default <out-dir>/sweep.csv)");
    sweep->add_option("--caps", o.caps, "caps M")->delimiter(',');
    sweep->add_option("--edge", o.edge, "A:m:i, B:m:i or edge:N");
    sweep->add_option("--t0", o.t0);
    sweep->add_option("--t1", o.t1);

    auto* conj = app.add_subcommand("conjugate", "angle function and conjugate height diagnostics");
    add_truncation_options(conj, o);
    conj->add_option("--caps", o.caps, "caps M")->delimiter(',');
    conj->add_option("--flat-radius", o.flat_radius, "hyperbolic radius of the corner arcs");
    conj->add_flag("--obj", o.obj, "write an OBJ coloured by h*");

    auto* exp = app.add_subcommand("export", "write OBJ meshes of the solution");
    add_truncation_options(exp, o);
    exp->add_flag("--disk", o.disk, "also write the Poincare disk OBJ");

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitInput;
    }
    for (auto* sc : app.get_subcommands()) o.command = sc->get_name();

    try {
        if (o.command == "construct") return cmd_construct(o, out, err);
        if (o.command == "check") return cmd_check(o, out);
        if (o.command == "solve") return cmd_solve(o, out, err, false);
        if (o.command == "export") return cmd_solve(o, out, err, true);
        if (o.command == "sweep") return cmd_sweep(o, out, err);
        if (o.command == "conjugate") return cmd_conjugate(o, out, err);
    } catch (const ParseError& e) {
        err << e.what() << '\n';
        return kExitInput;
    } catch (const InvalidParams& e) {
        err << e.what() << '\n';
        return kExitInput;
    } catch (const InvalidSeeds& e) {
        err << e.what() << '\n';
        return kExitInput;
    } catch (const InvalidLimits& e) {
        err << e.what() << '\n';
        return kExitInput;
    } catch (const EmptyChoiceInterval& e) {
        err << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitInput;
}

}  // namespace limitends
