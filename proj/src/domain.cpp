#include "limitends/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "limitends/errors.hpp"

namespace limitends {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_plus_kind(EndKind e) { return e == EndKind::Right || e == EndKind::TwoSided; }
bool is_minus_kind(EndKind e) { return e == EndKind::Left || e == EndKind::TwoSided; }

double abscissa_or(const IdealPoint& p, double if_inf) { return p.is_infinity() ? if_inf : p.x(); }

std::pair<double, double> default_seeds(double lo, double hi) {
    if (lo < 0.0 && 0.0 < hi) return {0.5 * std::max(lo, -1.0), 0.5 * std::min(hi, 1.0)};
    if (std::isfinite(lo) && std::isfinite(hi)) return {lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0};
    if (!std::isfinite(lo)) return {hi - 2.0, hi - 1.0};
    return {lo + 1.0, lo + 2.0};
}

void check_seeds(int m, double lo, double hi, double xm1, double x1) {
    const bool ok_order = lo < xm1 && xm1 < x1 && x1 < hi;
    bool ok = ok_order && std::isfinite(xm1) && std::isfinite(x1);
    if (lo < 0.0 && 0.0 < hi) ok = ok && std::max(lo, -1.0) < xm1 && xm1 < 0.0 && 0.0 < x1 && x1 < std::min(hi, 1.0);
    if (!ok) {
        throw InvalidSeeds("block " + std::to_string(m) + ": seeds (" + std::to_string(xm1) + ", " +
                           std::to_string(x1) + ") not admissible in (" + std::to_string(lo) + ", " +
                           std::to_string(hi) + ")");
    }
}

struct BlockSpec {
    int m = 1;
    IdealPoint lo;  // p_inf^m
    IdealPoint hi;  // p_inf^{m+1}
    double xm1 = 0.0;
    double x1 = 0.0;
    bool plus = false;
    bool minus = false;
    int k = 1;
    double lambda = 0.5;
    ToleranceConfig tol;
};

Vertex ideal_vertex(const IdealPoint& p, VertexTag::Kind kind, int m, int index) {
    return Vertex{p, VertexTag{kind, m, index}};
}

Vertex interior_vertex(const HPoint& p, VertexTag::Kind kind, int m, int index) {
    return Vertex{p, VertexTag{kind, m, index}};
}

double choose(double b, double a, double lambda) { return (1.0 - lambda) * b + lambda * a; }

// Ideal vertices accumulate towards `limit` starting from `seed`. `dir` is +1 on the
// plus side (indices 1, 3, 5, ...) and -1 on the minus side. Returns the vertices in
// increasing index order: p_{+-1}, p_{+-2}, ..., p_{+-(2k-1)}, q_{+-2k}.
std::vector<Vertex> build_side(const BlockSpec& s, double seed, const IdealPoint& limit, int dir, int depth) {
    const Horocycle c_limit = horocycle_at(limit, kP0);
    std::vector<Vertex> out;
    IdealPoint x = IdealPoint::finite(seed);
    Horocycle c = horocycle_at(x, kP0);
    out.push_back(ideal_vertex(x, VertexTag::Kind::P, s.m, dir));
    for (int i = 1; i <= depth; ++i) {
        const HPoint q = second_intersection(c, c_limit, kP0, s.tol);
        if (i == depth) {
            out.push_back(interior_vertex(q, VertexTag::Kind::Q, s.m, dir * 2 * i));
            break;
        }
        const Geodesic big = geodesic_through(x, q, s.tol);
        const IdealPoint a_pt = other_endpoint(big, x, s.tol);
        const Geodesic small = geodesic_through(limit, q, s.tol);
        const IdealPoint b_pt = other_endpoint(small, limit, s.tol);
        if (a_pt.is_infinity() || b_pt.is_infinity()) {
            throw DegenerateIntersection("choice interval endpoint at infinity in block " + std::to_string(s.m));
        }
        const double a = a_pt.x();
        const double b = b_pt.x();
        if (dir * (a - b) < -s.tol.tol_geom) {
            throw EmptyChoiceInterval("block " + std::to_string(s.m) + " step " + std::to_string(i) +
                                      ": b = " + std::to_string(b) + ", a = " + std::to_string(a));
        }
        const IdealPoint x_next = IdealPoint::finite(choose(b, a, s.lambda));
        const Horocycle c_next = horocycle_at(x_next, kP0);
        const HPoint p_even = second_intersection(c, c_next, kP0, s.tol);
        out.push_back(interior_vertex(p_even, VertexTag::Kind::P, s.m, dir * 2 * i));
        out.push_back(ideal_vertex(x_next, VertexTag::Kind::P, s.m, dir * (2 * i + 1)));
        x = x_next;
        c = c_next;
    }
    return out;
}

// p_inf^m followed by the block's vertices up to (excluding) p_inf^{m+1}.
std::vector<Vertex> build_block(const BlockSpec& s) {
    std::vector<Vertex> out;
    out.push_back(ideal_vertex(s.lo, VertexTag::Kind::PInf, s.m, 0));

    std::vector<Vertex> minus = build_side(s, s.xm1, s.lo, -1, s.minus ? s.k : 1);
    std::reverse(minus.begin(), minus.end());
    out.insert(out.end(), minus.begin(), minus.end());

    const Horocycle cm1 = horocycle_at(IdealPoint::finite(s.xm1), kP0);
    const Horocycle c1 = horocycle_at(IdealPoint::finite(s.x1), kP0);
    out.push_back(interior_vertex(second_intersection(cm1, c1, kP0, s.tol), VertexTag::Kind::P, s.m, 0));

    const std::vector<Vertex> plus = build_side(s, s.x1, s.hi, +1, s.plus ? s.k : 1);
    out.insert(out.end(), plus.begin(), plus.end());
    return out;
}

void check_lambda(double lambda, const char* what) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidParams(std::string(what) + " must lie in [0, 1]");
}

std::pair<double, double> seeds_for(const std::vector<std::optional<std::pair<double, double>>>& seeds, int m,
                                    double lo, double hi) {
    std::pair<double, double> s = default_seeds(lo, hi);
    if (static_cast<std::size_t>(m - 1) < seeds.size() && seeds[m - 1]) s = *seeds[m - 1];
    check_seeds(m, lo, hi, s.first, s.second);
    return s;
}

void validate_finite(const FiniteParams& p) {
    if (p.m0 < 1) throw InvalidParams("m0 must be >= 1");
    if (static_cast<int>(p.end_specs.size()) != p.m0) throw InvalidParams("end_specs must have length m0");
    if (static_cast<int>(p.limit_abscissae.size()) != p.m0 - 1) {
        throw InvalidParams("limit_abscissae must have length m0 - 1");
    }
    for (std::size_t i = 0; i < p.limit_abscissae.size(); ++i) {
        if (!std::isfinite(p.limit_abscissae[i])) throw InvalidParams("limit abscissae must be finite");
        if (i > 0 && !(p.limit_abscissae[i - 1] < p.limit_abscissae[i])) {
            throw InvalidParams("limit abscissae must be strictly increasing");
        }
    }
    if (p.k < 1) throw InvalidParams("k must be >= 1");
    check_lambda(p.lambda, "lambda");
}

EndKind countable_end(const CountableParams& p, int m) {
    return p.end_specs[static_cast<std::size_t>(m - 1) % p.end_specs.size()];
}

HPoint limit_q(const IdealPoint& limit, const ToleranceConfig& tol) {
    return second_intersection(horocycle_at(limit, kP0), horocycle_at(IdealPoint::infinity(), kP0), kP0, tol);
}

}  // namespace

EndKind parse_end_kind(const std::string& s) {
    if (s == "left") return EndKind::Left;
    if (s == "right") return EndKind::Right;
    if (s == "two_sided" || s == "2-sided" || s == "twosided") return EndKind::TwoSided;
    throw InvalidParams("unknown end kind '" + s + "'");
}

std::string to_string(EndKind e) {
    switch (e) {
        case EndKind::Left: return "left";
        case EndKind::Right: return "right";
        case EndKind::TwoSided: return "two_sided";
    }
    return "?";
}

std::string to_string(const VertexTag& t) {
    const std::string m = std::to_string(t.m);
    switch (t.kind) {
        case VertexTag::Kind::PInf: return "p_inf^" + m;
        case VertexTag::Kind::P: return "p^" + m + "_" + std::to_string(t.index);
        case VertexTag::Kind::Q: return "q^" + m + "_" + std::to_string(t.index);
        case VertexTag::Kind::QLimit: return "q^" + m;
    }
    return "?";
}

VertexTag parse_tag(const std::string& s) {
    VertexTag t;
    int m = 0;
    int idx = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "p_inf^%d%c", &m, &tail) == 1) return {VertexTag::Kind::PInf, m, 0};
    if (std::sscanf(s.c_str(), "p^%d_%d%c", &m, &idx, &tail) == 2) return {VertexTag::Kind::P, m, idx};
    if (std::sscanf(s.c_str(), "q^%d_%d%c", &m, &idx, &tail) == 2) return {VertexTag::Kind::Q, m, idx};
    if (std::sscanf(s.c_str(), "q^%d%c", &m, &tail) == 1) return {VertexTag::Kind::QLimit, m, 0};
    throw ParseError("bad vertex tag '" + s + "'");
}

Anchor Vertex::anchor() const {
    if (is_ideal()) return ideal();
    return point();
}

const Vertex& SemiIdealPolygon::at(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(vertices.size());
    return vertices[static_cast<std::size_t>(((i % n) + n) % n)];
}

std::vector<EdgeLabel> SemiIdealPolygon::edge_labels() const {
    std::vector<EdgeLabel> out;
    out.reserve(vertices.size());
    for (const auto& v : vertices) out.push_back(v.is_ideal() ? EdgeLabel::A : EdgeLabel::B);
    return out;
}

Geodesic SemiIdealPolygon::edge_geodesic(std::size_t i) const {
    return geodesic_through(at(static_cast<std::ptrdiff_t>(i)).anchor(), at(static_cast<std::ptrdiff_t>(i) + 1).anchor());
}

int SemiIdealPolygon::inner_sign(std::size_t i) const {
    const Vertex& u = at(static_cast<std::ptrdiff_t>(i));
    const Vertex& v = at(static_cast<std::ptrdiff_t>(i) + 1);
    const Geodesic g = edge_geodesic(i);
    if (g.is_vertical()) {
        auto height = [](const Vertex& w) {
            if (!w.is_ideal()) return w.point().y;
            return w.ideal().is_infinity() ? kInf : 0.0;
        };
        // Going up, the left side is {x < c}.
        return height(v) > height(u) ? -1 : 1;
    }
    auto angle = [&g](const Vertex& w) {
        if (w.is_ideal()) return w.ideal().x() > g.center ? 0.0 : std::numbers::pi;
        return std::atan2(w.point().y, w.point().x - g.center);
    };
    // Counter-clockwise along the semicircle keeps the inside on the left.
    return angle(v) > angle(u) ? -1 : 1;
}

bool in_m_plus(const FiniteParams& params, int m) {
    if (m == params.m0) return params.wrap_ends && is_plus_kind(params.end_specs[0]);
    return is_plus_kind(params.end_specs[m]);
}

bool in_m_minus(const FiniteParams& params, int m) { return is_minus_kind(params.end_specs[m - 1]); }

SemiIdealPolygon build_omega_k(const FiniteParams& params) {
    validate_finite(params);
    SemiIdealPolygon poly;
    std::vector<IdealPoint> limits{IdealPoint::infinity()};
    for (double x : params.limit_abscissae) limits.push_back(IdealPoint::finite(x));
    for (int m = 1; m <= params.m0; ++m) {
        BlockSpec s;
        s.m = m;
        s.lo = limits[m - 1];
        s.hi = m < params.m0 ? limits[m] : IdealPoint::infinity();
        const double lo = abscissa_or(s.lo, -kInf);
        const double hi = m < params.m0 ? abscissa_or(s.hi, kInf) : kInf;
        std::tie(s.xm1, s.x1) = seeds_for(params.seeds, m, lo, hi);
        s.plus = in_m_plus(params, m);
        s.minus = in_m_minus(params, m);
        s.k = params.k;
        s.lambda = params.lambda;
        s.tol = params.tol;
        const auto block = build_block(s);
        poly.vertices.insert(poly.vertices.end(), block.begin(), block.end());
    }
    return poly;
}

SemiIdealPolygon build_omega1(const FiniteParams& params) {
    FiniteParams p = params;
    p.k = 1;
    return build_omega_k(p);
}

CountableLimits countable_limit_vertices(const CountableParams& params) {
    if (!(-1.0 < params.x2 && params.x2 < params.x3 && params.x3 <= 1.0)) {
        throw InvalidLimits("need -1 < x2 < x3 <= 1");
    }
    if (!(params.x3 > 0.0)) {
        throw InvalidLimits("x3 must be positive for the limit sequence to increase");
    }
    if (params.limit_count < 3) throw InvalidParams("limit_count must be >= 3");
    check_lambda(params.limit_choice, "limit_choice");

    CountableLimits out;
    out.limits = {IdealPoint::infinity(), IdealPoint::finite(params.x2), IdealPoint::finite(params.x3)};
    for (int i = 3; static_cast<int>(out.limits.size()) < params.limit_count; ++i) {
        const IdealPoint p = out.limits[i - 1];
        ExtensionChoice c;
        c.index = i;
        c.q = limit_q(p, params.tol);
        c.alpha = geodesic_through(p, c.q, params.tol);
        c.beta = Geodesic::vertical(c.q.x);
        const IdealPoint a = other_endpoint(c.alpha, p, params.tol);
        if (a.is_infinity()) throw DegenerateIntersection("alpha is vertical");
        c.a = a.x();
        c.b = c.q.x;
        if (c.b > c.a + params.tol.tol_geom) throw EmptyChoiceInterval("limit step " + std::to_string(i));
        const double next = choose(c.b, c.a, params.limit_choice);
        if (!(next > p.x())) throw InvalidLimits("limit sequence is not increasing");
        out.choices.push_back(c);
        out.limits.push_back(IdealPoint::finite(next));
    }
    return out;
}

SemiIdealPolygon build_countable_omega_k(const CountableParams& params) {
    if (params.k < 1) throw InvalidParams("k must be >= 1");
    if (params.limit_count < params.k + 2) throw InvalidParams("limit_count must be >= k + 2");
    if (params.end_specs.empty()) throw InvalidParams("end_specs must not be empty");
    check_lambda(params.lambda, "lambda");
    const CountableLimits lim = countable_limit_vertices(params);

    SemiIdealPolygon poly;
    for (int m = 1; m <= params.k + 1; ++m) {
        BlockSpec s;
        s.m = m;
        s.lo = lim.limits[m - 1];
        s.hi = lim.limits[m];
        std::tie(s.xm1, s.x1) = seeds_for(params.seeds, m, abscissa_or(s.lo, -kInf), s.hi.x());
        s.plus = is_plus_kind(countable_end(params, m + 1));
        s.minus = is_minus_kind(countable_end(params, m));
        s.k = params.k;
        s.lambda = params.lambda;
        s.tol = params.tol;
        const auto block = build_block(s);
        poly.vertices.insert(poly.vertices.end(), block.begin(), block.end());
    }
    const int last = params.k + 2;
    const IdealPoint p_last = lim.limits[last - 1];
    poly.vertices.push_back(ideal_vertex(p_last, VertexTag::Kind::PInf, last, 0));
    poly.vertices.push_back(interior_vertex(limit_q(p_last, params.tol), VertexTag::Kind::QLimit, last, 0));
    return poly;
}

ValidationReport validate_polygon(const SemiIdealPolygon& poly, const ToleranceConfig& tol) {
    ValidationReport r;
    const std::size_t n = poly.size();
    if (n < 4) {
        r.failures.push_back("fewer than 4 vertices");
        return r;
    }

    r.alternation = n % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& u = poly.vertices[i];
        if (u.is_ideal() == poly.at(static_cast<std::ptrdiff_t>(i) + 1).is_ideal()) r.alternation = false;
        if (!u.is_ideal() && !(u.point().y > 0.0 && std::isfinite(u.point().x) && std::isfinite(u.point().y))) {
            r.alternation = false;
            r.failures.push_back("interior vertex " + to_string(u.tag) + " is not in the half-plane");
        }
    }
    if (!r.alternation) {
        r.failures.push_back("vertices do not alternate between ideal and interior");
        return r;
    }

    // Ideal abscissae: start after infinity (or at the minimum) and require increase.
    std::vector<double> xs;
    std::size_t start = 0;
    bool has_inf = false;
    double min_x = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = poly.vertices[i];
        if (!v.is_ideal()) continue;
        if (v.ideal().is_infinity()) {
            if (has_inf) r.failures.push_back("more than one ideal vertex at infinity");
            has_inf = true;
            start = i + 1;
        } else if (!has_inf && v.ideal().x() < min_x) {
            min_x = v.ideal().x();
            start = i;
        }
    }
    r.ordering = true;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& v = poly.at(static_cast<std::ptrdiff_t>(start + j));
        if (v.is_ideal() && !v.ideal().is_infinity()) xs.push_back(v.ideal().x());
    }
    for (std::size_t j = 1; j < xs.size(); ++j) {
        if (!(xs[j] > xs[j - 1] + tol.tol_geom)) r.ordering = false;
    }
    if (!r.ordering) r.failures.push_back("ideal abscissae are not cyclically increasing");

    r.convexity_margin = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        Geodesic g;
        try {
            g = poly.edge_geodesic(i);
        } catch (const Error&) {
            r.convexity_margin = -kInf;
            r.failures.push_back("degenerate edge " + std::to_string(i));
            continue;
        }
        const int inner = poly.inner_sign(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || j == (i + 1) % n) continue;
            const auto& w = poly.vertices[j];
            double clearance;
            if (w.is_ideal()) {
                const int s = side_of(g, w.ideal(), tol) * inner;
                clearance = s > 0 ? kInf : (s == 0 ? 0.0 : -kInf);
            } else {
                const double d = distance_to_geodesic(g, w.point());
                const int s = side_of(g, w.point(), tol);
                clearance = s == 0 ? 0.0 : s * inner * d;
            }
            if (clearance < r.convexity_margin) r.convexity_margin = clearance;
        }
    }
    r.convex = r.convexity_margin > 0.0;
    if (!r.convex) r.failures.push_back("polygon is not strictly convex");
    return r;
}

bool polygon_contains(const SemiIdealPolygon& outer, const SemiIdealPolygon& inner, const ToleranceConfig& tol) {
    for (std::size_t i = 0; i < outer.size(); ++i) {
        const Geodesic g = outer.edge_geodesic(i);
        const int s_in = outer.inner_sign(i);
        for (const auto& w : inner.vertices) {
            const int s = w.is_ideal() ? side_of(g, w.ideal(), tol) : side_of(g, w.point(), tol);
            if (s != 0 && s != s_in) return false;
        }
    }
    return true;
}

std::string polygon_to_json(const SemiIdealPolygon& poly) {
    nlohmann::ordered_json j;
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : poly.vertices) {
        nlohmann::ordered_json jv;
        if (v.is_ideal()) {
            jv["kind"] = "ideal";
            if (v.ideal().is_infinity()) {
                jv["x"] = nullptr;
            } else {
                jv["x"] = v.ideal().x();
            }
        } else {
            jv["kind"] = "interior";
            jv["x"] = v.point().x;
            jv["y"] = v.point().y;
        }
        jv["tag"] = to_string(v.tag);
        j["vertices"].push_back(jv);
    }
    auto labels = nlohmann::ordered_json::array();
    for (EdgeLabel e : poly.edge_labels()) labels.push_back(e == EdgeLabel::A ? "A" : "B");
    j["edge_labels"] = labels;
    return j.dump(2) + "\n";
}

SemiIdealPolygon polygon_from_json(const std::string& text) {
    SemiIdealPolygon poly;
    try {
        const auto j = nlohmann::json::parse(text);
        const auto& vs = j.contains("polygon") ? j.at("polygon").at("vertices") : j.at("vertices");
        for (const auto& jv : vs) {
            const std::string kind = jv.at("kind").get<std::string>();
            const VertexTag tag = parse_tag(jv.at("tag").get<std::string>());
            if (kind == "ideal") {
                const auto& x = jv.at("x");
                poly.vertices.push_back(
                    Vertex{x.is_null() ? IdealPoint::infinity() : IdealPoint::finite(x.get<double>()), tag});
            } else if (kind == "interior") {
                poly.vertices.push_back(Vertex{HPoint{jv.at("x").get<double>(), jv.at("y").get<double>()}, tag});
            } else {
                throw ParseError("unknown vertex kind '" + kind + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(e.what());
    }
    return poly;
}

}  // namespace limitends
