#include "limitends/jenkins.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "limitends/errors.hpp"

namespace limitends {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_endpoint(const Geodesic& g, const IdealPoint& p, double tol) {
    const auto [e1, e2] = ideal_endpoints(g);
    return e1.same_as(p, tol) || e2.same_as(p, tol);
}

// Geodesic coordinate of an anchor; ideal endpoints sit at +-infinity.
double anchor_coordinate(const Geodesic& g, const Anchor& a) {
    if (const auto* p = std::get_if<HPoint>(&a)) return geodesic_coordinate(g, *p);
    const auto& ip = std::get<IdealPoint>(a);
    if (g.is_vertical()) return ip.is_infinity() ? kInf : -kInf;
    return ip.x() > g.center ? kInf : -kInf;
}

// Points where a complete geodesic meets a horocycle whose base is not an endpoint.
std::vector<HPoint> geodesic_horocycle_points(const Geodesic& g, const Horocycle& h) {
    std::vector<HPoint> pts;
    if (h.base.is_infinity()) {
        const double y = h.height();
        if (g.is_vertical()) {
            pts.push_back({g.center, y});
        } else if (y < g.radius) {
            const double s = std::sqrt(g.radius * g.radius - y * y);
            pts.push_back({g.center - s, y});
            pts.push_back({g.center + s, y});
        }
        return pts;
    }
    const double a = h.base.x();
    const double r = h.radius();
    if (g.is_vertical()) {
        const double d2 = r * r - (g.center - a) * (g.center - a);
        if (d2 > 0.0) {
            const double s = std::sqrt(d2);
            pts.push_back({g.center, r - s});
            pts.push_back({g.center, r + s});
        }
        return pts;
    }
    // Circle (c, 0; R) against circle (a, r; r).
    const double dx = a - g.center;
    const double dy = r;
    const double d = std::hypot(dx, dy);
    const double R = g.radius;
    if (d > R + r || d < std::abs(R - r)) return pts;
    const double along = (R * R - r * r + d * d) / (2.0 * d);
    const double hh = std::sqrt(std::max(0.0, R * R - along * along));
    const double mx = g.center + along * dx / d;
    const double my = along * dy / d;
    for (const double sgn : {-1.0, 1.0}) {
        const HPoint p{mx + sgn * hh * dy / d, my - sgn * hh * dx / d};
        if (p.y > 0.0) pts.push_back(p);
    }
    return pts;
}

double measure_outside(double lo, double hi, std::vector<std::pair<double, double>> cut) {
    std::sort(cut.begin(), cut.end());
    double total = 0.0;
    double cursor = lo;
    for (auto [a, b] : cut) {
        a = std::max(a, lo);
        b = std::min(b, hi);
        if (b <= a) continue;
        if (a > cursor) total += a - cursor;
        cursor = std::max(cursor, b);
    }
    if (hi > cursor) total += hi - cursor;
    return total;
}

std::vector<Horocycle> truncation_horodisks(const StarCertificate& cert, double n) {
    std::vector<Horocycle> out;
    for (const auto& e : cert.entries) out.push_back(horocycle_at_level(e.horocycle.base, e.horocycle.level - n));
    return out;
}

}  // namespace

const Horocycle& StarCertificate::horocycle_of(std::size_t vertex) const {
    for (const auto& e : entries) {
        if (e.vertex == vertex) return e.horocycle;
    }
    throw InvalidParams("vertex " + std::to_string(vertex) + " is not an ideal vertex");
}

StarCertificate check_star(const SemiIdealPolygon& poly, const ToleranceConfig& tol) {
    StarCertificate cert;
    cert.valid = true;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& v = poly.vertices[i];
        if (!v.is_ideal()) continue;
        const auto& prev = poly.at(static_cast<std::ptrdiff_t>(i) - 1);
        const auto& next = poly.at(static_cast<std::ptrdiff_t>(i) + 1);
        if (prev.is_ideal() || next.is_ideal()) {
            throw InvalidParams("ideal vertex " + to_string(v.tag) + " has an ideal neighbour");
        }
        const double l0 = busemann(v.ideal(), prev.point());
        const double l1 = busemann(v.ideal(), next.point());
        StarEntry e;
        e.vertex = i;
        e.horocycle = horocycle_at_level(v.ideal(), 0.5 * (l0 + l1));
        e.residual = std::abs(l0 - l1);
        cert.max_residual = std::max(cert.max_residual, e.residual);
        if (!(e.residual < tol.tol_star)) cert.valid = false;
        cert.entries.push_back(e);
    }
    return cert;
}

CarVerdict check_car(const SemiIdealPolygon& poly, const StarCertificate& cert, const ToleranceConfig& tol) {
    if (!cert.valid) {
        throw StarViolated("max residual " + std::to_string(cert.max_residual));
    }
    CarVerdict v;
    v.vacuous = true;
    const std::size_t n = poly.size();
    for (const auto& e : cert.entries) {
        const IdealPoint& p = poly.vertices[e.vertex].ideal();
        for (std::size_t j = 0; j < n; ++j) {
            const auto& w = poly.vertices[j];
            if (w.is_ideal()) continue;
            if (j == (e.vertex + 1) % n || (j + 1) % n == e.vertex) continue;
            v.vacuous = false;
            const double m = busemann(p, w.point()) - e.horocycle.level;
            if (m < v.margin) {
                v.margin = m;
                v.witness = std::make_pair(e.vertex, j);
            }
        }
    }
    v.is_js = v.margin > tol.tol_geom;
    return v;
}

std::vector<std::vector<std::size_t>> enumerate_inscribed(const SemiIdealPolygon& poly, std::size_t max_vertices) {
    const std::size_t n = poly.size();
    if (n > max_vertices) {
        throw TooLarge(std::to_string(n) + " vertices exceed the inscribed-polygon guard of " +
                       std::to_string(max_vertices));
    }
    std::vector<std::vector<std::size_t>> out;
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    for (std::size_t size = 3; size < n; ++size) {
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            if (static_cast<std::size_t>(__builtin_popcountll(mask)) != size) continue;
            std::vector<std::size_t> s;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask >> i & 1U) s.push_back(i);
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

double length_outside(const Anchor& a, const Anchor& b, const std::vector<Horocycle>& horodisks,
                      const ToleranceConfig& tol) {
    const Geodesic g = geodesic_through(a, b, tol);
    double lo = anchor_coordinate(g, a);
    double hi = anchor_coordinate(g, b);
    if (lo > hi) std::swap(lo, hi);
    std::vector<std::pair<double, double>> cut;
    for (const auto& h : horodisks) {
        if (is_endpoint(g, h.base, tol.tol_geom)) {
            const double s = level_coordinate(g, h.base, h.level);
            const bool at_top = anchor_coordinate(g, h.base) > 0.0;
            cut.emplace_back(at_top ? s : -kInf, at_top ? kInf : s);
            continue;
        }
        const auto pts = geodesic_horocycle_points(g, h);
        if (pts.size() < 2) continue;
        double s0 = geodesic_coordinate(g, pts[0]);
        double s1 = geodesic_coordinate(g, pts[1]);
        if (s0 > s1) std::swap(s0, s1);
        cut.emplace_back(s0, s1);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        // An ideal end must be covered by its own horodisk.
        bool covered_lo = std::isfinite(lo);
        bool covered_hi = std::isfinite(hi);
        for (const auto& [c0, c1] : cut) {
            if (c0 == -kInf) covered_lo = true;
            if (c1 == kInf) covered_hi = true;
        }
        if (!covered_lo || !covered_hi) return kInf;
    }
    return measure_outside(lo, hi, std::move(cut));
}

TruncatedVerdict check_js_truncated(const SemiIdealPolygon& poly, const std::vector<double>& n_levels,
                                    const ToleranceConfig& tol) {
    const StarCertificate cert = check_star(poly, tol);
    if (!cert.valid) throw StarViolated("max residual " + std::to_string(cert.max_residual));
    if (n_levels.empty()) throw InvalidParams("need at least one truncation level");
    const auto subsets = enumerate_inscribed(poly);
    const std::size_t n = poly.size();
    const auto labels = poly.edge_labels();

    TruncatedVerdict out;
    for (double level : n_levels) {
        const auto disks = truncation_horodisks(cert, level);
        TruncatedLevel tl;
        tl.n = level;
        std::vector<double> edge_len(n);
        for (std::size_t i = 0; i < n; ++i) {
            edge_len[i] = length_outside(poly.vertices[i].anchor(), poly.at(static_cast<std::ptrdiff_t>(i) + 1).anchor(),
                                         disks, tol);
            (labels[i] == EdgeLabel::A ? tl.alpha_omega : tl.beta_omega) += edge_len[i];
        }
        out.max_alpha_beta_gap = std::max(out.max_alpha_beta_gap, std::abs(tl.alpha_omega - tl.beta_omega));
        for (std::size_t s = 0; s < subsets.size(); ++s) {
            const auto& sub = subsets[s];
            InscribedReport r;
            r.subset = sub;
            for (std::size_t t = 0; t < sub.size(); ++t) {
                const std::size_t i = sub[t];
                const std::size_t j = sub[(t + 1) % sub.size()];
                double len;
                if (j == (i + 1) % n) {
                    len = edge_len[i];
                    (labels[i] == EdgeLabel::A ? r.alpha : r.beta) += len;
                } else {
                    len = length_outside(poly.vertices[i].anchor(), poly.vertices[j].anchor(), disks, tol);
                }
                r.gamma += len;
            }
            if (r.slack() < tl.min_slack) {
                tl.min_slack = r.slack();
                tl.worst = s;
            }
            tl.reports.push_back(std::move(r));
        }
        out.levels.push_back(std::move(tl));
    }

    out.is_js = true;
    const std::size_t L = out.levels.size();
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        bool ok = true;
        for (const auto& tl : out.levels) {
            if (!(tl.reports[s].slack() > tol.tol_geom)) ok = false;
        }
        if (L >= 2) {
            const auto& r1 = out.levels[L - 1].reports[s];
            const auto& r0 = out.levels[L - 2].reports[s];
            const double eps = 1e-9 * (1.0 + std::abs(r1.gamma));
            if (r1.slack_alpha() < r0.slack_alpha() - eps || r1.slack_beta() < r0.slack_beta() - eps) ok = false;
        }
        if (!ok && out.is_js) {
            out.is_js = false;
            out.witness = subsets[s];
        }
        if (L >= 3) {
            const double n0 = out.levels.front().n;
            const double n1 = out.levels.back().n;
            for (std::size_t l = 1; l + 1 < L; ++l) {
                const double t = (out.levels[l].n - n0) / (n1 - n0);
                const auto& a = out.levels.front().reports[s];
                const auto& b = out.levels.back().reports[s];
                const auto& m = out.levels[l].reports[s];
                const double ra = std::abs(m.slack_alpha() - ((1 - t) * a.slack_alpha() + t * b.slack_alpha()));
                const double rb = std::abs(m.slack_beta() - ((1 - t) * a.slack_beta() + t * b.slack_beta()));
                out.affinity_residual = std::max({out.affinity_residual, ra, rb});
            }
        }
    }
    return out;
}

std::string jenkins_report_json(const SemiIdealPolygon& poly, const StarCertificate& star, const CarVerdict& car,
                                const std::optional<TruncatedVerdict>& truncated) {
    using json = nlohmann::ordered_json;
    json j;
    json js;
    js["valid"] = star.valid;
    js["max_residual"] = star.max_residual;
    js["entries"] = json::array();
    for (const auto& e : star.entries) {
        js["entries"].push_back({{"vertex", to_string(poly.vertices[e.vertex].tag)},
                                 {"level", e.horocycle.level},
                                 {"residual", e.residual}});
    }
    j["star"] = js;
    json jc;
    jc["is_js"] = car.is_js;
    jc["vacuous"] = car.vacuous;
    if (std::isfinite(car.margin)) {
        jc["margin"] = car.margin;
    } else {
        jc["margin"] = nullptr;
    }
    if (car.witness) {
        jc["witness"] = {to_string(poly.vertices[car.witness->first].tag),
                         to_string(poly.vertices[car.witness->second].tag)};
    } else {
        jc["witness"] = nullptr;
    }
    j["car"] = jc;
    if (truncated) {
        json jt = json::array();
        for (const auto& tl : truncated->levels) {
            json row;
            row["n"] = tl.n;
            row["alpha_omega"] = tl.alpha_omega;
            row["beta_omega"] = tl.beta_omega;
            row["inscribed"] = tl.reports.size();
            if (tl.reports.empty()) {
                row["min_slack"] = nullptr;
                row["worst"] = nullptr;
            } else {
                row["min_slack"] = tl.min_slack;
                json w = json::array();
                for (auto idx : tl.reports[tl.worst].subset) w.push_back(to_string(poly.vertices[idx].tag));
                row["worst"] = w;
            }
            jt.push_back(row);
        }
        j["truncated"] = jt;
        j["truncated_is_js"] = truncated->is_js;
        j["affinity_residual"] = truncated->affinity_residual;
        j["alpha_beta_gap"] = truncated->max_alpha_beta_gap;
    } else {
        j["truncated"] = nullptr;
    }
    return j.dump(2) + "\n";
}

SemiIdealPolygon sample_star_polygon(std::mt19937_64& rng, const SampleOptions& opt, const ToleranceConfig& tol) {
    if (opt.k < 2) throw InvalidParams("need at least two ideal vertices");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, opt.level_sigma);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const bool with_inf = unit(rng) < opt.infinity_probability;
        std::vector<IdealPoint> ideals;
        if (with_inf) ideals.push_back(IdealPoint::infinity());
        std::vector<double> xs;
        for (int i = with_inf ? 1 : 0; i < opt.k; ++i) xs.push_back(opt.spread * (2.0 * unit(rng) - 1.0));
        std::sort(xs.begin(), xs.end());
        bool spaced = true;
        for (std::size_t i = 1; i < xs.size(); ++i) spaced = spaced && xs[i] - xs[i - 1] > 0.05;
        if (!spaced) continue;
        for (double x : xs) ideals.push_back(IdealPoint::finite(x));

        std::vector<Horocycle> horo;
        for (const auto& p : ideals) horo.push_back(horocycle_at_level(p, gauss(rng)));
        if (opt.boost > 0.0) {
            auto& h = horo[static_cast<std::size_t>(unit(rng) * opt.k) % horo.size()];
            h = horocycle_at_level(h.base, h.level + opt.boost);
        }

        SemiIdealPolygon poly;
        bool ok = true;
        for (std::size_t i = 0; i < ideals.size() && ok; ++i) {
            const auto& h0 = horo[i];
            const auto& h1 = horo[(i + 1) % horo.size()];
            const auto pts = horocycle_intersection(h0, h1, tol);
            if (pts.size() != 2) {
                ok = false;
                break;
            }
            const HPoint w = pts[unit(rng) < 0.5 ? 0 : 1];
            poly.vertices.push_back(Vertex{ideals[i], VertexTag{VertexTag::Kind::P, 1, static_cast<int>(2 * i + 1)}});
            poly.vertices.push_back(Vertex{w, VertexTag{VertexTag::Kind::P, 1, static_cast<int>(2 * i + 2)}});
        }
        if (!ok) continue;
        if (!validate_polygon(poly, tol).ok()) continue;
        if (!check_star(poly, tol).valid) continue;
        return poly;
    }
    throw InvalidParams("could not sample a convex polygon");
}

}  // namespace limitends
