#include "limitends/mesher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "limitends/errors.hpp"
#include "limitends/predicates.hpp"

namespace limitends {

namespace {

struct Tri {
    std::array<int, 3> v{};
    std::array<int, 3> n{-1, -1, -1};  // n[i] is across the edge opposite v[i]
    bool alive = true;
    bool inside = false;
    std::uint32_t mark = 0;
};

struct Seg {
    int a = 0;
    int b = 0;
    int curve = 0;
    double ta = 0.0;
    double tb = 0.0;
    bool alive = true;
};

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint32_t>(std::min(a, b));
    const auto hi = static_cast<std::uint32_t>(std::max(a, b));
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

double dist2(const HPoint& a, const HPoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

HPoint circumcenter(const HPoint& a, const HPoint& b, const HPoint& c) {
    const double bx = b.x - a.x, by = b.y - a.y;
    const double cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

double angle_at(const HPoint& p, const HPoint& q, const HPoint& r) {
    const double ux = q.x - p.x, uy = q.y - p.y;
    const double vx = r.x - p.x, vy = r.y - p.y;
    return std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
}

class Builder {
public:
    explicit Builder(const MeshInput& in) : in_(in) {}

    MeshOutput run() {
        setup();
        recover_segments();
        flood_fill();
        refine();
        return output();
    }

private:
    const MeshInput& in_;
    std::vector<HPoint> pts_;
    std::vector<MeshVertexInfo> info_;
    std::vector<double> shell_;  // > 0 at protected corners: base shell radius
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::vector<int> vt_;
    std::vector<Seg> segs_;
    std::unordered_map<std::uint64_t, int> seg_of_;
    std::deque<int> seg_queue_;
    std::deque<int> tri_queue_;
    std::uint32_t epoch_ = 0;
    bool flags_ready_ = false;
    bool flags_dirty_ = false;
    int super_first_ = 0;
    int walk_seed_ = 0;

    // --- triangulation primitives -------------------------------------------------

    int add_point(const HPoint& p, const MeshVertexInfo& info) {
        pts_.push_back(p);
        info_.push_back(info);
        shell_.push_back(0.0);
        vt_.push_back(-1);
        return static_cast<int>(pts_.size()) - 1;
    }

    int new_tri(int a, int b, int c) {
        int id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
            tris_[id] = Tri{};
        } else {
            id = static_cast<int>(tris_.size());
            tris_.emplace_back();
        }
        tris_[id].v = {a, b, c};
        vt_[a] = vt_[b] = vt_[c] = id;
        return id;
    }

    bool is_super(int v) const { return v >= super_first_ && v < super_first_ + 3; }

    int locate(const HPoint& p, int start) {
        int t = start;
        if (t < 0 || !tris_[t].alive) {
            t = 0;
            while (!tris_[t].alive) ++t;
        }
        for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
            const Tri& tr = tris_[t];
            bool moved = false;
            const int off = (walk_seed_++) % 3;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + off) % 3;
                const int a = tr.v[(i + 1) % 3];
                const int b = tr.v[(i + 2) % 3];
                if (orient2d(pts_[a], pts_[b], p) < 0.0) {
                    if (tr.n[i] < 0) return -1;
                    t = tr.n[i];
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
        }
        for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
            const Tri& tr = tris_[i];
            if (!tr.alive) continue;
            if (orient2d(pts_[tr.v[0]], pts_[tr.v[1]], p) >= 0 && orient2d(pts_[tr.v[1]], pts_[tr.v[2]], p) >= 0 &&
                orient2d(pts_[tr.v[2]], pts_[tr.v[0]], p) >= 0) {
                return i;
            }
        }
        return -1;
    }

    bool in_circumcircle(int t, const HPoint& p) const {
        const Tri& tr = tris_[t];
        return incircle(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]], p) > 0.0;
    }

    std::vector<int> cavity(const HPoint& p, int t0) {
        ++epoch_;
        std::vector<int> cav{t0};
        tris_[t0].mark = epoch_;
        for (std::size_t i = 0; i < cav.size(); ++i) {
            for (int nb : tris_[cav[i]].n) {
                if (nb < 0 || tris_[nb].mark == epoch_) continue;
                if (in_circumcircle(nb, p)) {
                    tris_[nb].mark = epoch_;
                    cav.push_back(nb);
                }
            }
        }
        return cav;
    }

    bool near_vertex(const HPoint& p, int t) const {
        for (int v : tris_[t].v) {
            const double scale = std::max({1.0, std::abs(p.x), std::abs(p.y)});
            if (dist2(p, pts_[v]) <= 1e-26 * scale * scale) return true;
        }
        return false;
    }

    // Replaces the cavity (marked with the current epoch) by a fan around the new vertex.
    void fill_cavity(int pv, const std::vector<int>& cav, std::vector<int>* created) {
        struct Boundary {
            int a, b, outside;
        };
        std::vector<Boundary> rim;
        for (int t : cav) {
            const Tri& tr = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[i];
                if (nb >= 0 && tris_[nb].mark == epoch_ && tris_[nb].alive) continue;
                rim.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], nb});
            }
        }
        for (int t : cav) {
            tris_[t].alive = false;
            free_.push_back(t);
        }
        std::unordered_map<int, int> by_start;
        std::unordered_map<int, int> by_end;
        std::vector<int> made;
        made.reserve(rim.size());
        for (const auto& r : rim) {
            const int t = new_tri(pv, r.a, r.b);
            Tri& tr = tris_[t];
            tr.n[0] = r.outside;
            if (r.outside >= 0) {
                Tri& o = tris_[r.outside];
                for (int i = 0; i < 3; ++i) {
                    const int oa = o.v[(i + 1) % 3];
                    const int ob = o.v[(i + 2) % 3];
                    if (oa == r.b && ob == r.a) o.n[i] = t;
                }
            }
            if (flags_ready_) {
                const auto it = seg_of_.find(edge_key(r.a, r.b));
                if (it != seg_of_.end()) {
                    tr.inside = segs_[it->second].a == r.a;
                } else {
                    tr.inside = r.outside >= 0 && tris_[r.outside].inside;
                }
            }
            by_start[r.a] = t;
            by_end[r.b] = t;
            made.push_back(t);
        }
        for (int t : made) {
            Tri& tr = tris_[t];
            tr.n[1] = by_start.at(tr.v[2]);
            tr.n[2] = by_end.at(tr.v[1]);
        }
        if (created) created->insert(created->end(), made.begin(), made.end());
    }

    int insert_point(const HPoint& p, int hint, const MeshVertexInfo& info, std::vector<int>* created) {
        const int t0 = locate(p, hint);
        if (t0 < 0 || near_vertex(p, t0)) return -1;
        const auto cav = cavity(p, t0);
        const int pv = add_point(p, info);
        fill_cavity(pv, cav, created);
        return pv;
    }

    // Triangle holding the directed edge a -> b (counter-clockwise), or -1.
    int tri_with_edge(int a, int b) const {
        const int start = vt_[a];
        if (start < 0) return -1;
        int t = start;
        for (std::size_t guard = 0; guard < 4096; ++guard) {
            const Tri& tr = tris_[t];
            int i = 0;
            while (tr.v[i] != a) ++i;
            if (tr.v[(i + 1) % 3] == b) return t;
            // Rotate around a across the edge (a, v[i+2]).
            const int nb = tr.n[(i + 1) % 3];
            if (nb < 0 || nb == start) return -1;
            t = nb;
        }
        return -1;
    }

    int apex(int t, int a, int b) const {
        for (int v : tris_[t].v) {
            if (v != a && v != b) return v;
        }
        return -1;
    }

    // --- segments -------------------------------------------------------------------

    bool inside_diametral(const Seg& s, const HPoint& p) const {
        const HPoint& a = pts_[s.a];
        const HPoint& b = pts_[s.b];
        return (a.x - p.x) * (b.x - p.x) + (a.y - p.y) * (b.y - p.y) < 0.0;
    }

    bool missing(const Seg& s) const { return tri_with_edge(s.a, s.b) < 0 || tri_with_edge(s.b, s.a) < 0; }

    bool encroached(const Seg& s) const {
        for (const auto& [u, w] : {std::pair{s.a, s.b}, std::pair{s.b, s.a}}) {
            const int t = tri_with_edge(u, w);
            if (t < 0) return true;
            const int x = apex(t, u, w);
            if (!is_super(x) && inside_diametral(s, pts_[x])) return true;
        }
        return false;
    }

    double min_split_length(const Seg& s) const {
        const HPoint mid{0.5 * (pts_[s.a].x + pts_[s.b].x), 0.5 * (pts_[s.a].y + pts_[s.b].y)};
        return 1e-4 * in_.size(mid);
    }

    int add_segment(int a, int b, int curve, double ta, double tb) {
        segs_.push_back({a, b, curve, ta, tb, true});
        const int id = static_cast<int>(segs_.size()) - 1;
        seg_of_[edge_key(a, b)] = id;
        return id;
    }

    double split_parameter(const Seg& s) const {
        const MeshCurve& c = in_.curves[s.curve];
        int corner = -1;
        double tc = 0.0;
        double to = 0.0;
        if (shell_[s.a] > 0.0) {
            corner = s.a;
            tc = s.ta;
            to = s.tb;
        } else if (shell_[s.b] > 0.0) {
            corner = s.b;
            tc = s.tb;
            to = s.ta;
        }
        if (corner < 0) return 0.5 * (s.ta + s.tb);
        // Concentric shells: split at the power-of-two radius nearest to half the chord.
        const HPoint& cp = pts_[corner];
        const double len = std::sqrt(dist2(cp, pts_[corner == s.a ? s.b : s.a]));
        const double r0 = shell_[corner];
        const double d = r0 * std::exp2(std::round(std::log2(0.5 * len / r0)));
        double lo = tc;
        double hi = to;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (std::sqrt(dist2(c.eval(mid), cp)) < d) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    void split_segment(int si) {
        Seg s = segs_[si];
        const double tm = split_parameter(s);
        const HPoint pm = in_.curves[s.curve].eval(tm);
        std::vector<int> created;
        int hint = vt_[s.a];
        const int pv = insert_point(pm, hint, {s.curve, tm, false}, &created);
        if (pv < 0) return;
        segs_[si].alive = false;
        seg_of_.erase(edge_key(s.a, s.b));
        // The fill above ran with the old segment still registered; refresh flags of
        // triangles that bordered it.
        const int s1 = add_segment(s.a, pv, s.curve, s.ta, tm);
        const int s2 = add_segment(pv, s.b, s.curve, tm, s.tb);
        if (flags_ready_) {
            for (int t : created) fix_flag_after_split(t, s);
        }
        for (int id : {s1, s2}) {
            if (missing(segs_[id])) flags_dirty_ = true;
            seg_queue_.push_back(id);
        }
        if (flags_ready_) {
            for (int t : created) tri_queue_.push_back(t);
        }
    }

    // A new triangle whose rim edge was the segment being split takes its flag from the
    // far side of that chord instead.
    void fix_flag_after_split(int t, const Seg& old) {
        Tri& tr = tris_[t];
        const int a = tr.v[1];
        const int b = tr.v[2];
        if (edge_key(a, b) != edge_key(old.a, old.b)) return;
        tr.inside = tr.n[0] >= 0 && tris_[tr.n[0]].inside;
    }

    void process_segment_queue() {
        while (!seg_queue_.empty()) {
            const int si = seg_queue_.front();
            seg_queue_.pop_front();
            const Seg& s = segs_[si];
            if (!s.alive) continue;
            if (!missing(s) && !encroached(s)) continue;
            if (std::sqrt(dist2(pts_[s.a], pts_[s.b])) < min_split_length(s)) {
                if (missing(s)) throw MeshFailure("cannot recover a boundary segment");
                continue;
            }
            if (pts_.size() >= in_.max_vertices) throw MeshFailure("vertex budget exhausted");
            split_segment(si);
        }
        if (flags_dirty_ && flags_ready_) {
            flood_fill();
            for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
                if (tris_[t].alive && tris_[t].inside) tri_queue_.push_back(t);
            }
        }
    }

    // --- phases ---------------------------------------------------------------------

    void setup() {
        const std::size_t nc = in_.curves.size();
        if (nc < 2 || in_.corners.size() != nc) throw MeshFailure("need matching corners and curves");

        // Adaptive initial subdivision of every curve.
        std::vector<std::vector<double>> params(nc);
        for (std::size_t i = 0; i < nc; ++i) {
            const MeshCurve& c = in_.curves[i];
            const HPoint p0 = in_.corners[i];
            const HPoint p1 = in_.corners[(i + 1) % nc];
            std::vector<std::pair<double, HPoint>> stack{{c.t1, p1}};
            std::vector<double> ts{c.t0};
            double ta = c.t0;
            HPoint pa = p0;
            int depth_guard = 0;
            while (!stack.empty()) {
                const auto [tb, pb] = stack.back();
                const HPoint mid{0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)};
                if (std::sqrt(dist2(pa, pb)) > in_.boundary_factor * in_.size(mid) && ++depth_guard < 200000) {
                    const double tm = 0.5 * (ta + tb);
                    stack.push_back({tm, c.eval(tm)});
                    continue;
                }
                stack.pop_back();
                ts.push_back(tb);
                ta = tb;
                pa = pb;
            }
            params[i] = std::move(ts);
        }

        // Interior angles at the corners (counter-clockwise loop, domain on the left).
        std::vector<double> angle(nc);
        for (std::size_t i = 0; i < nc; ++i) {
            const MeshCurve& out = in_.curves[i];
            const MeshCurve& in = in_.curves[(i + nc - 1) % nc];
            const HPoint c = in_.corners[i];
            const HPoint po = out.eval(out.t0 + 1e-6 * (out.t1 - out.t0));
            const HPoint pi = in.eval(in.t1 - 1e-6 * (in.t1 - in.t0));
            const double ux = po.x - c.x, uy = po.y - c.y;
            const double vx = pi.x - c.x, vy = pi.y - c.y;
            double a = std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
            if (a < 0) a += 2.0 * std::numbers::pi;
            angle[i] = a * 180.0 / std::numbers::pi;
        }

        // Protect small corners: equal-radius points on both incident curves.
        std::vector<double> shell(nc, 0.0);
        for (std::size_t i = 0; i < nc; ++i) {
            if (angle[i] >= in_.small_angle_deg) continue;
            const std::size_t ip = (i + nc - 1) % nc;
            const HPoint c = in_.corners[i];
            const auto& po = params[i];
            const auto& pi = params[ip];
            const double first_out = std::sqrt(dist2(c, in_.curves[i].eval(po[1])));
            const double last_in = std::sqrt(dist2(c, in_.curves[ip].eval(pi[pi.size() - 2])));
            shell[i] = 0.5 * std::min(first_out, last_in);
        }
        auto solve_radius = [](const MeshCurve& cv, const HPoint& c, double ta, double tb, double r) {
            double lo = ta, hi = tb;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (std::sqrt(dist2(cv.eval(mid), c)) < r) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        };
        for (std::size_t i = 0; i < nc; ++i) {
            if (shell[i] <= 0.0) continue;
            const std::size_t ip = (i + nc - 1) % nc;
            auto& po = params[i];
            po.insert(po.begin() + 1, solve_radius(in_.curves[i], in_.corners[i], po[0], po[1], shell[i]));
            auto& pi = params[ip];
            const std::size_t last = pi.size() - 1;
            pi.insert(pi.begin() + static_cast<std::ptrdiff_t>(last),
                      solve_radius(in_.curves[ip], in_.corners[i], pi[last], pi[last - 1], shell[i]));
        }

        // Bounding triangle.
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        std::vector<std::vector<HPoint>> loc(nc);
        for (std::size_t i = 0; i < nc; ++i) {
            for (std::size_t j = 0; j + 1 < params[i].size(); ++j) {
                const HPoint p = j == 0 ? in_.corners[i] : in_.curves[i].eval(params[i][j]);
                loc[i].push_back(p);
                xmin = std::min(xmin, p.x);
                xmax = std::max(xmax, p.x);
                ymin = std::min(ymin, p.y);
                ymax = std::max(ymax, p.y);
            }
        }
        const double cx = 0.5 * (xmin + xmax);
        const double cy = 0.5 * (ymin + ymax);
        const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
        super_first_ = static_cast<int>(pts_.size());
        add_point({cx - 20 * span, cy - 10 * span}, {});
        add_point({cx + 20 * span, cy - 10 * span}, {});
        add_point({cx, cy + 20 * span}, {});
        new_tri(super_first_, super_first_ + 1, super_first_ + 2);

        // Insert boundary vertices and register segments.
        std::vector<std::vector<int>> ids(nc);
        int hint = 0;
        for (std::size_t i = 0; i < nc; ++i) {
            for (std::size_t j = 0; j < loc[i].size(); ++j) {
                MeshVertexInfo info{static_cast<int>(i), params[i][j], j == 0};
                const int v = insert_point(loc[i][j], hint, info, nullptr);
                if (v < 0) throw MeshFailure("duplicate boundary vertex");
                if (j == 0) shell_[v] = shell[i];
                ids[i].push_back(v);
                hint = vt_[v];
            }
        }
        for (std::size_t i = 0; i < nc; ++i) {
            const auto& vi = ids[i];
            const int next_corner = ids[(i + 1) % nc][0];
            for (std::size_t j = 0; j < vi.size(); ++j) {
                const int b = j + 1 < vi.size() ? vi[j + 1] : next_corner;
                add_segment(vi[j], b, static_cast<int>(i), params[i][j], params[i][j + 1]);
            }
        }
    }

    void recover_segments() {
        for (int i = 0; i < static_cast<int>(segs_.size()); ++i) seg_queue_.push_back(i);
        process_segment_queue();
        for (const auto& s : segs_) {
            if (s.alive && missing(s)) throw MeshFailure("boundary segment missing after recovery");
        }
    }

    void flood_fill() {
        for (auto& t : tris_) t.inside = true;
        std::vector<int> stack;
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            if (!tris_[t].alive) continue;
            for (int v : tris_[t].v) {
                if (is_super(v)) {
                    stack.push_back(t);
                    tris_[t].inside = false;
                    break;
                }
            }
        }
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const Tri& tr = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[i];
                if (nb < 0 || !tris_[nb].inside) continue;
                if (seg_of_.count(edge_key(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3]))) continue;
                tris_[nb].inside = false;
                stack.push_back(nb);
            }
        }
        flags_ready_ = true;
        flags_dirty_ = false;
    }

    bool exempt(int t) const {
        for (int v : tris_[t].v) {
            if (shell_[v] > 0.0) return true;
        }
        return false;
    }

    bool bad(int t) const {
        const Tri& tr = tris_[t];
        const HPoint& a = pts_[tr.v[0]];
        const HPoint& b = pts_[tr.v[1]];
        const HPoint& c = pts_[tr.v[2]];
        const double la = dist2(b, c), lb = dist2(c, a), lc = dist2(a, b);
        const double longest = std::sqrt(std::max({la, lb, lc}));
        const double shortest = std::sqrt(std::min({la, lb, lc}));
        const HPoint g{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
        if (longest > in_.size(g)) return true;
        const HPoint cc = circumcenter(a, b, c);
        const double r = std::sqrt(dist2(cc, a));
        return r > in_.quality * shortest;
    }

    void refine() {
        for (int t = 0; t < static_cast<int>(tris_.size()); ++t) {
            if (tris_[t].alive && tris_[t].inside) tri_queue_.push_back(t);
        }
        while (!tri_queue_.empty()) {
            const int t = tri_queue_.front();
            tri_queue_.pop_front();
            if (!tris_[t].alive || !tris_[t].inside || exempt(t) || !bad(t)) continue;
            if (pts_.size() >= in_.max_vertices) throw MeshFailure("vertex budget exhausted");
            const Tri tr = tris_[t];
            const HPoint cc = circumcenter(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]]);
            if (!std::isfinite(cc.x) || !std::isfinite(cc.y)) continue;
            const int loc = locate(cc, t);
            if (loc < 0 || near_vertex(cc, loc)) continue;
            const auto cav = cavity(cc, loc);
            std::vector<int> hit;
            for (int c : cav) {
                const Tri& ct = tris_[c];
                for (int i = 0; i < 3; ++i) {
                    const auto it = seg_of_.find(edge_key(ct.v[(i + 1) % 3], ct.v[(i + 2) % 3]));
                    if (it == seg_of_.end()) continue;
                    if (inside_diametral(segs_[it->second], cc) &&
                        std::find(hit.begin(), hit.end(), it->second) == hit.end()) {
                        hit.push_back(it->second);
                    }
                }
            }
            if (!hit.empty()) {
                bool split_any = false;
                for (int si : hit) {
                    const Seg& s = segs_[si];
                    if (std::sqrt(dist2(pts_[s.a], pts_[s.b])) < min_split_length(s)) continue;
                    if (!s.alive) continue;
                    if (pts_.size() >= in_.max_vertices) throw MeshFailure("vertex budget exhausted");
                    split_segment(si);
                    split_any = true;
                }
                if (split_any) {
                    process_segment_queue();
                    if (tris_[t].alive) tri_queue_.push_back(t);
                }
                continue;
            }
            if (!tris_[loc].inside) continue;
            const int pv = add_point(cc, {});
            std::vector<int> created;
            fill_cavity(pv, cav, &created);
            for (int c : created) tri_queue_.push_back(c);
        }
    }

    MeshOutput output() const {
        MeshOutput out;
        std::vector<int> remap(pts_.size(), -1);
        for (const auto& tr : tris_) {
            if (!tr.alive || !tr.inside) continue;
            std::array<int, 3> tri{};
            for (int k = 0; k < 3; ++k) {
                const int v = tr.v[k];
                if (is_super(v)) throw MeshFailure("domain triangle touches the bounding triangle");
                if (remap[v] < 0) {
                    remap[v] = static_cast<int>(out.points.size());
                    out.points.push_back(pts_[v]);
                    out.info.push_back(info_[v]);
                }
                tri[k] = remap[v];
            }
            out.triangles.push_back(tri);
        }
        for (const auto& s : segs_) {
            if (!s.alive) continue;
            if (remap[s.a] < 0 || remap[s.b] < 0) throw MeshFailure("boundary segment not in the mesh");
            out.segments.push_back({remap[s.a], remap[s.b], s.curve, s.ta, s.tb});
        }
        double min_angle = std::numbers::pi;
        for (std::size_t t = 0, k = 0; t < tris_.size(); ++t) {
            const Tri& tr = tris_[t];
            if (!tr.alive || !tr.inside) continue;
            ++k;
            if (exempt(static_cast<int>(t))) {
                ++out.corner_triangles;
                continue;
            }
            const HPoint& a = pts_[tr.v[0]];
            const HPoint& b = pts_[tr.v[1]];
            const HPoint& c = pts_[tr.v[2]];
            min_angle = std::min({min_angle, angle_at(a, b, c), angle_at(b, c, a), angle_at(c, a, b)});
        }
        out.min_angle_deg = min_angle * 180.0 / std::numbers::pi;
        return out;
    }
};

}  // namespace

MeshOutput mesh_domain(const MeshInput& input) { return Builder(input).run(); }

}  // namespace limitends
