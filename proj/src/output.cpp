#include "limitends/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace limitends {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of negative zero
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) s[i] = digits[h & 15u];
    return s;
}

std::string provenance_line(const Provenance& p, std::string_view comment) {
    std::string s(comment);
    s += ' ';
    s += kToolName;
    s += ' ';
    s += kToolVersion;
    s += ' ';
    s += p.command;
    s += " config=";
    s += p.config_hash;
    return s;
}

namespace {

// Blue -> white -> red over [lo, hi].
void color_of(double v, double lo, double hi, double rgb[3]) {
    const double t = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.5;
    if (t < 0.5) {
        const double s = 2.0 * t;
        rgb[0] = s;
        rgb[1] = s;
        rgb[2] = 1.0;
    } else {
        const double s = 2.0 * (1.0 - t);
        rgb[0] = 1.0;
        rgb[1] = s;
        rgb[2] = s;
    }
}

}  // namespace

void write_obj(std::ostream& os, const TriMesh& mesh, const std::vector<double>& height, const Provenance& prov,
               const ObjOptions& opt) {
    os << provenance_line(prov) << '\n';
    os << "# vertices (x, y, u) in " << (opt.disk ? "Poincare disk" : "half-plane") << " coordinates";
    if (opt.mirrored) os << "; second half is the mirror image u -> -u";
    os << '\n';
    double lo = 0.0, hi = 0.0;
    if (!opt.color.empty()) {
        lo = *std::min_element(opt.color.begin(), opt.color.end());
        hi = *std::max_element(opt.color.begin(), opt.color.end());
    }
    const int copies = opt.mirrored ? 2 : 1;
    for (int c = 0; c < copies; ++c) {
        const double sgn = c == 0 ? 1.0 : -1.0;
        for (std::size_t v = 0; v < mesh.points.size(); ++v) {
            double x = mesh.points[v].x, y = mesh.points[v].y;
            if (opt.disk) {
                const auto d = to_disk(mesh.points[v]);
                x = d.first;
                y = d.second;
            }
            os << "v " << format_double(x) << ' ' << format_double(y) << ' ' << format_double(sgn * height[v]);
            if (!opt.color.empty()) {
                double rgb[3];
                color_of(opt.color[v], lo, hi, rgb);
                os << ' ' << format_double(rgb[0]) << ' ' << format_double(rgb[1]) << ' ' << format_double(rgb[2]);
            }
            os << '\n';
        }
    }
    const std::size_t nv = mesh.points.size();
    for (int c = 0; c < copies; ++c) {
        const std::size_t off = c * nv + 1;
        for (const auto& t : mesh.triangles) {
            if (c == 0) {
                os << "f " << t[0] + off << ' ' << t[1] + off << ' ' << t[2] + off << '\n';
            } else {
                os << "f " << t[0] + off << ' ' << t[2] + off << ' ' << t[1] + off << '\n';
            }
        }
    }
}

void write_csv(std::ostream& os, const CsvTable& table, const Provenance& prov) {
    os << provenance_line(prov) << '\n';
    auto line = [&os](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ',';
            os << cells[i];
        }
        os << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
}

}  // namespace limitends
