#pragma once

// Semi-ideal polygonal domains with prescribed limit ideal vertices.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "limitends/hyp_geom.hpp"

namespace limitends {

enum class EndKind { Left, Right, TwoSided };

EndKind parse_end_kind(const std::string& s);
std::string to_string(EndKind e);

/// Name of a vertex in the construction.
///   PInf: p_inf^m          P: p^m_index          Q: q^m_index (index = +-2k)
///   QLimit: q^m, the {y = 1} vertex closing a countable truncation
struct VertexTag {
    enum class Kind { PInf, P, Q, QLimit };
    Kind kind = Kind::P;
    int m = 1;
    int index = 0;

    friend bool operator==(const VertexTag&, const VertexTag&) = default;
};

std::string to_string(const VertexTag& t);
VertexTag parse_tag(const std::string& s);

struct Vertex {
    std::variant<IdealPoint, HPoint> pos;
    VertexTag tag;

    bool is_ideal() const { return std::holds_alternative<IdealPoint>(pos); }
    const IdealPoint& ideal() const { return std::get<IdealPoint>(pos); }
    const HPoint& point() const { return std::get<HPoint>(pos); }
    Anchor anchor() const;
};

enum class EdgeLabel { A, B };

/// Vertices in counter-clockwise order (domain on the left). Edge i joins vertex i to
/// vertex i+1 (cyclically); it is an A edge when vertex i is ideal, B otherwise.
struct SemiIdealPolygon {
    std::vector<Vertex> vertices;

    std::size_t size() const { return vertices.size(); }
    const Vertex& at(std::ptrdiff_t i) const;  // cyclic
    std::vector<EdgeLabel> edge_labels() const;
    Geodesic edge_geodesic(std::size_t i) const;
    /// Sign of side_of(edge_geodesic(i), .) on the domain side.
    int inner_sign(std::size_t i) const;
};

struct FiniteParams {
    int m0 = 1;
    std::vector<EndKind> end_specs{EndKind::TwoSided};
    std::vector<double> limit_abscissae;  // x_inf^2 < ... < x_inf^m0
    /// Optional (x_{-1}^m, x_1^m) per block; missing entries use the default seeds.
    std::vector<std::optional<std::pair<double, double>>> seeds;
    int k = 1;
    double lambda = 0.5;
    /// Read E^{m0+1} as E^1 when deciding whether m0 is in M+.
    bool wrap_ends = true;
    ToleranceConfig tol;
};

struct CountableParams {
    double x2 = -0.5;
    double x3 = 0.5;
    int limit_count = 4;
    double limit_choice = 0.5;
    /// Applied cyclically: E^m = end_specs[(m - 1) % size].
    std::vector<EndKind> end_specs{EndKind::TwoSided};
    std::vector<std::optional<std::pair<double, double>>> seeds;
    int k = 1;
    double lambda = 0.5;
    ToleranceConfig tol;
};

/// Data of one inductive step of the limit vertex sequence.
struct ExtensionChoice {
    int index = 3;  // i: data attached to p_inf^i
    HPoint q;       // C_inf^i meets {y = 1} at q
    Geodesic alpha; // through p_inf^i and q
    Geodesic beta;  // vertical through q
    double a = 0.0;
    double b = 0.0;
};

struct CountableLimits {
    std::vector<IdealPoint> limits;  // limits[0] = p_inf^1 = infinity
    std::vector<ExtensionChoice> choices;
};

SemiIdealPolygon build_omega1(const FiniteParams& params);
SemiIdealPolygon build_omega_k(const FiniteParams& params);
CountableLimits countable_limit_vertices(const CountableParams& params);
SemiIdealPolygon build_countable_omega_k(const CountableParams& params);

/// Membership of block m (1-based) in M+ and M-.
bool in_m_plus(const FiniteParams& params, int m);
bool in_m_minus(const FiniteParams& params, int m);

struct ValidationReport {
    bool alternation = false;
    bool convex = false;
    bool ordering = false;
    double convexity_margin = 0.0;
    std::vector<std::string> failures;

    bool ok() const { return alternation && convex && ordering; }
};

ValidationReport validate_polygon(const SemiIdealPolygon& poly, const ToleranceConfig& tol = {});

/// Whether every vertex of `inner` lies weakly on the inner side of every edge of `outer`.
bool polygon_contains(const SemiIdealPolygon& outer, const SemiIdealPolygon& inner,
                      const ToleranceConfig& tol = {});

std::string polygon_to_json(const SemiIdealPolygon& poly);
SemiIdealPolygon polygon_from_json(const std::string& text);

}  // namespace limitends
