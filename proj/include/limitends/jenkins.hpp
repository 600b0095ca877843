#pragma once

// Jenkins-Serrin certification of semi-ideal polygons satisfying the equal-horocycle
// condition: fast horodisk criterion plus a brute-force truncated oracle.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "limitends/domain.hpp"
#include "limitends/hyp_geom.hpp"

namespace limitends {

struct StarEntry {
    std::size_t vertex = 0;  // index of the ideal vertex in the polygon
    Horocycle horocycle;     // through both interior neighbours
    double residual = 0.0;   // |B(p, prev) - B(p, next)|
};

struct StarCertificate {
    std::vector<StarEntry> entries;
    double max_residual = 0.0;
    bool valid = false;

    /// Horocycle of the ideal vertex with polygon index `vertex`.
    const Horocycle& horocycle_of(std::size_t vertex) const;
};

struct CarVerdict {
    bool is_js = false;
    bool vacuous = false;  // no admissible pair; margin is +infinity
    double margin = std::numeric_limits<double>::infinity();
    /// (ideal vertex index, interior vertex index) realizing the margin.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

struct InscribedReport {
    std::vector<std::size_t> subset;  // polygon indices in cyclic order
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;

    double slack_alpha() const { return gamma - 2.0 * alpha; }
    double slack_beta() const { return gamma - 2.0 * beta; }
    double slack() const { return std::min(slack_alpha(), slack_beta()); }
};

struct TruncatedLevel {
    double n = 0.0;
    double alpha_omega = 0.0;
    double beta_omega = 0.0;
    std::vector<InscribedReport> reports;  // same subset order at every level
    double min_slack = std::numeric_limits<double>::infinity();
    std::size_t worst = 0;
};

struct TruncatedVerdict {
    std::vector<TruncatedLevel> levels;
    bool is_js = false;
    double max_alpha_beta_gap = 0.0;
    /// Max deviation of slack from an affine function of n (needs >= 3 levels).
    double affinity_residual = 0.0;
    std::optional<std::vector<std::size_t>> witness;  // a subset failing the test
};

StarCertificate check_star(const SemiIdealPolygon& poly, const ToleranceConfig& tol = {});
CarVerdict check_car(const SemiIdealPolygon& poly, const StarCertificate& cert, const ToleranceConfig& tol = {});

/// Every cyclically ordered vertex subset of size >= 3 other than the full polygon.
std::vector<std::vector<std::size_t>> enumerate_inscribed(const SemiIdealPolygon& poly,
                                                          std::size_t max_vertices = 12);

/// Length of the geodesic segment between two anchors outside the given horodisks.
double length_outside(const Anchor& a, const Anchor& b, const std::vector<Horocycle>& horodisks,
                      const ToleranceConfig& tol = {});

/// Definition-level oracle with horocycles at Busemann level level(C) - n.
TruncatedVerdict check_js_truncated(const SemiIdealPolygon& poly, const std::vector<double>& n_levels,
                                    const ToleranceConfig& tol = {});

/// JSON report {star, car, truncated}.
std::string jenkins_report_json(const SemiIdealPolygon& poly, const StarCertificate& star,
                                const CarVerdict& car, const std::optional<TruncatedVerdict>& truncated);

struct SampleOptions {
    int k = 3;                      // number of ideal vertices
    double infinity_probability = 0.5;
    double spread = 3.0;            // finite abscissae uniform in [-spread, spread]
    double level_sigma = 1.0;       // horocycle levels ~ N(0, sigma)
    /// Raise one horocycle by this much to provoke a horodisk violation (0 = off).
    double boost = 0.0;
};

/// Random convex polygon satisfying the equal-horocycle condition.
SemiIdealPolygon sample_star_polygon(std::mt19937_64& rng, const SampleOptions& opt = {},
                                     const ToleranceConfig& tol = {});

}  // namespace limitends
