#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "limitends/domain.hpp"
#include "limitends/errors.hpp"
#include "limitends/graph_solver.hpp"

using namespace limitends;

namespace {

SemiIdealPolygon omega1() {
    FiniteParams p;
    p.seeds = {std::pair{-0.5, 0.5}};
    return build_omega1(p);
}

struct Fixture {
    TruncatedProblem problem;
    Solution sol;
};

const Fixture& omega1_solution() {
    static const Fixture f = [] {
        TruncationParams tp;
        tp.n = 4;
        tp.M = 4;
        tp.h = 0.05;
        Fixture out{truncate_and_mesh(omega1(), tp), {}};
        out.sol = solve_graph(out.problem);
        return out;
    }();
    return f;
}

std::vector<HPoint> geodesic_polyline(const HPoint& a, const HPoint& b, int pieces) {
    const Geodesic g = geodesic_through(a, b);
    const double sa = geodesic_coordinate(g, a), sb = geodesic_coordinate(g, b);
    std::vector<HPoint> out{a};
    for (int i = 1; i < pieces; ++i) out.push_back(geodesic_point(g, sa + (sb - sa) * i / pieces));
    out.push_back(b);
    return out;
}

std::vector<int> interior_vertices(const TruncatedProblem& pr) {
    std::vector<int> out;
    for (std::size_t v = 0; v < pr.mesh->points.size(); ++v)
        if (!pr.is_fixed(v)) out.push_back(static_cast<int>(v));
    return out;
}

}  // namespace

TEST_CASE("constant solutions carry no flux") {
    const auto& f = omega1_solution();
    Solution flat;
    flat.mesh = f.sol.mesh;
    flat.values.assign(flat.mesh->points.size(), 1.5);
    const std::vector<HPoint> curve{{-0.3, 0.7}, {0.2, 1.4}, {0.4, 2.0}};
    CHECK(flux(flat, curve).value == 0.0);
    for (std::size_t c = 0; c < f.problem.curves.size(); ++c)
        CHECK(boundary_flux(flat, f.problem, c, 0.0, 1.0).value == 0.0);

    // A solve with constant data is constant up to rounding.
    const auto sol = solve_graph(with_constant_data(f.problem, 1.5));
    CHECK(std::abs(flux(sol, curve).value) < 1e-12);
    for (std::size_t c = 0; c < f.problem.curves.size(); ++c)
        CHECK(std::abs(boundary_flux(sol, f.problem, c, 0.0, 1.0).value) < 1e-12);
}

TEST_CASE("flux sides are opposite") {
    const auto& f = omega1_solution();
    const std::vector<HPoint> curve{{-0.3, 0.7}, {0.2, 1.4}};
    const auto r = flux(f.sol, curve, FluxSide::Right);
    const auto l = flux(f.sol, curve, FluxSide::Left);
    CHECK(r.value == doctest::Approx(-l.value).epsilon(1e-14));
    CHECK(r.curve_length == doctest::Approx(euclidean_segment_length(curve[0], curve[1])).epsilon(1e-12));
}

TEST_CASE("dual cell loops have vanishing flux") {
    const auto& f = omega1_solution();
    const auto inner = interior_vertices(f.problem);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> pick(0, inner.size() - 1);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<int> cell{inner[pick(rng)]};
        // Grow a patch by adding neighbours of the seed.
        if (trial % 2) {
            for (const auto& t : f.sol.mesh->triangles)
                if (std::find(t.begin(), t.end(), cell[0]) != t.end())
                    for (int v : t)
                        if (!f.problem.is_fixed(v) && std::find(cell.begin(), cell.end(), v) == cell.end())
                            cell.push_back(v);
        }
        for (const auto& loop : dual_cell_loops(*f.sol.mesh, cell)) {
            const auto r = flux(f.sol, loop);
            worst = std::max(worst, std::abs(r.value) / r.curve_length);
        }
    }
    MESSAGE("worst closed-loop flux per unit length " << worst);
    CHECK(worst < 1e-10);
}

TEST_CASE("flux across interior geodesic segments is below their length") {
    const auto& f = omega1_solution();
    std::mt19937_64 rng(10);
    std::uniform_int_distribution<std::size_t> tri(0, f.sol.mesh->triangles.size() - 1);
    int done = 0;
    double worst = 0.0;
    while (done < 50) {
        const HPoint a = f.sol.mesh->centroid(tri(rng)), b = f.sol.mesh->centroid(tri(rng));
        if (dist(a, b) < 0.2) continue;
        const auto curve = geodesic_polyline(a, b, 64);
        FluxResult r;
        try {
            r = flux(f.sol, curve);
        } catch (const CurveOutsideDomain&) {
            continue;
        }
        CHECK(std::abs(r.value) < r.curve_length);
        CHECK(r.curve_length >= dist(a, b) * (1.0 - 1e-12));
        CHECK(r.curve_length <= dist(a, b) * (1.0 + 1e-3));
        worst = std::max(worst, std::abs(r.value) / r.curve_length);
        ++done;
    }
    MESSAGE("largest |F| / |C| " << worst);
}

TEST_CASE("curves leaving the domain are rejected") {
    const auto& f = omega1_solution();
    const std::vector<HPoint> curve{{0.0, 1.0}, {0.0, 0.01}};
    CHECK_THROWS_AS(flux(f.sol, curve), CurveOutsideDomain);
}

TEST_CASE("boundary fluxes balance") {
    const auto& f = omega1_solution();
    double total = 0.0, length = 0.0;
    for (std::size_t c = 0; c < f.problem.curves.size(); ++c) {
        const auto r = boundary_flux(f.sol, f.problem, c, 0.0, 1.0);
        CHECK(std::abs(r.value) <= r.curve_length * (1.0 + 1e-2));
        total += r.value;
        length += r.curve_length;
    }
    CHECK(std::abs(total) < 1e-10 * length);
}

TEST_CASE("boundary flux is additive over sub-arcs") {
    const auto& f = omega1_solution();
    for (std::size_t c = 0; c < f.problem.curves.size(); ++c) {
        const double whole = boundary_flux(f.sol, f.problem, c, 0.0, 1.0).value;
        const double parts = boundary_flux(f.sol, f.problem, c, 0.0, 0.3).value +
                             boundary_flux(f.sol, f.problem, c, 0.3, 0.75).value +
                             boundary_flux(f.sol, f.problem, c, 0.75, 1.0).value;
        CHECK(std::abs(parts - whole) < 1e-12 * (1.0 + std::abs(whole)));
        const auto sub = boundary_flux(f.sol, f.problem, c, 0.25, 0.75);
        CHECK(sub.curve_length == doctest::Approx(0.5 * f.problem.curves[c].hyp_length).epsilon(1e-12));
    }
}

TEST_CASE("cap sweep on an A edge and a B edge") {
    TruncationParams tp;
    tp.n = 6;
    tp.h = 0.05;
    const auto poly = omega1();
    REQUIRE(poly.edge_labels()[0] == EdgeLabel::A);
    REQUIRE(poly.edge_labels()[1] == EdgeLabel::B);

    const auto a = flux_convergence_sweep(poly, tp, {0.0, 2.0, 4.0, 8.0}, {0});
    CHECK(a[0].flux == 0.0);
    CHECK(a[0].ratio == 0.0);
    for (const auto& r : a) MESSAGE("A edge M=" << r.M << " ratio " << r.ratio);
    for (std::size_t i = 2; i < a.size(); ++i) CHECK(a[i].ratio > a[i - 1].ratio);
    CHECK(std::abs(a.back().ratio - 1.0) < 0.05);

    const auto b = flux_convergence_sweep(poly, tp, {2.0, 4.0, 8.0}, {1});
    for (const auto& r : b) MESSAGE("B edge M=" << r.M << " ratio " << r.ratio);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i].ratio < b[i - 1].ratio);
    CHECK(std::abs(b.back().ratio + 1.0) < 0.05);
}
