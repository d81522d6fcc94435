#include "nerve/corpus.hpp"
#include "nerve/voxelize.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace nerve;

namespace {

std::set<CubeIndex> walk_cubes(const std::vector<WalkStep>& steps) {
    std::set<CubeIndex> out;
    for (const auto& s : steps) out.insert(s.cube);
    return out;
}

std::vector<CubeIndex> walk_sequence(const std::vector<WalkStep>& steps) {
    std::vector<CubeIndex> out;
    for (const auto& s : steps) out.push_back(s.cube);
    return out;
}

}  // namespace

TEST_CASE("sampling a line gives its two endpoints") {
    const auto p = sample_curve(LineSegment{{-1, 0, 0}, {1, 0, 0}}, 0.01);
    REQUIRE(p.vertices.size() == 2);
    CHECK(p.vertices[0] == Vec3(-1, 0, 0));
    CHECK(p.vertices[1] == Vec3(1, 0, 0));
    CHECK_FALSE(p.closed);
}

TEST_CASE("circle sampling respects the sagitta bound") {
    const Circle3D c{Vec3::Zero(), 0.5, Vec3::UnitZ()};
    const double tol = 1e-3;
    const auto p = sample_curve(c, tol);
    CHECK(p.closed);
    CHECK(p.vertices.front() == p.vertices.back());
    for (const auto& v : p.vertices) CHECK(std::abs(v.norm() - 0.5) <= 1e-12);
    for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
        const double chord = (p.vertices[i + 1] - p.vertices[i]).norm();
        const double half_angle = std::asin(std::min(1.0, chord / (2 * 0.5)));
        CHECK(0.5 * (1 - std::cos(half_angle)) <= tol);
    }
    CHECK_THROWS_AS(sample_curve(Circle3D{Vec3::Zero(), 0.0, Vec3::UnitZ()}, tol), std::invalid_argument);
    CHECK_THROWS_AS(sample_curve(LineSegment{{0, 0, 0}, {0, 0, 0}}, tol), std::invalid_argument);
}

TEST_CASE("spline sampling stays within tolerance of the curve") {
    oracle::Gen gen(5);
    for (int n = 0; n < 20; ++n) {
        BSplineCurve s;
        for (int i = 0; i < 6; ++i) s.control_points.push_back(gen.point(0.9));
        s.knots = bspline::clamped_uniform_knots(3, 2);
        const double tol = 2e-3;
        const auto p = sample_curve(s, tol);
        CHECK(p.vertices.front() == eval(s, 0.0));
        CHECK(p.vertices.back() == eval(s, 1.0));
        // Dense curve samples must each be close to the polyline.
        for (int k = 0; k <= 2000; ++k) {
            const Vec3 q = eval(s, k / 2000.0);
            double best = 1e9;
            for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
                const Vec3 a = p.vertices[i], d = p.vertices[i + 1] - a;
                const double t = std::clamp(d.dot(q - a) / d.squaredNorm(), 0.0, 1.0);
                best = std::min(best, (a + t * d - q).norm());
            }
            CHECK(best <= tol * 1.01);
        }
    }
}

TEST_CASE("segment walk examples") {
    auto w = segment_walk({-0.5, -0.5, -0.5}, {0.5, -0.5, -0.5}, 2);
    REQUIRE(w.size() == 2);
    CHECK(w[0].cube == CubeIndex{0, 0, 0});
    CHECK(w[0].t_enter == 0.0);
    CHECK(w[0].t_exit == 0.5);
    CHECK(w[1].cube == CubeIndex{1, 0, 0});
    CHECK(w[1].t_enter == 0.5);
    CHECK(w[1].t_exit == 1.0);

    w = segment_walk({0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, 2);
    REQUIRE(w.size() == 1);
    CHECK(w[0].cube == CubeIndex{1, 1, 1});
    CHECK(w[0].t_enter == 0.0);
    CHECK(w[0].t_exit == 1.0);

    const Vec3 a(-0.9, -0.9, -0.9), b(0.9, 0.9, 0.9);
    w = segment_walk(a, b, 2);
    CHECK(walk_sequence(w) == oracle::dense_walk(a, b, 2));
    CHECK(walk_sequence(w) == std::vector<CubeIndex>{{0, 0, 0}, {1, 1, 1}});
}

TEST_CASE("segment walk matches dense sampling on random segments") {
    oracle::Gen gen(17);
    for (int n = 0; n < 150; ++n) {
        const int r = gen.integer(2, 8);
        const Vec3 a = gen.point(), b = gen.point();
        const auto w = segment_walk(a, b, r);
        CHECK(walk_sequence(w) == oracle::dense_walk(a, b, r));
        CHECK(w.front().t_enter == 0.0);
        CHECK(w.back().t_exit == 1.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(w[i].t_enter < w[i].t_exit);
            if (i > 0) CHECK(w[i].t_enter == w[i - 1].t_exit);
            const Vec3 mid = a + 0.5 * (w[i].t_enter + w[i].t_exit) * (b - a);
            CHECK(cell_of(mid, r) == w[i].cube);
        }
    }
}

TEST_CASE("segment walk along grid planes") {
    // A segment lying in the internal plane x = 0 belongs to the higher x cells.
    const auto w = segment_walk({0, -0.75, -0.75}, {0, 0.75, -0.75}, 4);
    for (const auto& s : w) CHECK(s.cube.i == 2);
    CHECK(w.size() == 4);
}

TEST_CASE("voxelizing a segment whose endpoints are inside cubes") {
    CurveSet set{{LineSegment{{-0.5, -0.5, -0.5}, {0.5, -0.5, -0.5}}}};
    const auto g = voxelize(set, 2);
    CHECK(g.occupied_count() == 2);
    CHECK(g.occupied(CubeIndex{0, 0, 0}));
    CHECK(g.occupied(CubeIndex{1, 0, 0}));
    CHECK(g.orientation({1, 0, 0}, 0));
    CHECK(g.true_face_count() == 1);
    CHECK(g.point(CubeIndex{0, 0, 0}) == Vec3(-0.5, -0.5, -0.5));
    CHECK(g.point(CubeIndex{1, 0, 0}) == Vec3(0.5, -0.5, -0.5));
}

TEST_CASE("voxelizing a segment spanning the domain") {
    CurveSet set{{LineSegment{{-1, -0.5, -0.5}, {1, -0.5, -0.5}}}};
    const auto g = voxelize(set, 2);
    CHECK(g.occupied_count() == 2);
    CHECK(g.orientation({1, 0, 0}, 0));
    CHECK(g.true_face_count() == 1);
    CHECK((g.point(CubeIndex{0, 0, 0}) - Vec3(-0.5, -0.5, -0.5)).norm() < 1e-15);
    CHECK((g.point(CubeIndex{1, 0, 0}) - Vec3(0.5, -0.5, -0.5)).norm() < 1e-15);
}

TEST_CASE("wireframe corner cubes hold the corners") {
    const double c = 0.75;
    const auto vox = voxelize_detailed(corpus::box_wireframe({-c, -c, -c}, {c, c, c}), 32);
    for (int s = 0; s < 8; ++s) {
        const Vec3 corner((s & 1) ? c : -c, (s & 2) ? c : -c, (s & 4) ? c : -c);
        const auto cube = cell_of(corner, 32);
        REQUIRE(vox.grid.occupied(cube));
        CHECK((vox.grid.point(cube) - corner).norm() < 1e-15);
    }
    CHECK(vox.grid.violations().empty());
    // 12 edges of 24 l each, corners shared.
    CHECK(vox.grid.occupied_count() == 8 + 12 * 23);
}

TEST_CASE("midpoint rule") {
    CubeTruncation t;
    t.runs.push_back({{-0.5, 0, 0}, {0.5, 0, 0}});
    CHECK(cube_point_midpoint(t) == Vec3(0, 0, 0));

    t.runs = {{{0.0, 0.2, 0.1}, {0.3, 0.2, 0.1}}};
    t.endpoints = {{0.3, 0.2, 0.1}};
    CHECK(cube_point_midpoint(t) == Vec3(0.3, 0.2, 0.1));

    t.endpoints.clear();
    t.runs = {{{0.0, 0, 0}, {0.2, 0, 0}}, {{0.2, 0, 0}, {0.4, 0, 0}}};
    CHECK((cube_point_midpoint(t) - Vec3(0.2, 0, 0)).norm() < 1e-15);

    t.endpoints = {{0.1, 0, 0}, {0.3, 0, 0}};
    CHECK((cube_point_midpoint(t) - Vec3(0.2, 0, 0)).norm() < 1e-15);

    // Arc-length midpoint of a bent run.
    t.endpoints.clear();
    t.runs = {{{0, 0, 0}, {0.3, 0, 0}, {0.3, 0.1, 0}}};
    CHECK((cube_point_midpoint(t) - Vec3(0.2, 0, 0)).norm() < 1e-15);

    CHECK_THROWS_AS(cube_point_midpoint(CubeTruncation{}), std::invalid_argument);
}

TEST_CASE("QEF examples") {
    const Box unit{{-1, -1, -1}, {1, 1, 1}};
    std::vector<FaceCrossing> xs{{{-0.5, 0, 0}, {1, 0, 0}}, {{0.5, 0, 0}, {1, 0, 0}}};
    CHECK(cube_point_qef(xs, 0.001, unit).norm() < 1e-12);
    CHECK_THROWS_AS(cube_point_qef(xs, 0.0, unit), std::invalid_argument);

    xs = {{{0.2, 0, 0}, {1, 0, 0}}};
    CHECK((cube_point_qef(xs, 1.0, unit) - Vec3(0.2, 0, 0)).norm() < 1e-12);

    xs = {{{-0.5, 0.1, 0}, {1, 0, 0}}, {{0.1, -0.5, 0}, {0, 1, 0}}};
    const Vec3 x = cube_point_qef(xs, 1e-6, unit);

    // Coarse-to-fine brute-force minimization over the cube, final step 1e-4.
    Vec3 best = Vec3::Zero();
    double best_val = 1e300;
    const std::pair<double, double> passes[] = {{0.02, 1.0}, {1e-3, 0.04}, {1e-4, 2e-3}};
    for (const auto& [step, half] : passes) {
        const Vec3 center = best;
        const int n = static_cast<int>(std::lround(half / step));
        for (int a = -n; a <= n; ++a)
            for (int b = -n; b <= n; ++b)
                for (int c = -n; c <= n; ++c) {
                    const Vec3 p = unit.clamp(center + step * Vec3(a, b, c));
                    const double v = oracle::qef_objective(p, xs, 1e-6);
                    if (v < best_val) best_val = v, best = p;
                }
    }
    CHECK((best - Vec3(0.1, 0.1, 0)).norm() < 1e-4);
    CHECK((x - best).norm() < 1e-4);
}

TEST_CASE("QEF result beats random points in the cube") {
    oracle::Gen gen(23);
    for (int n = 0; n < 50; ++n) {
        const Box cube{{-0.25, 0, 0.5}, {0, 0.25, 0.75}};
        std::vector<FaceCrossing> xs;
        const int count = gen.integer(1, 4);
        for (int i = 0; i < count; ++i) {
            const Vec3 p = cube.min + Vec3(gen.uniform(0, 0.25), gen.uniform(0, 0.25), gen.uniform(0, 0.25));
            xs.push_back({p, gen.unit()});
        }
        const double lambda = gen.uniform(1e-4, 1.0);
        const Vec3 x = cube_point_qef(xs, lambda, cube);
        CHECK(cube.contains(x));
        // Only meaningful when the unconstrained minimizer is inside the cube.
        const Vec3 free = cube_point_qef(xs, lambda, Box{Vec3::Constant(-1e9), Vec3::Constant(1e9)});
        if (!cube.contains(free)) continue;
        const double fx = oracle::qef_objective(x, xs, lambda);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 q = cube.min + Vec3(gen.uniform(0, 0.25), gen.uniform(0, 0.25), gen.uniform(0, 0.25));
            CHECK(fx <= oracle::qef_objective(q, xs, lambda) + 1e-15);
        }
    }
}

TEST_CASE("point rule parsing") {
    CHECK(PointRule::parse("midpoint").kind == PointRule::Kind::Midpoint);
    const auto q = PointRule::parse("qef:1e-3");
    CHECK(q.kind == PointRule::Kind::Qef);
    CHECK(q.lambda == 1e-3);
    CHECK(PointRule::parse("qef").lambda == 1e-3);
    CHECK_THROWS_AS(PointRule::parse("qef:-1"), std::invalid_argument);
    CHECK_THROWS_AS(PointRule::parse("centroid"), std::invalid_argument);
}

TEST_CASE("occupancy is the union of the walks of the sampled segments") {
    oracle::Gen gen(29);
    for (int n = 0; n < 40; ++n) {
        const int r = gen.integer(2, 8);
        const auto set = gen.curves(gen.integer(1, 3));
        const auto vox = voxelize_detailed(set, r);
        std::set<CubeIndex> expected;
        for (const auto& curve : set.curves) {
            const auto poly = sample_curve(curve, default_chord_tolerance(r));
            for (std::size_t i = 0; i + 1 < poly.vertices.size(); ++i) {
                const auto cubes = walk_cubes(segment_walk(poly.vertices[i], poly.vertices[i + 1], r));
                expected.insert(cubes.begin(), cubes.end());
            }
            if (!poly.closed) {
                expected.insert(cell_of(poly.vertices.front(), r));
                expected.insert(cell_of(poly.vertices.back(), r));
            }
        }
        std::set<CubeIndex> got;
        for (std::size_t lin = 0; lin < vox.grid.cube_count(); ++lin)
            if (vox.grid.occupied(lin)) got.insert(vox.grid.cube_index(lin));
        CHECK(got == expected);
        CHECK(vox.grid.violations().empty());
        for (const auto& t : vox.truncations) {
            const auto box = vox.grid.extent(t.cube);
            CHECK(box.contains(vox.grid.point(t.cube)));
            for (const auto& run : t.runs) {
                CHECK(run.size() >= 2);
                for (const auto& p : run) CHECK(((p - box.clamp(p)).norm() < 1e-12));
            }
        }
    }
}

TEST_CASE("QEF rule keeps points inside their cubes") {
    oracle::Gen gen(31);
    for (int n = 0; n < 10; ++n) {
        const auto g = voxelize(gen.curves(3), 8, {PointRule::qef(1e-3)});
        CHECK(g.violations().empty());
    }
}

TEST_CASE("circle occupancy tracks the exact curve at every tolerance") {
    // Cubes the curve passes through deeper than the tolerance are always
    // occupied, and every occupied cube lies within the tolerance of the curve.
    oracle::Gen gen(37);
    for (int n = 0; n < 20; ++n) {
        const double radius = gen.uniform(0.2, 0.8);
        const Circle3D circle{gen.point(0.95 - radius), radius, gen.unit()};
        const int r = 16;
        const double l = edge_length(r);
        const auto dense = sample_uniform(circle, 20000);
        const double spacing = 2 * std::numbers::pi * radius / 19999;
        for (double tol : {l / 10, l / 30, l / 100, l / 1000}) {
            const auto g = voxelize(CurveSet{{circle}}, r, {{}, tol});
            for (const auto& q : dense) {
                const auto c = cell_of(q, r);
                const auto box = g.extent(c);
                const double depth = std::min((q - box.min).minCoeff(), (box.max - q).minCoeff());
                if (depth > tol) CHECK(g.occupied(c));
            }
            for (std::size_t lin = 0; lin < g.cube_count(); ++lin) {
                if (!g.occupied(lin)) continue;
                const auto box = g.extent(g.cube_index(lin));
                double best = 1e9;
                for (const auto& q : dense) best = std::min(best, (q - box.clamp(q)).norm());
                CHECK(best <= tol + spacing);
            }
        }
    }
}

TEST_CASE("junction fraction drops with resolution for near-parallel pairs") {
    std::size_t junction32 = 0, occupied32 = 0, junction64 = 0, occupied64 = 0;
    for (const auto& shape : corpus::close_pair_shapes()) {
        const auto a = voxelize_detailed(shape.curves, 32);
        const auto b = voxelize_detailed(shape.curves, 64);
        junction32 += a.junction_cubes();
        occupied32 += a.grid.occupied_count();
        junction64 += b.junction_cubes();
        occupied64 += b.grid.occupied_count();
    }
    CHECK(static_cast<double>(junction64) / occupied64 < static_cast<double>(junction32) / occupied32);
}
