#include "nerve/fit.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace nerve;

namespace {

PointList circle_points(const Vec3& center, double radius, const Vec3& normal, int n, double phase = 0.0) {
    const auto [u, v] = circle_frame(normal);
    PointList pts;
    for (int k = 0; k < n; ++k) {
        const double a = phase + 2 * std::numbers::pi * k / n;
        pts.push_back(center + radius * (std::cos(a) * u + std::sin(a) * v));
    }
    return pts;
}

PointList square_loop(int per_side) {
    const Vec3 corners[] = {{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}};
    PointList pts;
    for (int side = 0; side < 4; ++side)
        for (int s = 0; s < per_side; ++s)
            pts.push_back(corners[side] + (corners[(side + 1) % 4] - corners[side]) * (double(s) / per_side));
    return pts;
}

double sum_squared_residual(const BSplineCurve& curve, const PointList& pts, const std::vector<double>& u) {
    double total = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) total += (bspline::evaluate(curve, u[k]) - pts[k]).squaredNorm();
    return total;
}

}  // namespace

TEST_CASE("interior knot count") {
    CHECK(interior_knot_count(4) == 0);
    CHECK(interior_knot_count(5) == 1);
    CHECK(interior_knot_count(6) == 2);
    CHECK(interior_knot_count(8) == 4);
    CHECK(interior_knot_count(9) == 4);
    CHECK(interior_knot_count(50) == 25);
}

TEST_CASE("collinear points give a straight spline") {
    PointList pts;
    for (int k = 0; k < 10; ++k) pts.push_back(Vec3(-0.4, 0.1, 0.2) + k / 9.0 * Vec3(0.8, 0.3, -0.1));
    const auto fit = fit_bspline(pts);
    CHECK(fit.residual <= 1e-9);
    CHECK(eval_curve(fit, 0.0) == pts.front());
    CHECK(eval_curve(fit, 1.0) == pts.back());
    CHECK((eval_curve(fit, 0.5) - 0.5 * (pts.front() + pts.back())).norm() <= 1e-9);
    const auto ends = sample_fitted(fit, 2);
    CHECK(ends[0] == pts.front());
    CHECK(ends[1] == pts.back());
    const auto& s = std::get<BSplineCurve>(fit.shape);
    CHECK(s.degree == 3);
    CHECK(s.knots.size() == s.control_points.size() + 4);
    CHECK(s.control_points.size() == 5 + 4);  // five interior knots
}

TEST_CASE("four points give a single cubic segment") {
    const PointList pts{{0, 0, 0}, {0.1, 0.2, 0}, {0.3, 0.2, 0.1}, {0.4, 0, 0.1}};
    const auto fit = fit_bspline(pts);
    const auto& s = std::get<BSplineCurve>(fit.shape);
    CHECK(s.control_points.size() == 4);
    CHECK(s.knots == std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1});
    CHECK(eval_curve(fit, 0.0) == pts.front());
    CHECK(eval_curve(fit, 1.0) == pts.back());
}

TEST_CASE("two and three points are interpolated") {
    const PointList two{{0, 0, 0}, {0.5, 0.2, 0}};
    auto fit = fit_bspline(two);
    CHECK(fit.residual <= 1e-12);
    CHECK((eval_curve(fit, 0.5) - Vec3(0.25, 0.1, 0)).norm() <= 1e-12);
    const PointList three{{0, 0, 0}, {0.2, 0.3, 0}, {0.5, 0.1, 0.1}};
    fit = fit_bspline(three);
    CHECK(fit.residual <= 1e-12);
    CHECK(eval_curve(fit, 1.0) == three.back());
    CHECK_THROWS_AS(fit_bspline(PointList{{0, 0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_bspline(PointList{{0.1, 0, 0}, {0.1, 0, 0}, {0.1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("refitting samples of a coarser spline is exact") {
    // Clamped cubic with 5 control points: one interior knot at 0.5, which is
    // also a knot of the 25-interior-knot space used for 50 points.
    BSplineCurve src{3, {{-0.6, -0.2, 0}, {-0.3, 0.5, 0.2}, {0.1, -0.4, 0.3}, {0.4, 0.3, -0.2}, {0.7, 0, 0.1}},
                     bspline::clamped_uniform_knots(3, 1)};
    REQUIRE(src.knots == std::vector<double>{0, 0, 0, 0, 0.5, 1, 1, 1, 1});
    REQUIRE(interior_knot_count(50) == 25);

    std::vector<double> t(50);
    PointList pts;
    for (int k = 0; k < 50; ++k) {
        t[k] = k / 49.0;
        pts.push_back(bspline::evaluate(src, t[k]));
    }
    const auto fit = fit_bspline(pts, t);
    CHECK(fit.residual <= 1e-6);
    for (int k = 0; k <= 100; ++k)
        CHECK((eval_curve(fit, k / 100.0) - bspline::evaluate(src, k / 100.0)).norm() <= 1e-9);

    // Under chord-length parameters the same data carry a reparameterization
    // error; the fitted curve still tracks the source shape closely.
    const auto chord_fit = fit_bspline(pts);
    CHECK(chord_fit.residual <= 1e-3);
}

TEST_CASE("explicit parameters are checked") {
    const PointList pts{{0, 0, 0}, {0.1, 0, 0}, {0.2, 0.1, 0}, {0.3, 0, 0}};
    CHECK_THROWS_AS(fit_bspline(pts, std::vector<double>{0, 0.5, 0.4, 1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_bspline(pts, std::vector<double>{0, 0.5, 1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_bspline(pts, std::vector<double>{0.1, 0.2, 0.5, 1}), std::invalid_argument);
}

TEST_CASE("uneven data spacing does not leave loose control points") {
    // Points bunched at both ends leave the middle knot spans empty.
    PointList pts;
    for (int k = 0; k < 10; ++k) pts.push_back({-0.5 + 0.001 * k, 0.001 * k * k, 0});
    for (int k = 0; k < 10; ++k) pts.push_back({0.5 + 0.001 * k, 0.1 - 0.001 * k, 0});
    const auto fit = fit_bspline(pts);
    CHECK(fit.residual < 1e-3);
    // The bridge across the gap may bow, but no further than half the gap.
    for (const auto& c : std::get<BSplineCurve>(fit.shape).control_points) {
        CHECK(c.x() >= -0.6);
        CHECK(c.x() <= 0.7);
        CHECK(std::abs(c.y()) <= 0.5);
        CHECK(c.z() == doctest::Approx(0.0));
    }
    double x = -1.0;
    for (int k = 0; k <= 200; ++k) {
        const Vec3 p = eval_curve(fit, k / 200.0);
        CHECK(p.x() >= x - 1e-9);
        x = p.x();
    }
}

TEST_CASE("least-squares optimality of the free control points") {
    oracle::Gen gen(41);
    for (int trial = 0; trial < 5; ++trial) {
        PointList pts;
        Vec3 p = gen.point(0.5);
        for (int k = 0; k < 15; ++k) {
            p += Vec3(0.05, gen.uniform(-0.03, 0.03), gen.uniform(-0.03, 0.03));
            pts.push_back(p);
        }
        const auto fit = fit_bspline(pts);
        const auto u = chord_length_parameters(pts);
        auto curve = std::get<BSplineCurve>(fit.shape);
        const double base = sum_squared_residual(curve, pts, u);
        for (std::size_t i = 1; i + 1 < curve.control_points.size(); ++i) {
            for (int axis = 0; axis < 3; ++axis) {
                for (double delta : {1e-4, -1e-4}) {
                    auto moved = curve;
                    moved.control_points[i][axis] += delta;
                    CHECK(sum_squared_residual(moved, pts, u) >= base);
                }
            }
        }
    }
}

TEST_CASE("exact circle recovery") {
    const Vec3 center(0.1, 0.2, 0.3);
    const auto pts = circle_points(center, 0.4, Vec3::UnitZ(), 16, 0.3);
    const auto fit = fit_circle(pts);
    REQUIRE(fit.is_circle());
    const auto& c = std::get<Circle3D>(fit.shape);
    CHECK((c.center - center).norm() <= 1e-9);
    CHECK(std::abs(c.radius - 0.4) <= 1e-9);
    CHECK(fit.residual <= 1e-9);
    CHECK(std::abs(std::abs(c.normal.z()) - 1.0) <= 1e-9);
    // Points run counterclockwise about the normal.
    CHECK(c.normal.z() > 0);
    CHECK(eval_curve(fit, 0.0) == eval_curve(fit, 1.0));
}

TEST_CASE("circle normal follows the traversal") {
    auto pts = circle_points(Vec3::Zero(), 0.5, Vec3::UnitX(), 12);
    std::reverse(pts.begin(), pts.end());
    const auto c = std::get<Circle3D>(fit_circle(pts).shape);
    CHECK(c.normal.isApprox(-Vec3::UnitX(), 1e-12));
}

TEST_CASE("circle fit under out-of-plane noise") {
    oracle::Gen gen(43);
    for (int trial = 0; trial < 50; ++trial) {
        auto pts = circle_points(Vec3(0.1, 0.2, 0.3), 0.4, Vec3::UnitZ(), 16, gen.uniform(0, 1));
        for (auto& p : pts) p.z() += gen.normal(1e-3);
        const auto fit = fit_circle(pts);
        CHECK(fit.residual >= 1e-4);
        CHECK(fit.residual <= 1e-2);
        CHECK(std::abs(std::get<Circle3D>(fit.shape).radius - 0.4) <= 1e-2);
    }
}

TEST_CASE("collinear points are not a circle") {
    CHECK_THROWS_AS(fit_circle(PointList{{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(fit_circle(PointList{{0, 0, 0}, {0.1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("circle fit is equivariant under rigid motions") {
    oracle::Gen gen(47);
    for (int trial = 0; trial < 20; ++trial) {
        PointList pts = circle_points(gen.point(0.3), gen.uniform(0.1, 0.5), gen.unit(), 20);
        for (auto& p : pts) p += 1e-3 * Vec3(gen.normal(1), gen.normal(1), gen.normal(1));
        const Eigen::Matrix3d rot = Eigen::AngleAxisd(gen.uniform(0, 6.28), gen.unit()).toRotationMatrix();
        const Vec3 shift = gen.point(0.2);
        PointList moved;
        for (const auto& p : pts) moved.push_back(rot * p + shift);
        const auto a = std::get<Circle3D>(fit_circle(pts).shape);
        const auto b = std::get<Circle3D>(fit_circle(moved).shape);
        CHECK((rot * a.center + shift - b.center).norm() <= 1e-9);
        CHECK(std::abs(a.radius - b.radius) <= 1e-9);
        CHECK((rot * a.normal - b.normal).norm() <= 1e-9);
    }
}

TEST_CASE("closed paths: circles stay circles, squares fall back") {
    const auto circle = circle_points(Vec3(0, 0.1, 0), 0.5, Vec3(1, 1, 0).normalized(), 40);
    CurvePath loop{{}, true};
    for (std::size_t i = 0; i < circle.size(); ++i) loop.vertices.push_back(i);
    CHECK(fit_path(loop, circle).is_circle());

    const auto square = square_loop(5);
    CHECK(fit_circle(square).residual >= kDefaultCircleThreshold);
    CurvePath sq{{}, true};
    for (std::size_t i = 0; i < square.size(); ++i) sq.vertices.push_back(i);
    const auto fit = fit_path(sq, square);
    REQUIRE_FALSE(fit.is_circle());
    CHECK(eval_curve(fit, 0.0) == square.front());
    CHECK(eval_curve(fit, 1.0) == square.front());
}

TEST_CASE("open straight chain gives a spline") {
    PointList pts;
    for (int k = 0; k < 7; ++k) pts.push_back({k * 0.1, 0, 0});
    CurvePath chain{{0, 1, 2, 3, 4, 5, 6}, false};
    const auto fit = fit_path(chain, pts);
    CHECK_FALSE(fit.is_circle());
    CHECK(fit.residual <= 1e-9);
}

TEST_CASE("fitted curves JSON round trip") {
    const auto a = fit_bspline(PointList{{0, 0, 0}, {0.1, 0.2, 0}, {0.3, 0.2, 0.1}, {0.4, 0, 0.1}, {0.5, 0.1, 0}});
    const auto b = fit_circle(circle_points(Vec3::Zero(), 0.3, Vec3::UnitY(), 12));
    const std::vector<ParametricCurve> curves{a, b};
    const auto j = fitted_to_json(curves);
    CHECK(j["curves"][0]["type"] == "bspline");
    CHECK(j["curves"][1]["type"] == "circle");
    const auto back = fitted_from_json(j);
    REQUIRE(back.size() == 2);
    CHECK(std::get<BSplineCurve>(back[0].shape).control_points == std::get<BSplineCurve>(a.shape).control_points);
    CHECK(std::get<Circle3D>(back[1].shape).center == std::get<Circle3D>(b.shape).center);
    CHECK(back[1].residual == b.residual);
    // Fitted output doubles as curve set input.
    CHECK(curveset_from_json(j).curves.size() == 2);
}
