#include "nerve/corpus.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace nerve::corpus {

namespace {

using std::numbers::pi;

Circle3D circle(const Vec3& center, double radius, const Vec3& normal) {
    return {center, radius, normal.normalized()};
}

BSplineCurve cubic(PointList control) {
    const int interior = static_cast<int>(control.size()) - 4;
    return {3, std::move(control), bspline::clamped_uniform_knots(3, interior)};
}

Polyline arc(const Vec3& center, double radius, const Vec3& u, const Vec3& v, double from, double to, int segments) {
    Polyline out;
    for (int i = 0; i <= segments; ++i) {
        const double a = from + (to - from) * i / segments;
        out.vertices.push_back(center + radius * (std::cos(a) * u + std::sin(a) * v));
    }
    return out;
}

CurveSet transformed_box(double half, const Eigen::Matrix3d& rotation, const Vec3& center) {
    CurveSet out;
    for (const auto& c : box_wireframe(Vec3::Constant(-half), Vec3::Constant(half)).curves) {
        const auto& l = std::get<LineSegment>(c);
        out.curves.push_back(LineSegment{rotation * l.a + center, rotation * l.b + center});
    }
    return out;
}

Eigen::Matrix3d rotation(double ax, double ay, double az) {
    return (Eigen::AngleAxisd(az, Vec3::UnitZ()) * Eigen::AngleAxisd(ay, Vec3::UnitY()) *
            Eigen::AngleAxisd(ax, Vec3::UnitX()))
        .toRotationMatrix();
}

/// Two closed profiles at z0 and z1 joined by one line per profile corner.
CurveSet prism(const std::vector<Eigen::Vector2d>& profile, double z0, double z1) {
    CurveSet out;
    for (double z : {z0, z1}) {
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const auto& a = profile[i];
            const auto& b = profile[(i + 1) % profile.size()];
            out.curves.push_back(LineSegment{Vec3(a.x(), a.y(), z), Vec3(b.x(), b.y(), z)});
        }
    }
    for (const auto& p : profile) out.curves.push_back(LineSegment{Vec3(p.x(), p.y(), z0), Vec3(p.x(), p.y(), z1)});
    return out;
}

}  // namespace

CurveSet box_wireframe(const Vec3& lo, const Vec3& hi) {
    CurveSet out;
    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3;
        const int v = (axis + 2) % 3;
        for (int su = 0; su < 2; ++su) {
            for (int sv = 0; sv < 2; ++sv) {
                Vec3 a;
                a[u] = su ? hi[u] : lo[u];
                a[v] = sv ? hi[v] : lo[v];
                a[axis] = lo[axis];
                Vec3 b = a;
                b[axis] = hi[axis];
                out.curves.push_back(LineSegment{a, b});
            }
        }
    }
    return out;
}

std::vector<Shape> restoration_shapes() {
    std::vector<Shape> shapes;
    shapes.push_back({"box_centered", box_wireframe(Vec3::Constant(-0.75), Vec3::Constant(0.75))});
    shapes.push_back({"box_offset", box_wireframe(Vec3(-0.62, -0.37, -0.55), Vec3(0.41, 0.68, 0.47))});
    shapes.push_back({"box_flat", box_wireframe(Vec3(-0.81, -0.33, -0.18), Vec3(0.79, 0.29, 0.23))});
    shapes.push_back({"box_rotated", transformed_box(0.5, rotation(0.3, 0.5, 0.2), Vec3(0.05, -0.03, 0.02))});

    shapes.push_back({"circle_axis", {{circle(Vec3(0.1, -0.05, 0.2), 0.6, Vec3::UnitZ())}}});
    shapes.push_back({"circle_diagonal", {{circle(Vec3(-0.04, 0.02, 0.01), 0.5, Vec3(1, 1, 1))}}});
    shapes.push_back({"circle_tilted", {{circle(Vec3::Zero(), 0.7, Vec3(0.3, -0.8, 0.5))}}});
    shapes.push_back({"circle_small", {{circle(Vec3(0.4, 0.3, -0.5), 0.2, Vec3(0.2, 0.9, -0.1))}}});
    shapes.push_back({"circle_pair",
                      {{circle(Vec3(-0.45, -0.4, 0.1), 0.35, Vec3(0.1, 0.2, 1.0)),
                        circle(Vec3(0.45, 0.45, -0.2), 0.3, Vec3(1.0, -0.3, 0.2))}}});

    shapes.push_back({"spline_arch",
                      {{cubic({Vec3(-0.8, -0.6, -0.2), Vec3(-0.4, 0.5, 0.0), Vec3(0.3, 0.6, 0.2), Vec3(0.8, -0.5, 0.3)})}}});
    shapes.push_back({"spline_wave",
                      {{cubic({Vec3(-0.85, 0.0, 0.0), Vec3(-0.5, 0.6, 0.1), Vec3(-0.1, -0.6, 0.2), Vec3(0.3, 0.6, -0.1),
                               Vec3(0.6, -0.5, -0.2), Vec3(0.85, 0.1, 0.0)})}}});
    shapes.push_back({"spline_helix",
                      {{cubic({Vec3(0.6, 0.0, -0.8), Vec3(0.6, 0.6, -0.6), Vec3(-0.6, 0.6, -0.3), Vec3(-0.6, -0.6, 0.0),
                               Vec3(0.6, -0.6, 0.3), Vec3(0.6, 0.6, 0.6), Vec3(0.0, 0.6, 0.8)})}}});
    shapes.push_back({"spline_pair",
                      {{cubic({Vec3(-0.8, -0.7, 0.5), Vec3(-0.3, -0.2, 0.7), Vec3(0.2, -0.6, 0.4), Vec3(0.7, -0.1, 0.6)}),
                        cubic({Vec3(-0.7, 0.3, -0.6), Vec3(-0.2, 0.8, -0.3), Vec3(0.3, 0.2, -0.5),
                               Vec3(0.5, 0.7, -0.2), Vec3(0.8, 0.4, -0.7)})}}});
    shapes.push_back({"spline_s",
                      {{cubic({Vec3(-0.3, -0.8, -0.3), Vec3(0.6, -0.5, 0.0), Vec3(-0.6, 0.0, 0.1), Vec3(0.6, 0.5, 0.2),
                               Vec3(-0.2, 0.8, 0.3)})}}});

    {
        // Two half circles and the diameter meeting at two degree-3 junctions.
        const Vec3 c(0.02, -0.03, 0.11);
        const Vec3 u = Vec3::UnitX();
        const Vec3 v = Vec3(0.0, 1.0, 0.2).normalized();
        CurveSet theta;
        theta.curves.push_back(arc(c, 0.6, u, v, 0.0, pi, 160));
        theta.curves.push_back(arc(c, 0.6, u, v, pi, 2.0 * pi, 160));
        theta.curves.push_back(LineSegment{c + 0.6 * u, c - 0.6 * u});
        shapes.push_back({"theta", theta});
    }
    {
        const double r = 0.5;
        CurveSet cyl;
        cyl.curves.push_back(circle(Vec3(0.01, 0.02, -0.47), r, Vec3::UnitZ()));
        cyl.curves.push_back(circle(Vec3(0.01, 0.02, 0.53), r, Vec3::UnitZ()));
        cyl.curves.push_back(LineSegment{Vec3(0.01 + r, 0.02, -0.47), Vec3(0.01 + r, 0.02, 0.53)});
        cyl.curves.push_back(LineSegment{Vec3(0.01 - r, 0.02, -0.47), Vec3(0.01 - r, 0.02, 0.53)});
        shapes.push_back({"cylinder", cyl});
    }
    {
        CurveSet boxed = box_wireframe(Vec3(-0.6, -0.6, -0.62), Vec3(0.6, 0.6, 0.58));
        boxed.curves.push_back(circle(Vec3(0.0, 0.0, 0.58), 0.33, Vec3::UnitZ()));
        shapes.push_back({"box_with_hole", boxed});
    }
    shapes.push_back({"triangle_prism",
                      prism({Eigen::Vector2d(-0.6, -0.5), Eigen::Vector2d(0.7, -0.4), Eigen::Vector2d(0.0, 0.65)}, -0.55, 0.6)});
    shapes.push_back({"l_bracket", prism({Eigen::Vector2d(-0.7, -0.7), Eigen::Vector2d(0.65, -0.7), Eigen::Vector2d(0.65, -0.2),
                                          Eigen::Vector2d(-0.2, -0.2), Eigen::Vector2d(-0.2, 0.7), Eigen::Vector2d(-0.7, 0.7)},
                                         -0.3, 0.35)});
    {
        const Vec3 hub(0.013, -0.021, 0.034);
        CurveSet star;
        for (const Vec3& tip : {Vec3(0.8, 0.1, 0.05), Vec3(-0.7, 0.3, -0.1), Vec3(0.1, 0.75, 0.3), Vec3(-0.2, -0.8, 0.2),
                               Vec3(0.05, 0.1, -0.85)}) {
            star.curves.push_back(LineSegment{hub, tip});
        }
        shapes.push_back({"star", star});
    }
    shapes.push_back({"zigzag", {{Polyline{{Vec3(-0.8, -0.5, -0.4), Vec3(-0.3, 0.4, -0.2), Vec3(0.2, -0.45, 0.0),
                                            Vec3(0.7, 0.5, 0.2)},
                                           false}}}});
    {
        CurveSet mixed;
        mixed.curves.push_back(circle(Vec3(-0.3, 0.0, 0.0), 0.45, Vec3(0.0, 1.0, 0.1)));
        mixed.curves.push_back(cubic({Vec3(0.4, -0.8, -0.6), Vec3(0.9, -0.2, -0.2), Vec3(0.3, 0.3, 0.3), Vec3(0.8, 0.8, 0.7)}));
        mixed.curves.push_back(LineSegment{Vec3(-0.9, 0.7, -0.8), Vec3(0.2, 0.8, -0.75)});
        shapes.push_back({"mixed", mixed});
    }
    return shapes;
}

std::vector<Shape> close_pair_shapes() {
    std::vector<Shape> shapes;
    shapes.push_back({"parallel_lines",
                      {{LineSegment{Vec3(-0.8, -0.21, 0.13), Vec3(0.8, -0.17, 0.15)},
                        LineSegment{Vec3(-0.8, -0.17, 0.13), Vec3(0.8, -0.135, 0.16)}}}});
    shapes.push_back({"skew_lines",
                      {{LineSegment{Vec3(-0.7, -0.7, -0.6), Vec3(0.7, 0.6, 0.7)},
                        LineSegment{Vec3(-0.7, -0.66, -0.63), Vec3(0.7, 0.64, 0.66)}}}});
    shapes.push_back({"circles",
                      {{circle(Vec3(0.03, 0.01, -0.02), 0.5, Vec3(0.2, 0.1, 1.0)),
                        circle(Vec3(0.03, 0.01, -0.02), 0.54, Vec3(0.2, 0.1, 1.0))}}});
    {
        const PointList a{Vec3(-0.8, 0.2, -0.4), Vec3(-0.3, 0.7, -0.2), Vec3(0.2, 0.1, 0.1), Vec3(0.7, 0.6, 0.3)};
        PointList b = a;
        for (auto& p : b) p += Vec3(0.0, 0.035, 0.02);
        shapes.push_back({"splines", {{cubic(a), cubic(b)}}});
    }
    shapes.push_back({"near_parallel_edges",
                      {{LineSegment{Vec3(-0.6, 0.5, 0.51), Vec3(0.6, 0.52, 0.5)},
                        LineSegment{Vec3(-0.6, 0.55, 0.53), Vec3(0.6, 0.56, 0.55)},
                        LineSegment{Vec3(0.1, -0.8, -0.3), Vec3(0.12, 0.3, -0.31)}}}});
    return shapes;
}

}  // namespace nerve::corpus
