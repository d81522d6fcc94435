#pragma once

#include "nerve/types.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nerve {

struct LineSegment {
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
};

/// Full circle; parameter t maps to angle 2*pi*t in the frame of circle_frame(normal).
struct Circle3D {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    Vec3 normal = Vec3::UnitZ();
};

/// Clamped B-spline; the knot vector has control_points.size() + degree + 1 entries.
struct BSplineCurve {
    int degree = 3;
    PointList control_points;
    std::vector<double> knots;
};

struct Polyline {
    PointList vertices;
    bool closed = false;
};

using Curve = std::variant<LineSegment, Circle3D, BSplineCurve, Polyline>;

struct CurveSet {
    std::vector<Curve> curves;
};

/// Orthonormal in-plane axes (u, v) with u x v = normal.
std::pair<Vec3, Vec3> circle_frame(const Vec3& normal);

/// Throws std::invalid_argument on degenerate or malformed geometry.
void validate_curve(const Curve& curve);
/// validate_curve plus the [-1,1]^3 domain check for every curve.
void validate_curveset(const CurveSet& set);

bool is_closed(const Curve& curve);
std::string curve_type_name(const Curve& curve);

/// Point at normalized parameter t in [0,1]. Polylines are parameterized by arc length.
Vec3 eval(const Curve& curve, double t);

/// `count` points at uniform parameters i / (count - 1).
PointList sample_uniform(const Curve& curve, int count);

namespace bspline {

/// Knot span index s with knots[s] <= t < knots[s+1], clamped to the last
/// non-empty span at the right end of the domain.
int find_span(double t, int degree, std::span<const double> knots, int control_count);

/// The degree+1 nonzero basis values at t for span `span` (Cox-de Boor).
std::vector<double> basis_functions(int span, double t, int degree, std::span<const double> knots);

/// Evaluates at a parameter in the knot domain [knots[degree], knots[n]].
Vec3 evaluate(const BSplineCurve& curve, double u);

/// Clamped knot vector with `interior` uniformly spaced interior knots in (0,1).
std::vector<double> clamped_uniform_knots(int degree, int interior);

}  // namespace bspline

nlohmann::json curve_to_json(const Curve& curve);
Curve curve_from_json(const nlohmann::json& j);
nlohmann::json curveset_to_json(const CurveSet& set);
/// Throws FormatError on malformed JSON, std::invalid_argument on invalid geometry.
CurveSet curveset_from_json(const nlohmann::json& j);
CurveSet load_curveset(const std::string& path);

nlohmann::json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const nlohmann::json& j);

}  // namespace nerve
