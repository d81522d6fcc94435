#pragma once

#include "nerve/curves.hpp"
#include "nerve/pwl.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <variant>
#include <vector>

namespace nerve {

/// A fitted curve: clamped cubic B-spline or 3D circle, with its RMS fitting distance.
struct ParametricCurve {
    std::variant<BSplineCurve, Circle3D> shape;
    double residual = 0.0;

    bool is_circle() const { return std::holds_alternative<Circle3D>(shape); }
    Curve as_curve() const;
};

inline constexpr double kDefaultCircleThreshold = 0.001;
inline constexpr int kSplineDegree = 3;

/// Normalized cumulative chord length; throws if all points coincide.
std::vector<double> chord_length_parameters(std::span<const Vec3> points);

/// Interior knots used for an n-point path: floor(n / 2) clamped to [0, n - 4].
int interior_knot_count(int n);

/// Least-squares cubic B-spline with uniform interior knots, chord-length
/// parameters and both end control points pinned to the first/last point.
/// Paths of two or three points are interpolated exactly (line or
/// degree-elevated quadratic). Throws std::invalid_argument for fewer than
/// two points or all-coincident input.
ParametricCurve fit_bspline(std::span<const Vec3> points);
/// Same fit with caller-supplied data parameters (nondecreasing, 0 first, 1 last).
ParametricCurve fit_bspline(std::span<const Vec3> points, std::span<const double> parameters);

/// PCA plane plus algebraic in-plane circle fit. The residual is the RMS
/// 3D distance to the circle, i.e. radial and out-of-plane error combined.
/// The normal is oriented so the points run counterclockwise about it.
/// Throws std::invalid_argument for fewer than three or collinear points.
ParametricCurve fit_circle(std::span<const Vec3> points);

/// Closed paths try a circle first and fall back to a spline through the loop
/// (cut at its first vertex) when the circle residual is >= `circle_threshold`;
/// open paths always get a spline.
ParametricCurve fit_path(const CurvePath& path, std::span<const Vec3> positions,
                         double circle_threshold = kDefaultCircleThreshold);
ParametricCurve fit_path(const CurvePath& path, const PwlGraph& graph,
                         double circle_threshold = kDefaultCircleThreshold);

Vec3 eval_curve(const ParametricCurve& curve, double t);
PointList sample_fitted(const ParametricCurve& curve, int count);

nlohmann::json fitted_to_json(std::span<const ParametricCurve> curves);
std::vector<ParametricCurve> fitted_from_json(const nlohmann::json& j);

}  // namespace nerve
