#pragma once

#include "nerve/curves.hpp"
#include "nerve/grid.hpp"

#include <span>
#include <string>
#include <vector>

namespace nerve {

/// How the representative point of an occupied cube is chosen.
struct PointRule {
    enum class Kind { Midpoint, Qef };
    Kind kind = Kind::Midpoint;
    double lambda = 1e-3;  ///< QEF regularization weight

    static PointRule midpoint() { return {}; }
    static PointRule qef(double lambda = 1e-3) { return {Kind::Qef, lambda}; }
    /// "midpoint", "qef" or "qef:<lambda>".
    static PointRule parse(const std::string& text);
    std::string to_string() const;
};

struct VoxelizeOptions {
    PointRule rule;
    /// Maximum chord deviation when sampling curves; <= 0 selects default_chord_tolerance(r).
    double chord_tolerance = 0.0;
};

/// Default sampling tolerance, l / 100.
double default_chord_tolerance(int resolution);

/// One cube visited by a segment with its parameter interval on [0,1].
struct WalkStep {
    CubeIndex cube;
    double t_enter = 0.0;
    double t_exit = 1.0;
};

struct FaceCrossing {
    Vec3 position = Vec3::Zero();
    Vec3 tangent = Vec3::UnitX();  ///< unit length, sign-free
};

/// The part of the input curves that falls inside one cube.
struct CubeTruncation {
    CubeIndex cube;
    std::vector<PointList> runs;  ///< ordered point runs, each with >= 2 points
    PointList endpoints;          ///< curve endpoints assigned to this cube
    std::vector<FaceCrossing> crossings;
    std::vector<int> curve_ids;  ///< sorted, unique
};

/// Polyline whose vertices lie on the curve with every chord within
/// `chord_tolerance` of it. Closed curves come back explicitly closed:
/// last vertex == first vertex and `closed` is true.
Polyline sample_curve(const Curve& curve, double chord_tolerance);

/// Cubes crossed by the segment a->b, in order, with contiguous parameter
/// intervals covering [0,1]. Crossings through a cube edge or corner step
/// directly to the cube on the far side.
std::vector<WalkStep> segment_walk(const Vec3& a, const Vec3& b, int resolution);

/// Endpoint if any (mean of several), otherwise the mean of the arc-length
/// midpoints of the runs. Throws std::invalid_argument on an empty truncation.
Vec3 cube_point_midpoint(const CubeTruncation& trunc);

/// Minimizer of sum_i |x - p_i - a_i t_i|^2 + lambda * sum_i a_i^2 over x and
/// all a_i, clamped to `cube`. Throws std::invalid_argument when the 3x3
/// system is singular (parallel tangents with lambda = 0).
Vec3 cube_point_qef(std::span<const FaceCrossing> crossings, double lambda, const Box& cube);

struct Voxelization {
    NerveGrid grid;
    std::vector<CubeTruncation> truncations;  ///< one per occupied cube, ascending linear index
    std::size_t corner_steps = 0;             ///< consecutive cubes not sharing a face (no flag set)

    /// Occupied cubes holding pieces of at least two distinct curves.
    std::size_t junction_cubes() const;
    double junction_fraction() const;
};

Voxelization voxelize_detailed(const CurveSet& curves, int resolution, const VoxelizeOptions& options = {});
NerveGrid voxelize(const CurveSet& curves, int resolution, const VoxelizeOptions& options = {});

}  // namespace nerve
