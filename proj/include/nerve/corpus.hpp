#pragma once

#include "nerve/curves.hpp"

#include <string>
#include <vector>

namespace nerve::corpus {

struct Shape {
    std::string name;
    CurveSet curves;
};

/// Twelve edges of the axis-aligned box [lo, hi].
CurveSet box_wireframe(const Vec3& lo, const Vec3& hi);

/// Synthetic CAD-like edge sets: box wireframes, circles at varied
/// orientations, open cubic B-splines, junction shapes and mixed models.
std::vector<Shape> restoration_shapes();

/// Pairs of near-parallel curves closer than one cube at resolution 32.
std::vector<Shape> close_pair_shapes();

}  // namespace nerve::corpus
