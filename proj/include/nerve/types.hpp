#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nerve {

using Vec3 = Eigen::Vector3d;
using PointList = std::vector<Vec3>;

/// Base class for every error raised by the library.
class NerveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent serialized data.
class FormatError : public NerveError {
public:
    using NerveError::NerveError;
};

/// Integer coordinates (i, j, k) of a cube in a resolution-r grid.
struct CubeIndex {
    int i = 0;
    int j = 0;
    int k = 0;

    int operator[](int axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
    int& operator[](int axis) { return axis == 0 ? i : (axis == 1 ? j : k); }

    auto operator<=>(const CubeIndex&) const = default;
};

/// Closed axis-aligned box.
struct Box {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();

    bool contains(const Vec3& p) const {
        return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
    }
    Vec3 clamp(const Vec3& p) const { return p.cwiseMax(min).cwiseMin(max); }
    Vec3 center() const { return 0.5 * (min + max); }
};

}  // namespace nerve
