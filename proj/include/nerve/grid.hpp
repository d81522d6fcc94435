#pragma once

#include "nerve/types.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nerve {

inline constexpr int kMinResolution = 2;
inline constexpr int kMaxResolution = 1024;

/// Edge length of one cube for a grid spanning [-1,1] with r segments per axis.
inline double edge_length(int resolution) { return 2.0 / resolution; }

/// Lower coordinate of cell `index` along one axis.
inline double cell_min(int index, int resolution) { return -1.0 + 2.0 * index / resolution; }

/// Axis cell of coordinate x: half-open cells, a value on an internal plane
/// belongs to the higher cell, x = +1 belongs to the last cell.
/// Values outside [-1,1] are clamped into the first/last cell.
int axis_cell(double x, int resolution);

/// Cube containing `p` under the half-open tie-break of axis_cell.
CubeIndex cell_of(const Vec3& p, int resolution);

/// Extent of cube `index`; throws std::out_of_range for indices outside [0, r).
Box cube_extent(const CubeIndex& index, int resolution);

void check_resolution(int resolution);

/// Dense per-cube boolean flags sharing the NerveGrid indexing.
class CubeMask {
public:
    explicit CubeMask(int resolution);

    int resolution() const { return resolution_; }
    std::size_t size() const { return flags_.size(); }

    bool operator[](std::size_t linear) const { return flags_[linear] != 0; }
    bool test(const CubeIndex& c) const;
    void set(const CubeIndex& c, bool value = true);
    void set_linear(std::size_t linear, bool value = true) { flags_.at(linear) = value ? 1 : 0; }
    std::size_t count() const;

    friend bool operator==(const CubeMask&, const CubeMask&) = default;

private:
    int resolution_;
    std::vector<std::uint8_t> flags_;
};

/// Flags every cube containing at least one point. Throws std::invalid_argument
/// for points outside [-1,1]^3.
CubeMask mask_from_points(std::span<const Vec3> points, int resolution);

/// Cubes within `radius` index steps (Chebyshev) of a flagged cube.
CubeMask dilate(const CubeMask& mask, int radius);

/// Resolution-r cube grid of edge occupancy, three face orientations per cube
/// (faces at -x, -y, -z) and one edge point per cube.
///
/// Storage is linear with x as the slowest axis: ((i * r) + j) * r + k.
class NerveGrid {
public:
    /// Empty grid; every point is at its cube center.
    explicit NerveGrid(int resolution);

    int resolution() const { return resolution_; }
    double edge_length() const { return nerve::edge_length(resolution_); }
    std::size_t cube_count() const { return occupancy_.size(); }

    std::size_t linear_index(const CubeIndex& c) const;
    CubeIndex cube_index(std::size_t linear) const;
    bool in_range(const CubeIndex& c) const;

    bool occupied(const CubeIndex& c) const { return occupancy_[linear_index(c)] != 0; }
    bool occupied(std::size_t linear) const { return occupancy_.at(linear) != 0; }
    void set_occupied(const CubeIndex& c, bool value);

    /// Flag on the face of `c` facing -axis (shared with the cube at c - e_axis).
    bool orientation(const CubeIndex& c, int axis) const { return orientation_[3 * linear_index(c) + axis] != 0; }
    /// Throws std::invalid_argument when setting a flag on a grid-boundary face.
    void set_orientation(const CubeIndex& c, int axis, bool value);

    const Vec3& point(const CubeIndex& c) const { return points_[linear_index(c)]; }
    const Vec3& point(std::size_t linear) const { return points_.at(linear); }
    void set_point(const CubeIndex& c, const Vec3& p);

    Box extent(const CubeIndex& c) const { return cube_extent(c, resolution_); }

    std::size_t occupied_count() const;
    std::size_t true_face_count() const;
    CubeMask occupancy_mask() const;

    /// Empty when all invariants hold, otherwise one message per violation
    /// (capped at `limit`).
    std::vector<std::string> violations(std::size_t limit = 16) const;
    void validate() const;

    /// Clears every orientation flag that does not join two occupied cubes.
    void repair();

    friend bool operator==(const NerveGrid&, const NerveGrid&) = default;

private:
    friend std::vector<std::uint8_t> write_grid(const NerveGrid&);
    friend NerveGrid read_grid(std::span<const std::uint8_t>);
    friend NerveGrid grid_from_json(const nlohmann::json&);
    friend nlohmann::json grid_to_json(const NerveGrid&);

    int resolution_;
    std::vector<std::uint8_t> occupancy_;
    std::vector<std::uint8_t> orientation_;
    std::vector<Vec3> points_;
};

/// NERVE1 binary format.
std::vector<std::uint8_t> write_grid(const NerveGrid& grid);
NerveGrid read_grid(std::span<const std::uint8_t> bytes);

NerveGrid load_grid(const std::string& path);
void save_grid(const NerveGrid& grid, const std::string& path);

/// Debug mirror: {"resolution", "occupancy", "orientations", "points"}.
nlohmann::json grid_to_json(const NerveGrid& grid);
NerveGrid grid_from_json(const nlohmann::json& j);

}  // namespace nerve
