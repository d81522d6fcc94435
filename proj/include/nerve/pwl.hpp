#pragma once

#include "nerve/grid.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace nerve {

struct PwlVertex {
    CubeIndex cube;
    Vec3 position = Vec3::Zero();

    friend bool operator==(const PwlVertex&, const PwlVertex&) = default;
};

using VertexId = std::size_t;
using EdgeKey = std::pair<VertexId, VertexId>;  ///< first < second

/// Undirected simple graph of edge points: the piece-wise linear curve form.
class PwlGraph {
public:
    VertexId add_vertex(const CubeIndex& cube, const Vec3& position);
    /// Returns false (and does nothing) for self-loops and existing edges.
    bool add_edge(VertexId a, VertexId b);
    bool remove_edge(VertexId a, VertexId b);
    bool has_edge(VertexId a, VertexId b) const;

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    bool empty() const { return vertices_.empty(); }

    const PwlVertex& vertex(VertexId v) const { return vertices_.at(v); }
    const Vec3& position(VertexId v) const { return vertices_.at(v).position; }
    const std::vector<PwlVertex>& vertices() const { return vertices_; }
    /// Sorted neighbor list.
    const std::vector<VertexId>& neighbors(VertexId v) const { return adjacency_.at(v); }
    std::size_t degree(VertexId v) const { return adjacency_.at(v).size(); }

    /// All edges as (a, b) with a < b, sorted.
    std::vector<EdgeKey> edges() const;
    PointList positions() const;

    /// Drops degree-0 vertices, keeping the relative order of the rest.
    void remove_isolated_vertices();

    friend bool operator==(const PwlGraph&, const PwlGraph&) = default;

private:
    std::vector<PwlVertex> vertices_;
    std::vector<std::vector<VertexId>> adjacency_;
    std::size_t edge_count_ = 0;
};

/// A true orientation flag that does not join two occupied cubes.
struct FlagInconsistency {
    CubeIndex cube;
    int axis = 0;
};

struct PwlExtraction {
    PwlGraph graph;
    std::vector<FlagInconsistency> inconsistencies;
};

/// Ordered vertex sequence between two vertices of degree != 2, or a cycle of
/// degree-2 vertices (first vertex not repeated at the end).
struct CurvePath {
    std::vector<VertexId> vertices;
    bool closed = false;

    friend bool operator==(const CurvePath&, const CurvePath&) = default;
};

/// One vertex per occupied cube (ascending linear index), one edge per true
/// inner face joining two occupied cubes. Flags touching an unoccupied cube
/// are reported, not fatal.
PwlExtraction extract_pwl(const NerveGrid& grid);

/// Vertices of degree > 2.
std::vector<VertexId> endpoints(const PwlGraph& graph);

/// Partition of the edge set into paths. Open paths start from vertices of
/// degree != 2 in ascending order (neighbors ascending); the remaining
/// degree-2 cycles follow, also by ascending start vertex.
std::vector<CurvePath> trace_paths(const PwlGraph& graph);

std::vector<std::vector<VertexId>> connected_components(const PwlGraph& graph);

/// Midpoint of every edge, in edges() order.
PointList sample_pwl_midpoints(const PwlGraph& graph);

PointList path_points(const CurvePath& path, const PwlGraph& graph);

/// Wavefront OBJ: "v x y z" per vertex, "l i j" per edge (1-based), %.17g.
std::string write_obj(const PwlGraph& graph);

/// Paths listing consumed by the fit command.
struct PathSet {
    PointList vertices;
    std::vector<CurvePath> paths;
};

nlohmann::json pathset_to_json(const PathSet& set);
PathSet pathset_from_json(const nlohmann::json& j);
PathSet make_pathset(const PwlGraph& graph, const std::vector<CurvePath>& paths);

}  // namespace nerve
