#pragma once

#include "nerve/pwl.hpp"

#include <numbers>

namespace nerve {

/// Thresholds of the three-step PWL cleanup.
struct RefineParams {
    double delta_r = 0.0;  ///< max distance between two degree-1 tips to reconnect
    int n_p = 5;           ///< dangling paths with fewer vertices are removed
    double delta_p = 0.0;  ///< Chamfer threshold below which parallel paths are duplicates
    double tangent_consistency = std::numbers::sqrt2;
    bool brep_strict = false;  ///< also remove long dangling paths

    /// delta_r = 4l, N_p = 5, delta_p = 2l, consistency sqrt(2), brep_strict off.
    static RefineParams defaults(double edge_length);
    static RefineParams for_resolution(int resolution);

    /// Throws std::invalid_argument if any threshold is out of range.
    void validate() const;
};

/// Unit tangent at a degree-1 vertex, pointing out of its chain into free
/// space; fitted over up to three chain vertices.
Vec3 tip_tangent(const PwlGraph& graph, VertexId tip);

/// t1.t2 + t2.t3 for tips p1, p2: t1 outward at p1, t2 = unit(p2 - p1),
/// t3 the chain direction continuing from p2 (inward at p2).
double tip_consistency(const PwlGraph& graph, VertexId p1, VertexId p2);

/// Joins pairs of degree-1 tips closer than delta_r whose tangents are
/// consistent; nearest pairs first, each tip used at most once.
PwlGraph reconnect(const PwlGraph& graph, const RefineParams& params);

/// Removes dangling paths with fewer than N_p vertices (all dangling paths if
/// brep_strict) and isolated vertices, repeating until nothing changes.
PwlGraph remove_spurs(const PwlGraph& graph, const RefineParams& params);

/// Deletes all but one of several open paths that share both endpoints and
/// lie within delta_p (Chamfer) of each other. The path with the smallest
/// vertex sequence survives.
PwlGraph dedupe_multipaths(const PwlGraph& graph, const RefineParams& params);

/// reconnect -> remove_spurs -> dedupe_multipaths, repeated until the graph
/// stops changing.
PwlGraph refine(const PwlGraph& graph, const RefineParams& params);

}  // namespace nerve
