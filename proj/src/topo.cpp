#include "nerve/topo.hpp"

#include "nerve/grid.hpp"
#include "nerve/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace nerve {

namespace {

constexpr int kMaxRefineRounds = 32;

void delete_path_edges(PwlGraph& graph, const CurvePath& path) {
    for (std::size_t i = 1; i < path.vertices.size(); ++i) graph.remove_edge(path.vertices[i - 1], path.vertices[i]);
    if (path.closed && path.vertices.size() > 2) graph.remove_edge(path.vertices.back(), path.vertices.front());
}

/// Orientation-independent form used for the lexicographic tie-break.
std::vector<VertexId> canonical(const CurvePath& path) {
    auto fwd = path.vertices;
    auto rev = fwd;
    std::reverse(rev.begin(), rev.end());
    return std::min(fwd, rev);
}

}  // namespace

RefineParams RefineParams::defaults(double edge_length) {
    RefineParams p;
    p.delta_r = 4.0 * edge_length;
    p.n_p = 5;
    p.delta_p = 2.0 * edge_length;
    p.tangent_consistency = std::numbers::sqrt2;
    p.brep_strict = false;
    return p;
}

RefineParams RefineParams::for_resolution(int resolution) {
    check_resolution(resolution);
    return defaults(edge_length(resolution));
}

void RefineParams::validate() const {
    if (!(delta_r > 0.0)) throw std::invalid_argument("delta_r must be positive");
    if (n_p < 2) throw std::invalid_argument("N_p must be at least 2");
    if (!(delta_p > 0.0)) throw std::invalid_argument("delta_p must be positive");
    if (!(tangent_consistency > 0.0 && tangent_consistency <= 2.0))
        throw std::invalid_argument("tangent consistency threshold must be in (0, 2]");
}

Vec3 tip_tangent(const PwlGraph& graph, VertexId tip) {
    if (graph.degree(tip) != 1) throw std::invalid_argument("tip tangent needs a degree-1 vertex");
    const VertexId n1 = graph.neighbors(tip).front();
    const Vec3 p0 = graph.position(tip);
    const Vec3 p1 = graph.position(n1);
    Vec3 coarse = p0 - p1;
    if (graph.degree(n1) == 2) {
        const auto& nb = graph.neighbors(n1);
        const Vec3 p2 = graph.position(nb[0] == tip ? nb[1] : nb[0]);
        if (coarse.norm() == 0.0) coarse = p0 - p2;
        Eigen::Matrix3d pts;
        pts << p0.transpose(), p1.transpose(), p2.transpose();
        const Eigen::RowVector3d mean = pts.colwise().mean();
        const Eigen::Matrix3d centered = pts.rowwise() - mean;
        const Eigen::JacobiSVD<Eigen::Matrix3d> svd(centered, Eigen::ComputeFullV);
        Vec3 dir = svd.matrixV().col(0);
        const double s = dir.dot(coarse);
        if (s != 0.0 && svd.singularValues()(0) > 0.0) return s > 0.0 ? dir : Vec3(-dir);
    }
    const double n = coarse.norm();
    return n > 0.0 ? Vec3(coarse / n) : Vec3::Zero();
}

double tip_consistency(const PwlGraph& graph, VertexId p1, VertexId p2) {
    const Vec3 t1 = tip_tangent(graph, p1);
    const Vec3 t3 = -tip_tangent(graph, p2);
    const Vec3 gap = graph.position(p2) - graph.position(p1);
    const double len = gap.norm();
    const Vec3 t2 = len > 0.0 ? Vec3(gap / len) : t1;
    return t1.dot(t2) + t2.dot(t3);
}

PwlGraph reconnect(const PwlGraph& graph, const RefineParams& params) {
    params.validate();
    std::vector<VertexId> tips;
    for (VertexId v = 0; v < graph.vertex_count(); ++v)
        if (graph.degree(v) == 1) tips.push_back(v);

    std::vector<std::tuple<double, VertexId, VertexId>> candidates;
    for (std::size_t a = 0; a < tips.size(); ++a) {
        for (std::size_t b = a + 1; b < tips.size(); ++b) {
            const VertexId p1 = tips[a];
            const VertexId p2 = tips[b];
            if (graph.has_edge(p1, p2)) continue;
            const double d = (graph.position(p2) - graph.position(p1)).norm();
            if (d >= params.delta_r) continue;
            if (tip_consistency(graph, p1, p2) > params.tangent_consistency) candidates.emplace_back(d, p1, p2);
        }
    }
    std::sort(candidates.begin(), candidates.end());

    PwlGraph out = graph;
    std::vector<bool> used(graph.vertex_count(), false);
    for (const auto& [d, p1, p2] : candidates) {
        if (used[p1] || used[p2]) continue;
        used[p1] = used[p2] = true;
        out.add_edge(p1, p2);
    }
    return out;
}

PwlGraph remove_spurs(const PwlGraph& graph, const RefineParams& params) {
    params.validate();
    PwlGraph out = graph;
    for (;;) {
        // One wave: dangling status is judged on the degrees at the start of the wave.
        std::vector<CurvePath> doomed;
        for (auto& path : trace_paths(out)) {
            if (path.closed) continue;
            const bool dangling = out.degree(path.vertices.front()) == 1 || out.degree(path.vertices.back()) == 1;
            if (dangling && (params.brep_strict || static_cast<int>(path.vertices.size()) < params.n_p))
                doomed.push_back(std::move(path));
        }
        for (const auto& path : doomed) delete_path_edges(out, path);
        const bool changed = !doomed.empty();
        const auto before = out.vertex_count();
        out.remove_isolated_vertices();
        if (!changed && out.vertex_count() == before) break;
    }
    return out;
}

PwlGraph dedupe_multipaths(const PwlGraph& graph, const RefineParams& params) {
    params.validate();
    PwlGraph out = graph;
    for (;;) {
        std::map<EdgeKey, std::vector<CurvePath>> groups;
        for (auto& path : trace_paths(out)) {
            if (path.closed) continue;
            const VertexId a = path.vertices.front();
            const VertexId b = path.vertices.back();
            groups[{std::min(a, b), std::max(a, b)}].push_back(std::move(path));
        }
        // Within a group, paths in canonical order survive unless they lie
        // within delta_p of an earlier survivor. All groups in one sweep, so
        // a bundle of duplicates collapses before it can close into a loop.
        bool removed = false;
        for (auto& [ends, paths] : groups) {
            std::sort(paths.begin(), paths.end(),
                      [](const CurvePath& x, const CurvePath& y) { return canonical(x) < canonical(y); });
            std::vector<PointList> kept;
            for (const auto& path : paths) {
                auto pts = path_points(path, out);
                const bool duplicate = std::any_of(kept.begin(), kept.end(),
                                                   [&](const PointList& k) { return chamfer(k, pts) < params.delta_p; });
                if (duplicate) {
                    delete_path_edges(out, path);
                    removed = true;
                } else {
                    kept.push_back(std::move(pts));
                }
            }
        }
        if (!removed) break;
        out.remove_isolated_vertices();
    }
    return out;
}

PwlGraph refine(const PwlGraph& graph, const RefineParams& params) {
    params.validate();
    PwlGraph current = graph;
    for (int round = 0; round < kMaxRefineRounds; ++round) {
        PwlGraph next = dedupe_multipaths(remove_spurs(reconnect(current, params), params), params);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

}  // namespace nerve
