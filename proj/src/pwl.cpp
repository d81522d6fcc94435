#include "nerve/pwl.hpp"

#include "nerve/curves.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace nerve {

VertexId PwlGraph::add_vertex(const CubeIndex& cube, const Vec3& position) {
    vertices_.push_back({cube, position});
    adjacency_.emplace_back();
    return vertices_.size() - 1;
}

bool PwlGraph::add_edge(VertexId a, VertexId b) {
    if (a >= vertices_.size() || b >= vertices_.size()) throw std::out_of_range("edge vertex out of range");
    if (a == b || has_edge(a, b)) return false;
    auto& na = adjacency_[a];
    auto& nb = adjacency_[b];
    na.insert(std::lower_bound(na.begin(), na.end(), b), b);
    nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
    ++edge_count_;
    return true;
}

bool PwlGraph::remove_edge(VertexId a, VertexId b) {
    if (!has_edge(a, b)) return false;
    auto& na = adjacency_[a];
    auto& nb = adjacency_[b];
    na.erase(std::lower_bound(na.begin(), na.end(), b));
    nb.erase(std::lower_bound(nb.begin(), nb.end(), a));
    --edge_count_;
    return true;
}

bool PwlGraph::has_edge(VertexId a, VertexId b) const {
    if (a >= vertices_.size() || b >= vertices_.size()) return false;
    const auto& na = adjacency_[a];
    return std::binary_search(na.begin(), na.end(), b);
}

std::vector<EdgeKey> PwlGraph::edges() const {
    std::vector<EdgeKey> out;
    out.reserve(edge_count_);
    for (VertexId a = 0; a < adjacency_.size(); ++a)
        for (VertexId b : adjacency_[a])
            if (a < b) out.emplace_back(a, b);
    return out;
}

PointList PwlGraph::positions() const {
    PointList out;
    out.reserve(vertices_.size());
    for (const auto& v : vertices_) out.push_back(v.position);
    return out;
}

void PwlGraph::remove_isolated_vertices() {
    std::vector<VertexId> remap(vertices_.size(), 0);
    std::vector<PwlVertex> kept;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
        remap[v] = kept.size();
        if (!adjacency_[v].empty()) kept.push_back(vertices_[v]);
    }
    std::vector<std::vector<VertexId>> adj;
    for (VertexId v = 0; v < vertices_.size(); ++v) {
        if (adjacency_[v].empty()) continue;
        auto n = adjacency_[v];
        for (auto& x : n) x = remap[x];
        adj.push_back(std::move(n));
    }
    vertices_ = std::move(kept);
    adjacency_ = std::move(adj);
}

PwlExtraction extract_pwl(const NerveGrid& grid) {
    PwlExtraction out;
    const std::size_t n = grid.cube_count();
    std::vector<VertexId> vertex_of(n, static_cast<VertexId>(-1));
    for (std::size_t l = 0; l < n; ++l) {
        if (grid.occupied(l)) vertex_of[l] = out.graph.add_vertex(grid.cube_index(l), grid.point(l));
    }
    for (std::size_t l = 0; l < n; ++l) {
        const CubeIndex c = grid.cube_index(l);
        for (int axis = 0; axis < 3; ++axis) {
            if (c[axis] == 0 || !grid.orientation(c, axis)) continue;
            CubeIndex nb = c;
            nb[axis] -= 1;
            const auto ln = grid.linear_index(nb);
            if (grid.occupied(l) && grid.occupied(ln)) {
                out.graph.add_edge(vertex_of[ln], vertex_of[l]);
            } else {
                out.inconsistencies.push_back({c, axis});
            }
        }
    }
    return out;
}

std::vector<VertexId> endpoints(const PwlGraph& graph) {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < graph.vertex_count(); ++v)
        if (graph.degree(v) > 2) out.push_back(v);
    return out;
}

std::vector<CurvePath> trace_paths(const PwlGraph& graph) {
    std::set<EdgeKey> used;
    auto key = [](VertexId a, VertexId b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; };
    auto other = [&](VertexId at, VertexId from) {
        const auto& nb = graph.neighbors(at);
        return nb[0] == from ? nb[1] : nb[0];
    };

    std::vector<CurvePath> paths;
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        if (graph.degree(v) == 2) continue;
        for (VertexId first : graph.neighbors(v)) {
            if (used.count(key(v, first))) continue;
            CurvePath path{{v, first}, false};
            used.insert(key(v, first));
            VertexId prev = v;
            VertexId cur = first;
            while (graph.degree(cur) == 2 && cur != v) {
                const VertexId next = other(cur, prev);
                used.insert(key(cur, next));
                path.vertices.push_back(next);
                prev = cur;
                cur = next;
            }
            paths.push_back(std::move(path));
        }
    }
    for (VertexId v = 0; v < graph.vertex_count(); ++v) {
        if (graph.degree(v) != 2) continue;
        const VertexId first = graph.neighbors(v)[0];
        if (used.count(key(v, first))) continue;
        CurvePath path{{v}, true};
        used.insert(key(v, first));
        VertexId prev = v;
        VertexId cur = first;
        while (cur != v) {
            path.vertices.push_back(cur);
            const VertexId next = other(cur, prev);
            used.insert(key(cur, next));
            prev = cur;
            cur = next;
        }
        paths.push_back(std::move(path));
    }
    return paths;
}

std::vector<std::vector<VertexId>> connected_components(const PwlGraph& graph) {
    std::vector<std::vector<VertexId>> out;
    std::vector<bool> seen(graph.vertex_count(), false);
    for (VertexId s = 0; s < graph.vertex_count(); ++s) {
        if (seen[s]) continue;
        std::vector<VertexId> comp;
        std::vector<VertexId> stack{s};
        seen[s] = true;
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (VertexId n : graph.neighbors(v)) {
                if (!seen[n]) {
                    seen[n] = true;
                    stack.push_back(n);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

PointList sample_pwl_midpoints(const PwlGraph& graph) {
    PointList out;
    for (const auto& [a, b] : graph.edges()) out.push_back(0.5 * (graph.position(a) + graph.position(b)));
    return out;
}

PointList path_points(const CurvePath& path, const PwlGraph& graph) {
    PointList out;
    out.reserve(path.vertices.size());
    for (VertexId v : path.vertices) out.push_back(graph.position(v));
    return out;
}

std::string write_obj(const PwlGraph& graph) {
    std::string out;
    char buf[128];
    for (const auto& v : graph.vertices()) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.position.x(), v.position.y(), v.position.z());
        out += buf;
    }
    for (const auto& [a, b] : graph.edges()) {
        std::snprintf(buf, sizeof buf, "l %zu %zu\n", a + 1, b + 1);
        out += buf;
    }
    return out;
}

PathSet make_pathset(const PwlGraph& graph, const std::vector<CurvePath>& paths) {
    return {graph.positions(), paths};
}

nlohmann::json pathset_to_json(const PathSet& set) {
    auto verts = nlohmann::json::array();
    for (const auto& p : set.vertices) verts.push_back(vec_to_json(p));
    auto paths = nlohmann::json::array();
    for (const auto& p : set.paths) paths.push_back({{"vertices", p.vertices}, {"closed", p.closed}});
    return {{"vertices", verts}, {"paths", paths}};
}

PathSet pathset_from_json(const nlohmann::json& j) {
    try {
        PathSet set;
        for (const auto& v : j.at("vertices")) set.vertices.push_back(vec_from_json(v));
        for (const auto& p : j.at("paths")) {
            CurvePath path{p.at("vertices").get<std::vector<VertexId>>(), p.value("closed", false)};
            for (VertexId v : path.vertices)
                if (v >= set.vertices.size()) throw FormatError("path references a missing vertex");
            set.paths.push_back(std::move(path));
        }
        return set;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("paths JSON: ") + e.what());
    }
}

}  // namespace nerve
