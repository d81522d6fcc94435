#include "nerve/voxelize.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace nerve {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

constexpr double kParamMergeTolerance = 1e-12;

bool on_domain_boundary(const Vec3& p) { return (p.array().abs() == 1.0).any(); }

void drop_repeats(PointList& v) {
    v.erase(std::unique(v.begin(), v.end(), [](const Vec3& x, const Vec3& y) { return x == y; }), v.end());
}

/// Control points of the second derivative: R_i spans u_{i+2} .. u_{i+p+1}.
PointList second_derivative_points(const BSplineCurve& c) {
    const int p = c.degree;
    const auto& P = c.control_points;
    const auto& u = c.knots;
    PointList Q, R;
    for (std::size_t i = 0; i + 1 < P.size(); ++i) {
        const double du = u[i + p + 1] - u[i + 1];
        Q.push_back(du > 0.0 ? Vec3(p * (P[i + 1] - P[i]) / du) : Vec3::Zero());
    }
    for (std::size_t i = 0; i + 1 < Q.size(); ++i) {
        const double du = u[i + p + 1] - u[i + 2];
        R.push_back(du > 0.0 ? Vec3((p - 1) * (Q[i + 1] - Q[i]) / du) : Vec3::Zero());
    }
    return R;
}

/// Index of the single axis along which two cubes are face neighbors, -1 otherwise.
int shared_face_axis(const CubeIndex& a, const CubeIndex& b) {
    int axis = -1;
    for (int d = 0; d < 3; ++d) {
        const int diff = std::abs(a[d] - b[d]);
        if (diff == 0) continue;
        if (diff > 1 || axis >= 0) return -1;
        axis = d;
    }
    return axis;
}

double run_length(const PointList& run) {
    double len = 0.0;
    for (std::size_t i = 1; i < run.size(); ++i) len += (run[i] - run[i - 1]).norm();
    return len;
}

Vec3 run_midpoint(const PointList& run) {
    const double half = 0.5 * run_length(run);
    if (half == 0.0) return run.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < run.size(); ++i) {
        const double seg = (run[i] - run[i - 1]).norm();
        if (acc + seg >= half && seg > 0.0) return run[i - 1] + ((half - acc) / seg) * (run[i] - run[i - 1]);
        acc += seg;
    }
    return run.back();
}

std::optional<Vec3> unit_direction(const Vec3& a, const Vec3& b) {
    const Vec3 d = b - a;
    const double n = d.norm();
    if (n == 0.0) return std::nullopt;
    return d / n;
}

/// A maximal stretch of one sampled curve inside a single cube.
struct Run {
    CubeIndex cube;
    PointList points;  ///< a single point marks a lone endpoint
    bool starts_at_crossing = true;
    bool ends_at_crossing = true;
};

}  // namespace

PointRule PointRule::parse(const std::string& text) {
    if (text == "midpoint") return midpoint();
    if (text == "qef") return qef();
    if (text.rfind("qef:", 0) == 0) {
        std::size_t used = 0;
        double lambda = 0.0;
        try {
            lambda = std::stod(text.substr(4), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() - 4 || !(lambda >= 0.0))
            throw std::invalid_argument("bad QEF weight in point rule: " + text);
        return qef(lambda);
    }
    throw std::invalid_argument("unknown point rule: " + text + " (expected midpoint or qef:<lambda>)");
}

std::string PointRule::to_string() const {
    if (kind == Kind::Midpoint) return "midpoint";
    std::ostringstream s;
    s << "qef:" << lambda;
    return s.str();
}

double default_chord_tolerance(int resolution) { return edge_length(resolution) / 100.0; }

Polyline sample_curve(const Curve& curve, double chord_tolerance) {
    if (!(chord_tolerance > 0.0)) throw std::invalid_argument("chord tolerance must be positive");
    validate_curve(curve);
    return std::visit(
        overloaded{
            [](const LineSegment& c) { return Polyline{{c.a, c.b}, false}; },
            [&](const Circle3D& c) {
                // Sagitta of a chord spanning angle da is radius * (1 - cos(da / 2)).
                const double ratio = std::clamp(1.0 - chord_tolerance / c.radius, -1.0, 1.0);
                const double max_step = 2.0 * std::acos(ratio);
                const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi / max_step)));
                const auto [u, v] = circle_frame(c.normal);
                Polyline out{{}, true};
                out.vertices.reserve(n + 1);
                for (int i = 0; i < n; ++i) {
                    const double angle = 2.0 * std::numbers::pi * i / n;
                    out.vertices.push_back(c.center + c.radius * (std::cos(angle) * u + std::sin(angle) * v));
                }
                out.vertices.push_back(out.vertices.front());
                return out;
            },
            [&](const BSplineCurve& c) {
                // On one knot span the curve is a polynomial whose distance to
                // its chord over a parameter step h is at most h^2/8 max|C''|,
                // and C'' stays in the hull of the span's active R points.
                const int n = static_cast<int>(c.control_points.size());
                const int p = c.degree;
                const auto R = p >= 2 ? second_derivative_points(c) : PointList{};
                Polyline out{{bspline::evaluate(c, c.knots[p])}, false};
                for (int s = p; s < n; ++s) {
                    const double t0 = c.knots[s], t1 = c.knots[s + 1];
                    if (t1 <= t0) continue;
                    double bend = 0.0;
                    for (int i = s - p; i <= s - 2; ++i) bend = std::max(bend, R[i].norm());
                    int pieces = 1;
                    if (bend > 0.0)
                        pieces = std::max(1, static_cast<int>(std::ceil((t1 - t0) / std::sqrt(8.0 * chord_tolerance / bend))));
                    for (int q = 1; q <= pieces; ++q)
                        out.vertices.push_back(bspline::evaluate(c, q == pieces ? t1 : t0 + (t1 - t0) * q / pieces));
                }
                drop_repeats(out.vertices);
                if (out.vertices.size() < 2) throw std::invalid_argument("bspline: degenerate curve");
                return out;
            },
            [](const Polyline& c) {
                Polyline out = c;
                drop_repeats(out.vertices);
                if (c.closed) {
                    if (out.vertices.front() != out.vertices.back()) out.vertices.push_back(out.vertices.front());
                    if (out.vertices.size() < 3) throw std::invalid_argument("polyline: degenerate closed polyline");
                }
                return out;
            },
        },
        curve);
}

std::vector<WalkStep> segment_walk(const Vec3& a, const Vec3& b, int resolution) {
    check_resolution(resolution);
    std::vector<double> ts;
    for (int d = 0; d < 3; ++d) {
        if (a[d] == b[d]) continue;
        const double lo = std::min(a[d], b[d]);
        const double hi = std::max(a[d], b[d]);
        for (int m = 1; m < resolution; ++m) {
            const double plane = cell_min(m, resolution);
            if (plane <= lo || plane >= hi) continue;
            const double t = (plane - a[d]) / (b[d] - a[d]);
            if (t > 0.0 && t < 1.0) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    std::vector<double> bounds{0.0};
    for (double t : ts) {
        if (t - bounds.back() > kParamMergeTolerance && 1.0 - t > kParamMergeTolerance) bounds.push_back(t);
    }
    bounds.push_back(1.0);

    std::vector<WalkStep> steps;
    for (std::size_t s = 1; s < bounds.size(); ++s) {
        const double tm = 0.5 * (bounds[s - 1] + bounds[s]);
        const CubeIndex cube = cell_of(a + tm * (b - a), resolution);
        if (!steps.empty() && steps.back().cube == cube) {
            steps.back().t_exit = bounds[s];
        } else {
            steps.push_back({cube, bounds[s - 1], bounds[s]});
        }
    }
    return steps;
}

Vec3 cube_point_midpoint(const CubeTruncation& trunc) {
    if (!trunc.endpoints.empty()) {
        Vec3 sum = Vec3::Zero();
        for (const auto& e : trunc.endpoints) sum += e;
        return sum / static_cast<double>(trunc.endpoints.size());
    }
    if (trunc.runs.empty()) throw std::invalid_argument("empty cube truncation");
    Vec3 sum = Vec3::Zero();
    for (const auto& run : trunc.runs) {
        if (run.empty()) throw std::invalid_argument("empty run in cube truncation");
        sum += run_midpoint(run);
    }
    return sum / static_cast<double>(trunc.runs.size());
}

Vec3 cube_point_qef(std::span<const FaceCrossing> crossings, double lambda, const Box& cube) {
    if (crossings.empty()) throw std::invalid_argument("QEF needs at least one face crossing");
    if (!(lambda >= 0.0)) throw std::invalid_argument("QEF weight must be nonnegative");
    // Eliminating a_i = t_i.(x - p_i) / (1 + lambda) leaves
    // sum_i (x - p_i)^T (I - t_i t_i^T / (1 + lambda)) (x - p_i).
    Eigen::Matrix3d system = Eigen::Matrix3d::Zero();
    Vec3 rhs = Vec3::Zero();
    for (const auto& c : crossings) {
        const Vec3 t = c.tangent.normalized();
        const Eigen::Matrix3d A = Eigen::Matrix3d::Identity() - t * t.transpose() / (1.0 + lambda);
        system += A;
        rhs += A * c.position;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(system);
    const auto& ev = eig.eigenvalues();
    if (ev.minCoeff() <= 1e-12 * ev.maxCoeff()) {
        throw std::invalid_argument("QEF system is singular (parallel tangents); use lambda > 0");
    }
    const Vec3 x = eig.eigenvectors() * ((eig.eigenvectors().transpose() * rhs).array() / ev.array()).matrix();
    return cube.clamp(x);
}

std::size_t Voxelization::junction_cubes() const {
    return static_cast<std::size_t>(
        std::count_if(truncations.begin(), truncations.end(), [](const auto& t) { return t.curve_ids.size() >= 2; }));
}

double Voxelization::junction_fraction() const {
    return truncations.empty() ? 0.0 : static_cast<double>(junction_cubes()) / truncations.size();
}

Voxelization voxelize_detailed(const CurveSet& curves, int resolution, const VoxelizeOptions& options) {
    check_resolution(resolution);
    validate_curveset(curves);
    const double tol = options.chord_tolerance > 0.0 ? options.chord_tolerance : default_chord_tolerance(resolution);

    Voxelization result{NerveGrid(resolution), {}, 0};
    NerveGrid& grid = result.grid;
    std::map<std::size_t, CubeTruncation> truncs;

    for (std::size_t id = 0; id < curves.curves.size(); ++id) {
        const Polyline poly = sample_curve(curves.curves[id], tol);
        const PointList& V = poly.vertices;
        const bool closed = poly.closed;

        std::vector<Run> runs;
        for (std::size_t s = 0; s + 1 < V.size(); ++s) {
            const Vec3& a = V[s];
            const Vec3& b = V[s + 1];
            if (a == b) continue;
            for (const auto& step : segment_walk(a, b, resolution)) {
                const Vec3 exit = step.t_exit == 1.0 ? b : Vec3(a + step.t_exit * (b - a));
                if (!runs.empty() && runs.back().cube == step.cube) {
                    runs.back().points.push_back(exit);
                } else {
                    const Vec3 entry = step.t_enter == 0.0 ? a : Vec3(a + step.t_enter * (b - a));
                    runs.push_back({step.cube, {entry, exit}});
                }
            }
        }
        if (runs.empty()) continue;

        std::vector<Vec3> endpoints_here;
        if (closed) {
            if (runs.size() > 1 && runs.front().cube == runs.back().cube) {
                auto merged = std::move(runs.back().points);
                merged.insert(merged.end(), runs.front().points.begin() + 1, runs.front().points.end());
                runs.front().points = std::move(merged);
                runs.pop_back();
            } else if (runs.size() == 1) {
                runs.front().starts_at_crossing = runs.front().ends_at_crossing = false;
            }
        } else {
            // An endpoint belongs to its tie-break cube; when that differs from
            // the cube the curve runs through, it becomes a lone-endpoint cube.
            // Endpoints on the outer domain boundary are treated as plain exits.
            const Vec3 first = V.front();
            const Vec3 last = V.back();
            if (!on_domain_boundary(last)) {
                const CubeIndex c = cell_of(last, resolution);
                if (c == runs.back().cube) {
                    runs.back().ends_at_crossing = false;
                } else {
                    runs.push_back({c, {last}, false, false});
                }
            } else {
                runs.back().ends_at_crossing = false;
            }
            if (!on_domain_boundary(first)) {
                const CubeIndex c = cell_of(first, resolution);
                if (c == runs.front().cube) {
                    runs.front().starts_at_crossing = false;
                } else {
                    runs.insert(runs.begin(), Run{c, {first}, false, false});
                }
            } else {
                runs.front().starts_at_crossing = false;
            }
        }

        for (std::size_t r = 0; r < runs.size(); ++r) {
            const Run& run = runs[r];
            const auto lin = grid.linear_index(run.cube);
            auto& t = truncs[lin];
            t.cube = run.cube;
            if (t.curve_ids.empty() || t.curve_ids.back() != static_cast<int>(id)) t.curve_ids.push_back(static_cast<int>(id));
            grid.set_occupied(run.cube, true);
            if (run.points.size() == 1) {
                t.endpoints.push_back(run.points.front());
                continue;
            }
            t.runs.push_back(run.points);
            if (!closed && r == 0 && !run.starts_at_crossing && !on_domain_boundary(V.front())) t.endpoints.push_back(V.front());
            if (!closed && r + 1 == runs.size() && !run.ends_at_crossing && !on_domain_boundary(V.back()))
                t.endpoints.push_back(V.back());
            if (run.starts_at_crossing) {
                if (auto dir = unit_direction(run.points[0], run.points[1])) t.crossings.push_back({run.points[0], *dir});
            }
            if (run.ends_at_crossing) {
                const auto n = run.points.size();
                if (auto dir = unit_direction(run.points[n - 2], run.points[n - 1]))
                    t.crossings.push_back({run.points[n - 1], *dir});
            }
        }

        auto link = [&](const CubeIndex& x, const CubeIndex& y) {
            if (x == y) return;
            const int axis = shared_face_axis(x, y);
            if (axis < 0) {
                ++result.corner_steps;
                return;
            }
            grid.set_orientation(x[axis] > y[axis] ? x : y, axis, true);
        };
        for (std::size_t r = 1; r < runs.size(); ++r) link(runs[r - 1].cube, runs[r].cube);
        if (closed && runs.size() > 1) link(runs.back().cube, runs.front().cube);
    }

    result.truncations.reserve(truncs.size());
    for (auto& [lin, t] : truncs) {
        std::sort(t.curve_ids.begin(), t.curve_ids.end());
        t.curve_ids.erase(std::unique(t.curve_ids.begin(), t.curve_ids.end()), t.curve_ids.end());
        const Box box = grid.extent(t.cube);
        Vec3 p;
        if (options.rule.kind == PointRule::Kind::Qef && !t.crossings.empty()) {
            p = cube_point_qef(t.crossings, options.rule.lambda, box);
        } else {
            p = cube_point_midpoint(t);
        }
        grid.set_point(t.cube, box.clamp(p));
        result.truncations.push_back(std::move(t));
    }
    return result;
}

NerveGrid voxelize(const CurveSet& curves, int resolution, const VoxelizeOptions& options) {
    return voxelize_detailed(curves, resolution, options).grid;
}

}  // namespace nerve
