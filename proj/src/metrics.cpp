#include "nerve/metrics.hpp"

#include "nerve/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nerve {

namespace {

double squared_distance(const Vec3& p, const Vec3& q) {
    const double dx = p.x() - q.x();
    const double dy = p.y() - q.y();
    const double dz = p.z() - q.z();
    return dx * dx + dy * dy + dz * dz;
}

void require_nonempty(std::span<const Vec3> x, std::span<const Vec3> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("point-set metric needs two nonempty sets");
}

std::vector<double> directed_min_sq(std::span<const Vec3> from, std::span<const Vec3> to) {
    const NearestNeighbors index(to);
    std::vector<double> out;
    out.reserve(from.size());
    for (const auto& p : from) out.push_back(index.min_squared_distance(p));
    return out;
}

double mean_in_order(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

}  // namespace

NearestNeighbors::NearestNeighbors(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    if (points_.empty()) return;
    Vec3 lo = points_.front();
    Vec3 hi = points_.front();
    for (const auto& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 span = (hi - lo).cwiseMax(1e-12);
    // About two points per occupied cell for curve-like sets.
    const double target_cells = std::max(1.0, static_cast<double>(points_.size()) / 2.0);
    const double volume = span.x() * span.y() * span.z();
    cell_ = std::max({std::cbrt(volume / target_cells), span.maxCoeff() / 256.0, 1e-9});
    origin_ = lo;
    for (int a = 0; a < 3; ++a) dims_[a] = std::max(1, static_cast<int>(std::floor(span[a] / cell_)) + 1);

    const std::size_t ncell = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
    std::vector<std::size_t> cell_of(points_.size());
    std::vector<std::size_t> counts(ncell + 1, 0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        std::size_t c = 0;
        for (int a = 0; a < 3; ++a) {
            const int idx = std::clamp(static_cast<int>((points_[i][a] - origin_[a]) / cell_), 0, dims_[a] - 1);
            c = c * dims_[a] + idx;
        }
        cell_of[i] = c;
        ++counts[c + 1];
    }
    for (std::size_t c = 0; c < ncell; ++c) counts[c + 1] += counts[c];
    cell_start_ = counts;
    order_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) order_[counts[cell_of[i]]++] = i;
}

double NearestNeighbors::min_squared_distance(const Vec3& q) const {
    if (points_.empty()) throw std::invalid_argument("nearest neighbor query on an empty set");
    int home[3];
    for (int a = 0; a < 3; ++a) home[a] = std::clamp(static_cast<int>(std::floor((q[a] - origin_[a]) / cell_)), 0, dims_[a] - 1);
    // Lower bound on the distance from q to any cell outside the current shell.
    Vec3 outside = Vec3::Zero();
    for (int a = 0; a < 3; ++a) {
        const double lo = origin_[a];
        const double hi = origin_[a] + dims_[a] * cell_;
        outside[a] = q[a] < lo ? lo - q[a] : (q[a] > hi ? q[a] - hi : 0.0);
    }
    const double base_sq = outside.squaredNorm();
    const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= max_ring; ++ring) {
        for (int di = -ring; di <= ring; ++di) {
            const int i = home[0] + di;
            if (i < 0 || i >= dims_[0]) continue;
            for (int dj = -ring; dj <= ring; ++dj) {
                const int j = home[1] + dj;
                if (j < 0 || j >= dims_[1]) continue;
                const bool edge = std::abs(di) == ring || std::abs(dj) == ring;
                for (int dk = -ring; dk <= ring; ++dk) {
                    if (!edge && std::abs(dk) != ring) continue;
                    const int k = home[2] + dk;
                    if (k < 0 || k >= dims_[2]) continue;
                    const std::size_t c = (static_cast<std::size_t>(i) * dims_[1] + j) * dims_[2] + k;
                    for (std::size_t s = cell_start_[c]; s < cell_start_[c + 1]; ++s) {
                        best = std::min(best, squared_distance(q, points_[order_[s]]));
                    }
                }
            }
        }
        // Points beyond this shell are at least ring * cell_ away along one axis,
        // on top of the gap between q and the bucket box.
        const double reach_sq = base_sq + (ring * cell_) * (ring * cell_);
        if (best <= reach_sq * (1.0 - 1e-12)) break;
    }
    return best;
}

double chamfer(std::span<const Vec3> x, std::span<const Vec3> y) {
    require_nonempty(x, y);
    return mean_in_order(directed_min_sq(x, y)) + mean_in_order(directed_min_sq(y, x));
}

double hausdorff_avg(std::span<const Vec3> x, std::span<const Vec3> y) {
    require_nonempty(x, y);
    const auto xy = directed_min_sq(x, y);
    const auto yx = directed_min_sq(y, x);
    return 0.5 * (std::sqrt(*std::max_element(xy.begin(), xy.end())) + std::sqrt(*std::max_element(yx.begin(), yx.end())));
}

CurveDistance point_set_distance(std::span<const Vec3> x, std::span<const Vec3> y) {
    require_nonempty(x, y);
    const auto xy = directed_min_sq(x, y);
    const auto yx = directed_min_sq(y, x);
    return {mean_in_order(xy) + mean_in_order(yx),
            0.5 * (std::sqrt(*std::max_element(xy.begin(), xy.end())) + std::sqrt(*std::max_element(yx.begin(), yx.end())))};
}

PointList sample_curveset(const CurveSet& set, int samples_per_curve) {
    PointList out;
    for (const auto& c : set.curves) {
        const auto s = sample_uniform(c, samples_per_curve);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

CurveDistance curve_cd(std::span<const ParametricCurve> fitted, const CurveSet& gt, int samples_per_curve) {
    CurveSet as_set;
    for (const auto& f : fitted) as_set.curves.push_back(f.as_curve());
    return curve_cd(as_set, gt, samples_per_curve);
}

CurveDistance curve_cd(const CurveSet& fitted, const CurveSet& gt, int samples_per_curve) {
    if (fitted.curves.empty() || gt.curves.empty()) throw std::invalid_argument("curve distance needs curves on both sides");
    const auto x = sample_curveset(fitted, samples_per_curve);
    const auto y = sample_curveset(gt, samples_per_curve);
    return point_set_distance(x, y);
}

GridReport grid_report(const NerveGrid& pred, const NerveGrid& gt, const CubeMask& occupancy_mask,
                       const CubeMask& orientation_mask, const CubeMask& point_mask) {
    const int r = gt.resolution();
    if (pred.resolution() != r || occupancy_mask.resolution() != r || orientation_mask.resolution() != r ||
        point_mask.resolution() != r) {
        throw std::invalid_argument("grid report: resolution mismatch");
    }
    std::size_t tp = 0, fp = 0, fn = 0, e_total = 0, e_correct = 0, p_total = 0;
    double p_sum = 0.0;
    for (std::size_t l = 0; l < gt.cube_count(); ++l) {
        const CubeIndex c = gt.cube_index(l);
        if (occupancy_mask[l]) {
            const bool po = pred.occupied(l);
            const bool go = gt.occupied(l);
            tp += po && go;
            fp += po && !go;
            fn += !po && go;
        }
        if (orientation_mask[l]) {
            ++e_total;
            bool ok = true;
            for (int a = 0; a < 3; ++a) ok = ok && pred.orientation(c, a) == gt.orientation(c, a);
            e_correct += ok;
        }
        if (point_mask[l]) {
            ++p_total;
            p_sum += (pred.point(l) - gt.point(l)).norm();
        }
    }
    GridReport report;
    if (tp + fn > 0) report.recall_occupancy = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (tp + fp > 0) report.precision_occupancy = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (e_total > 0) report.orientation_correct = static_cast<double>(e_correct) / static_cast<double>(e_total);
    if (p_total > 0) report.point_distance = p_sum / static_cast<double>(p_total);
    return report;
}

GridReport grid_report(const NerveGrid& pred, const NerveGrid& gt, bool predicted_masks) {
    if (pred.resolution() != gt.resolution()) throw std::invalid_argument("grid report: resolution mismatch");
    CubeMask all(gt.resolution());
    for (std::size_t l = 0; l < all.size(); ++l) all.set_linear(l);
    const CubeMask edge_mask = predicted_masks ? pred.occupancy_mask() : gt.occupancy_mask();
    return grid_report(pred, gt, all, edge_mask, edge_mask);
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json("undefined");
}

std::string optional_csv(const std::optional<double>& v) {
    if (!v) return "undefined";
    std::ostringstream s;
    s.precision(17);
    s << *v;
    return s.str();
}

}  // namespace

nlohmann::json report_to_json(const GridReport& grid, const std::optional<CurveDistance>& curves) {
    return {{"R_o", optional_json(grid.recall_occupancy)},
            {"P_o", optional_json(grid.precision_occupancy)},
            {"C_e", optional_json(grid.orientation_correct)},
            {"D_p", optional_json(grid.point_distance)},
            {"CD", curves ? nlohmann::json(curves->cd) : nlohmann::json("undefined")},
            {"HD", curves ? nlohmann::json(curves->hd) : nlohmann::json("undefined")}};
}

std::string report_to_csv(const GridReport& grid, const std::optional<CurveDistance>& curves) {
    std::ostringstream s;
    s << "R_o,P_o,C_e,D_p,CD,HD\n"
      << optional_csv(grid.recall_occupancy) << ',' << optional_csv(grid.precision_occupancy) << ','
      << optional_csv(grid.orientation_correct) << ',' << optional_csv(grid.point_distance) << ','
      << optional_csv(curves ? std::optional<double>(curves->cd) : std::nullopt) << ','
      << optional_csv(curves ? std::optional<double>(curves->hd) : std::nullopt) << '\n';
    return s.str();
}

}  // namespace nerve
