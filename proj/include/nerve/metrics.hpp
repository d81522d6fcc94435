#pragma once

#include "nerve/curves.hpp"
#include "nerve/grid.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nerve {

struct ParametricCurve;

/// Exact nearest-neighbor queries over a fixed point set, bucketed in a uniform grid.
class NearestNeighbors {
public:
    explicit NearestNeighbors(std::span<const Vec3> points);
    /// Smallest squared distance from q to the set, computed as dx*dx + dy*dy + dz*dz.
    double min_squared_distance(const Vec3& q) const;

private:
    std::vector<Vec3> points_;
    Vec3 origin_ = Vec3::Zero();
    double cell_ = 1.0;
    int dims_[3] = {1, 1, 1};
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> order_;
};

/// Symmetric mean of squared nearest-neighbor distances. Throws on empty input.
double chamfer(std::span<const Vec3> x, std::span<const Vec3> y);
/// Mean of the two directed Hausdorff distances (unsquared). Throws on empty input.
double hausdorff_avg(std::span<const Vec3> x, std::span<const Vec3> y);

struct CurveDistance {
    double cd = 0.0;
    double hd = 0.0;
};

CurveDistance point_set_distance(std::span<const Vec3> x, std::span<const Vec3> y);

inline constexpr int kDefaultSamplesPerCurve = 512;

/// Samples every curve on both sides at `samples_per_curve` uniform parameters.
CurveDistance curve_cd(std::span<const ParametricCurve> fitted, const CurveSet& gt,
                       int samples_per_curve = kDefaultSamplesPerCurve);
CurveDistance curve_cd(const CurveSet& fitted, const CurveSet& gt, int samples_per_curve = kDefaultSamplesPerCurve);

PointList sample_curveset(const CurveSet& set, int samples_per_curve);

/// Grid-level scores. A metric over an empty selection is std::nullopt ("undefined").
struct GridReport {
    std::optional<double> recall_occupancy;     ///< R_o
    std::optional<double> precision_occupancy;  ///< P_o
    std::optional<double> orientation_correct;  ///< C_e
    std::optional<double> point_distance;       ///< D_p
};

/// Throws std::invalid_argument on resolution mismatch.
GridReport grid_report(const NerveGrid& pred, const NerveGrid& gt, const CubeMask& occupancy_mask,
                       const CubeMask& orientation_mask, const CubeMask& point_mask);

/// All cubes for occupancy; ground-truth (or predicted) occupied cubes for
/// orientations and points.
GridReport grid_report(const NerveGrid& pred, const NerveGrid& gt, bool predicted_masks = false);

/// {"R_o","P_o","C_e","D_p","CD","HD"}; missing values become "undefined".
nlohmann::json report_to_json(const GridReport& grid, const std::optional<CurveDistance>& curves);
std::string report_to_csv(const GridReport& grid, const std::optional<CurveDistance>& curves);

}  // namespace nerve
