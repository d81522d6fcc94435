#pragma once

#include "nerve/curves.hpp"
#include "nerve/fit.hpp"
#include "nerve/grid.hpp"
#include "nerve/metrics.hpp"
#include "nerve/perturb.hpp"
#include "nerve/pwl.hpp"
#include "nerve/topo.hpp"
#include "nerve/voxelize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nerve {

/// Parses a length given absolutely ("0.25") or in cube edge lengths
/// ("4l", "0.5l", "l", "l/4"). Throws std::invalid_argument otherwise.
double parse_length(const std::string& text, double edge_length);

struct PipelineConfig {
    int resolution = 32;
    PointRule point_rule;
    double chord_tolerance = 0.0;  ///< <= 0: default_chord_tolerance(resolution)
    std::optional<RefineParams> refine;  ///< unset: RefineParams::for_resolution(resolution)
    double circle_threshold = kDefaultCircleThreshold;
    int samples_per_curve = kDefaultSamplesPerCurve;
    std::optional<PerturbSpec> perturbation;

    RefineParams refine_params() const;
};

struct PipelineResult {
    Voxelization voxels;  ///< ground truth
    NerveGrid grid;       ///< grid fed to extraction (perturbed when requested)
    PwlExtraction extraction;
    PwlGraph refined;
    std::vector<CurvePath> paths;
    std::vector<ParametricCurve> curves;
    std::size_t failed_fits = 0;
    std::optional<CurveDistance> curve_distance;  ///< fitted curves vs input
    std::optional<CurveDistance> pwl_distance;    ///< refined PWL edge midpoints vs input
};

/// Cubes within one step of an occupied cube; stands in for the point-cloud
/// surface mask when only curves are available.
CubeMask surface_mask_for(const NerveGrid& gt);

/// voxelize -> [perturb] -> extract_pwl -> refine -> trace_paths -> fit_path -> curve_cd.
PipelineResult run_pipeline(const CurveSet& curves, const PipelineConfig& config);

}  // namespace nerve
