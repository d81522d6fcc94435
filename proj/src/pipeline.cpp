#include "nerve/pipeline.hpp"

#include <cctype>
#include <cmath>

namespace nerve {

namespace {

double parse_number(const std::string& text, const std::string& original) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) throw std::invalid_argument("bad length: " + original);
    return v;
}

}  // namespace

double parse_length(const std::string& text, double edge_length) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw std::invalid_argument("empty length");
    if (s == "l") return edge_length;
    if (s.rfind("l/", 0) == 0) {
        const double d = parse_number(s.substr(2), text);
        if (d == 0.0) throw std::invalid_argument("bad length: " + text);
        return edge_length / d;
    }
    if (s.back() == 'l') {
        std::string factor = s.substr(0, s.size() - 1);
        if (!factor.empty() && factor.back() == '*') factor.pop_back();
        return parse_number(factor, text) * edge_length;
    }
    return parse_number(s, text);
}

RefineParams PipelineConfig::refine_params() const {
    return refine ? *refine : RefineParams::for_resolution(resolution);
}

CubeMask surface_mask_for(const NerveGrid& gt) { return dilate(gt.occupancy_mask(), 1); }

PipelineResult run_pipeline(const CurveSet& curves, const PipelineConfig& config) {
    VoxelizeOptions vox{config.point_rule, config.chord_tolerance};
    auto voxels = voxelize_detailed(curves, config.resolution, vox);
    NerveGrid grid = voxels.grid;
    if (config.perturbation) grid = perturb(grid, *config.perturbation, surface_mask_for(voxels.grid));

    PipelineResult result{std::move(voxels), grid, extract_pwl(grid), {}, {}, {}, 0, std::nullopt, std::nullopt};
    result.refined = refine(result.extraction.graph, config.refine_params());
    result.paths = trace_paths(result.refined);
    const auto positions = result.refined.positions();
    for (const auto& path : result.paths) {
        try {
            result.curves.push_back(fit_path(path, positions, config.circle_threshold));
        } catch (const std::invalid_argument&) {
            ++result.failed_fits;
        }
    }
    if (!curves.curves.empty()) {
        const auto gt_samples = sample_curveset(curves, config.samples_per_curve);
        if (!result.curves.empty()) result.curve_distance = curve_cd(result.curves, curves, config.samples_per_curve);
        const auto mids = sample_pwl_midpoints(result.refined);
        if (!mids.empty()) result.pwl_distance = point_set_distance(mids, gt_samples);
    }
    return result;
}

}  // namespace nerve
