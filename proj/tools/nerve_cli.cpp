// Command-line front end: voxelize, extract, fit, eval, perturb, pipeline, corpus.

#include "nerve/corpus.hpp"
#include "nerve/pipeline.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

namespace fs = std::filesystem;
using namespace nerve;

namespace {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level() {
    const char* env = std::getenv("NERVE_LOG");
    if (!env) return LogLevel::Warn;
    const std::string v = env;
    if (v == "quiet" || v == "0") return LogLevel::Quiet;
    if (v == "info" || v == "2") return LogLevel::Info;
    if (v == "debug" || v == "3") return LogLevel::Debug;
    return LogLevel::Warn;
}

void log(LogLevel level, const std::string& msg) {
    static const LogLevel threshold = log_level();
    if (level > threshold) return;
    static const char* names[] = {"", "warning", "info", "debug"};
    std::cerr << "nerve: " << names[static_cast<int>(level)] << ": " << msg << '\n';
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw NerveError("cannot write " + path);
    out << text;
    if (!out) throw NerveError("failed writing " + path);
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NerveError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

bool is_grid_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    char magic[6] = {};
    in.read(magic, sizeof magic);
    return in.gcount() == 6 && std::string(magic, 6) == "NERVE1";
}

/// Curves from a CurveSet or fitted-curves JSON.
CurveSet load_any_curves(const std::string& path) {
    const auto j = read_json(path);
    return curveset_from_json(j);
}

struct RefineFlags {
    std::string delta_r = "4l";
    std::string n_p = "5";
    std::string delta_p = "2l";
    bool brep_strict = false;
    bool no_refine = false;

    void add(CLI::App* app) {
        app->add_option("--delta-r", delta_r, "Reconnection distance (absolute or in cube lengths, e.g. 4l)");
        app->add_option("--n-p", n_p, "Minimum vertex count of a dangling path");
        app->add_option("--delta-p", delta_p, "Multi-path Chamfer threshold (absolute or e.g. 2l)");
        app->add_flag("--brep-strict", brep_strict, "Remove every dangling path");
    }

    RefineParams params(int resolution) const {
        const double l = edge_length(resolution);
        RefineParams p = RefineParams::defaults(l);
        p.delta_r = parse_length(delta_r, l);
        p.delta_p = parse_length(delta_p, l);
        try {
            std::size_t used = 0;
            p.n_p = std::stoi(n_p, &used);
            if (used != n_p.size()) throw std::invalid_argument(n_p);
        } catch (const std::exception&) {
            throw std::invalid_argument("--n-p expects an integer, got " + n_p);
        }
        p.brep_strict = brep_strict;
        p.validate();
        return p;
    }
};

struct PerturbFlags {
    std::string sigma = "0";
    double occ_fp = 0.0;
    double occ_fn = 0.0;
    double orient_flip = 0.0;

    void add(CLI::App* app) {
        app->add_option("--sigma", sigma, "Point jitter std (absolute or e.g. l/4)");
        app->add_option("--occ-fp", occ_fp, "Probability of adding an occupied surface cube");
        app->add_option("--occ-fn", occ_fn, "Probability of dropping an occupied cube");
        app->add_option("--orient-flip", orient_flip, "Probability of toggling an inner face flag");
    }

    PerturbSpec spec(int resolution, std::uint64_t seed) const {
        PerturbSpec s;
        s.point_sigma = parse_length(sigma, edge_length(resolution));
        s.occ_fp = occ_fp;
        s.occ_fn = occ_fn;
        s.orient_flip = orient_flip;
        s.seed = seed;
        s.validate();
        return s;
    }

    bool active() const { return sigma != "0" || occ_fp > 0 || occ_fn > 0 || orient_flip > 0; }
};

nlohmann::json distance_json(const std::optional<CurveDistance>& d) {
    if (!d) return {{"CD", "undefined"}, {"HD", "undefined"}};
    return {{"CD", d->cd}, {"HD", d->hd}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volumetric edge grids: voxelize curves, extract and refine PWL curves, fit and evaluate"};
    app.require_subcommand(1);

    // voxelize
    std::string vox_in, vox_out, vox_json, vox_rule = "midpoint";
    int vox_r = 32;
    double vox_tol = 0.0;
    auto* vox = app.add_subcommand("voxelize", "Voxelize a curve set JSON into a NERVE1 grid");
    vox->add_option("curves", vox_in, "Curve set JSON")->required();
    vox->add_option("-o,--output", vox_out, "Output grid file")->required();
    vox->add_option("-r,--resolution", vox_r, "Cubes per axis")->check(CLI::Range(kMinResolution, kMaxResolution));
    vox->add_option("--point-rule", vox_rule, "midpoint or qef:<lambda>");
    vox->add_option("--chord-tol", vox_tol, "Curve sampling tolerance (default l/100)");
    vox->add_option("--json", vox_json, "Also write the JSON mirror of the grid");

    // extract
    std::string ext_in, ext_obj, ext_paths;
    RefineFlags ext_refine;
    auto* ext = app.add_subcommand("extract", "Extract, refine and trace PWL curves from a grid");
    ext->add_option("grid", ext_in, "NERVE1 grid file")->required();
    ext->add_option("--obj", ext_obj, "Output OBJ polyline file")->required();
    ext->add_option("--paths", ext_paths, "Output paths JSON")->required();
    ext_refine.add(ext);
    ext->add_flag("--no-refine", ext_refine.no_refine, "Skip topology refinement");

    // fit
    std::string fit_in, fit_out;
    double fit_threshold = kDefaultCircleThreshold;
    auto* fit = app.add_subcommand("fit", "Fit parametric curves to traced paths");
    fit->add_option("paths", fit_in, "Paths JSON from extract")->required();
    fit->add_option("-o,--output", fit_out, "Output curves JSON")->required();
    fit->add_option("--circle-threshold", fit_threshold, "Circle residual threshold");

    // eval
    std::string ev_pred, ev_gt;
    bool ev_csv = false, ev_pred_masks = false;
    int ev_samples = kDefaultSamplesPerCurve;
    auto* ev = app.add_subcommand("eval", "Compare a prediction (grid or curves) with ground truth");
    ev->add_option("pred", ev_pred, "Predicted grid or curves JSON")->required();
    ev->add_option("gt", ev_gt, "Ground-truth grid or curves JSON")->required();
    ev->add_flag("--csv", ev_csv, "Emit CSV instead of JSON");
    ev->add_flag("--predicted-masks", ev_pred_masks, "Score C_e and D_p over predicted occupied cubes");
    ev->add_option("--samples", ev_samples, "Samples per curve")->check(CLI::PositiveNumber);

    // perturb
    std::string per_in, per_out;
    std::uint64_t per_seed = 0;
    PerturbFlags per_flags;
    auto* per = app.add_subcommand("perturb", "Corrupt a grid with seeded noise");
    per->add_option("grid", per_in, "Input grid")->required();
    per->add_option("-o,--output", per_out, "Output grid")->required();
    per_flags.add(per);
    per->add_option("--seed", per_seed, "Random seed");

    // pipeline
    std::vector<std::string> pipe_in;
    std::string pipe_rule = "midpoint", pipe_out_dir;
    int pipe_r = 32, pipe_jobs = 1, pipe_samples = kDefaultSamplesPerCurve;
    double pipe_threshold = kDefaultCircleThreshold, pipe_tol = 0.0;
    std::uint64_t pipe_seed = 0;
    RefineFlags pipe_refine;
    PerturbFlags pipe_perturb;
    auto* pipe = app.add_subcommand("pipeline", "Run voxelize -> extract -> refine -> fit -> eval on curve sets");
    pipe->add_option("curves", pipe_in, "Curve set JSON files or directories")->required();
    pipe->add_option("-r,--resolution", pipe_r, "Cubes per axis")->check(CLI::Range(kMinResolution, kMaxResolution));
    pipe->add_option("--point-rule", pipe_rule, "midpoint or qef:<lambda>");
    pipe->add_option("--chord-tol", pipe_tol, "Curve sampling tolerance (default l/100)");
    pipe->add_option("--circle-threshold", pipe_threshold, "Circle residual threshold");
    pipe->add_option("--samples", pipe_samples, "Samples per curve for CD/HD")->check(CLI::PositiveNumber);
    pipe_refine.add(pipe);
    pipe_perturb.add(pipe);
    pipe->add_option("--seed", pipe_seed, "Seed for all randomness");
    pipe->add_option("-j,--jobs", pipe_jobs, "Shapes processed concurrently")->check(CLI::PositiveNumber);
    pipe->add_option("--out-dir", pipe_out_dir, "Write grid, OBJ, paths and curves per shape here");

    // corpus
    std::string corpus_dir;
    auto* corp = app.add_subcommand("corpus", "Write the bundled synthetic corpus as curve set JSON files");
    corp->add_option("--out-dir", corpus_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*vox) {
            const auto curves = load_curveset(vox_in);
            const auto result = voxelize_detailed(curves, vox_r, {PointRule::parse(vox_rule), vox_tol});
            save_grid(result.grid, vox_out);
            if (!vox_json.empty()) write_text(vox_json, grid_to_json(result.grid).dump() + "\n");
            if (result.corner_steps > 0)
                log(LogLevel::Info, std::to_string(result.corner_steps) + " edge/corner crossings left without a face flag");
            std::cout << nlohmann::json{{"resolution", vox_r},
                                        {"occupied", result.grid.occupied_count()},
                                        {"true_faces", result.grid.true_face_count()},
                                        {"junction_cubes", result.junction_cubes()},
                                        {"junction_fraction", result.junction_fraction()}}
                             .dump()
                      << '\n';
        } else if (*ext) {
            const auto grid = load_grid(ext_in);
            auto extraction = extract_pwl(grid);
            for (const auto& bad : extraction.inconsistencies) {
                log(LogLevel::Debug, "dropped flag at (" + std::to_string(bad.cube.i) + "," + std::to_string(bad.cube.j) +
                                         "," + std::to_string(bad.cube.k) + ") axis " + std::to_string(bad.axis));
            }
            if (!extraction.inconsistencies.empty())
                log(LogLevel::Warn, std::to_string(extraction.inconsistencies.size()) + " inconsistent orientation flags dropped");
            PwlGraph graph = extraction.graph;
            if (!ext_refine.no_refine) graph = refine(graph, ext_refine.params(grid.resolution()));
            if (graph.empty()) log(LogLevel::Warn, "empty PWL graph");
            const auto paths = trace_paths(graph);
            write_text(ext_obj, write_obj(graph));
            write_text(ext_paths, pathset_to_json(make_pathset(graph, paths)).dump(2) + "\n");
            std::cout << nlohmann::json{{"vertices", graph.vertex_count()},
                                        {"edges", graph.edge_count()},
                                        {"paths", paths.size()},
                                        {"inconsistencies", extraction.inconsistencies.size()}}
                             .dump()
                      << '\n';
        } else if (*fit) {
            const auto set = pathset_from_json(read_json(fit_in));
            if (set.paths.empty()) log(LogLevel::Warn, "no paths to fit");
            std::vector<ParametricCurve> curves;
            for (const auto& path : set.paths) {
                try {
                    curves.push_back(fit_path(path, set.vertices, fit_threshold));
                } catch (const std::invalid_argument& e) {
                    log(LogLevel::Warn, std::string("skipped path: ") + e.what());
                }
            }
            write_text(fit_out, fitted_to_json(curves).dump(2) + "\n");
            const auto circles = std::count_if(curves.begin(), curves.end(), [](const auto& c) { return c.is_circle(); });
            std::cout << nlohmann::json{{"curves", curves.size()}, {"circles", circles}}.dump() << '\n';
        } else if (*ev) {
            GridReport grid_scores;
            std::optional<CurveDistance> dist;
            const bool pred_grid = is_grid_file(ev_pred);
            const bool gt_grid = is_grid_file(ev_gt);
            auto points_of = [&](const std::string& path, bool grid) {
                if (grid) return sample_pwl_midpoints(extract_pwl(load_grid(path)).graph);
                return sample_curveset(load_any_curves(path), ev_samples);
            };
            if (pred_grid && gt_grid) {
                const auto pred = load_grid(ev_pred);
                const auto gt = load_grid(ev_gt);
                grid_scores = grid_report(pred, gt, ev_pred_masks);
            }
            const auto x = points_of(ev_pred, pred_grid);
            const auto y = points_of(ev_gt, gt_grid);
            if (!x.empty() && !y.empty()) {
                dist = point_set_distance(x, y);
            } else {
                log(LogLevel::Warn, "empty point set; CD/HD undefined");
            }
            std::cout << (ev_csv ? report_to_csv(grid_scores, dist) : report_to_json(grid_scores, dist).dump(2) + "\n");
        } else if (*per) {
            const auto grid = load_grid(per_in);
            const auto out = perturb(grid, per_flags.spec(grid.resolution(), per_seed), surface_mask_for(grid));
            save_grid(out, per_out);
        } else if (*pipe) {
            std::vector<std::string> files;
            for (const auto& in : pipe_in) {
                if (fs::is_directory(in)) {
                    std::vector<std::string> found;
                    for (const auto& e : fs::directory_iterator(in))
                        if (e.path().extension() == ".json") found.push_back(e.path().string());
                    std::sort(found.begin(), found.end());
                    files.insert(files.end(), found.begin(), found.end());
                } else {
                    files.push_back(in);
                }
            }
            PipelineConfig config;
            config.resolution = pipe_r;
            config.point_rule = PointRule::parse(pipe_rule);
            config.chord_tolerance = pipe_tol;
            config.refine = pipe_refine.params(pipe_r);
            config.circle_threshold = pipe_threshold;
            config.samples_per_curve = pipe_samples;
            if (pipe_perturb.active()) config.perturbation = pipe_perturb.spec(pipe_r, pipe_seed);
            if (!pipe_out_dir.empty()) fs::create_directories(pipe_out_dir);

            std::vector<nlohmann::json> rows(files.size());
            std::vector<std::string> errors(files.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < files.size(); i = next++) {
                    try {
                        const auto curves = load_curveset(files[i]);
                        PipelineConfig cfg = config;
                        if (cfg.perturbation) cfg.perturbation->seed = pipe_seed + i;
                        const auto result = run_pipeline(curves, cfg);
                        const auto stem = fs::path(files[i]).stem().string();
                        if (!pipe_out_dir.empty()) {
                            const fs::path base = fs::path(pipe_out_dir) / stem;
                            save_grid(result.grid, base.string() + ".nerve");
                            write_text(base.string() + ".obj", write_obj(result.refined));
                            write_text(base.string() + ".paths.json",
                                       pathset_to_json(make_pathset(result.refined, result.paths)).dump(2) + "\n");
                            write_text(base.string() + ".curves.json", fitted_to_json(result.curves).dump(2) + "\n");
                        }
                        auto row = distance_json(result.curve_distance);
                        row["shape"] = stem;
                        row["curves"] = result.curves.size();
                        row["junction_fraction"] = result.voxels.junction_fraction();
                        row["pwl"] = distance_json(result.pwl_distance);
                        rows[i] = std::move(row);
                    } catch (const std::exception& e) {
                        errors[i] = e.what();
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < std::max(1, pipe_jobs); ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();

            int failures = 0;
            double cd_sum = 0.0, hd_sum = 0.0;
            std::size_t scored = 0;
            auto shapes = nlohmann::json::array();
            for (std::size_t i = 0; i < files.size(); ++i) {
                if (!errors[i].empty()) {
                    log(LogLevel::Warn, files[i] + ": " + errors[i]);
                    ++failures;
                    continue;
                }
                if (rows[i]["CD"].is_number()) {
                    cd_sum += rows[i]["CD"].get<double>();
                    hd_sum += rows[i]["HD"].get<double>();
                    ++scored;
                }
                shapes.push_back(rows[i]);
            }
            nlohmann::json summary{{"shapes", shapes.size()},
                                   {"point_rule", config.point_rule.to_string()},
                                   {"resolution", pipe_r},
                                   {"mean_CD", scored ? nlohmann::json(cd_sum / scored) : nlohmann::json("undefined")},
                                   {"mean_HD", scored ? nlohmann::json(hd_sum / scored) : nlohmann::json("undefined")}};
            std::cout << nlohmann::json{{"summary", summary}, {"results", shapes}}.dump(2) << '\n';
            return failures == 0 ? 0 : 1;
        } else if (*corp) {
            fs::create_directories(corpus_dir);
            auto write = [&](const std::vector<corpus::Shape>& shapes, const std::string& prefix) {
                for (const auto& s : shapes)
                    write_text((fs::path(corpus_dir) / (prefix + s.name + ".json")).string(),
                               curveset_to_json(s.curves).dump(2) + "\n");
            };
            write(corpus::restoration_shapes(), "");
            write(corpus::close_pair_shapes(), "close_");
        }
    } catch (const std::exception& e) {
        std::cerr << "nerve: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
