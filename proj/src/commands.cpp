#include "rti/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <fmt/core.h>

#include "json.hpp"
#include "rti/calibration.hpp"
#include "rti/metrics.hpp"
#include "rti/pipeline.hpp"
#include "rti/simulator.hpp"
#include "rti/trace.hpp"

namespace rti {

ProjectionOperator obtain_projection(const RunConfig& cfg,
                                     const std::string& cache_path) {
    const std::uint64_t key = pipeline_content_hash(cfg);
    ProjectionOperator op;
    if (!cache_path.empty() && load_projection_cache(cache_path, key, op)) {
        log_info("projection loaded from cache %s", cache_path.c_str());
        return op;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const NetworkGeometry geometry = cfg.make_geometry();
    const VoxelGrid grid = cfg.make_grid();
    const WeightMatrix weights =
        ellipse_weights(geometry, grid, cfg.ellipse_lambda);
    const MatX prior =
        prior_covariance(grid, cfg.voxel_sigma, cfg.correlation_distance);
    op = build_projection(weights, prior, cfg.noise_sigma, cfg.voxel_sigma,
                          cfg.correlation_distance);
    const double s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    log_info("projection built in %.1f s (%d voxels, %d links)", s,
             grid.voxel_count(), geometry.link_count());
    if (!cache_path.empty()) save_projection_cache(cache_path, key, op);
    return op;
}

int cmd_simulate(const SimulateOptions& opt) {
    PresetBundle bundle = scripted_paths(opt.preset);
    bundle.scenario.seed = opt.seed;
    const RunConfig& cfg = bundle.config;

    const NetworkGeometry geometry = cfg.make_geometry();
    const VoxelGrid grid = cfg.make_grid();
    const WeightMatrix weights =
        ellipse_weights(geometry, grid, cfg.ellipse_lambda);
    const SynthChannelState channel_state =
        synthesize_fades(geometry, cfg.channels, cfg.tx_power_dbm,
                         bundle.scenario.fade_spread, opt.seed);

    save_config(opt.out_prefix + ".config.json", cfg);

    // Empty-area recording for calibration, on its own noise streams.
    Scenario calib = bundle.scenario;
    calib.targets.clear();
    calib.frame_count = bundle.calibration_frames;
    calib.seed = fnv1a_u64(opt.seed, fnv1a("calib", 5));
    long calib_records = 0;
    {
        TraceWriter w(opt.out_prefix + "_calib.trace");
        simulate(cfg, calib, weights, grid, channel_state,
                 [&](const TraceRecord& rec) {
                     w.write(rec);
                     ++calib_records;
                 },
                 nullptr);
    }

    std::vector<TruthFrame> truth;
    long records = 0;
    {
        TraceWriter w(opt.out_prefix + ".trace");
        simulate(cfg, bundle.scenario, weights, grid, channel_state,
                 [&](const TraceRecord& rec) {
                     w.write(rec);
                     ++records;
                 },
                 &truth);
    }
    save_truth(opt.out_prefix + ".truth", truth);

    fmt::print("preset {}: {} sensors, {} links, {} channels, {:.5g} m pixels\n",
               bundle.name, geometry.sensor_count(), geometry.link_count(),
               cfg.channels.size(), cfg.pixel_width);
    fmt::print("calibration: {} frames, {} records -> {}_calib.trace\n",
               calib.frame_count, calib_records, opt.out_prefix);
    fmt::print("walk: {} frames, {} targets, {} records -> {}.trace\n",
               bundle.scenario.frame_count, bundle.scenario.targets.size(),
               records, opt.out_prefix);
    if (bundle.scenario.targets.size() > 1)
        fmt::print("close approaches (<0.7 m): {}\n", count_crossings(truth));
    return 0;
}

int cmd_calibrate(const CalibrateOptions& opt) {
    const RunConfig cfg = load_config(opt.config_path);
    const NetworkGeometry geometry = cfg.make_geometry();
    const VoxelGrid grid = cfg.make_grid();
    const ProjectionOperator projection = obtain_projection(cfg, opt.pi_cache);

    std::vector<Frame> frames;
    {
        TraceReader reader(opt.trace_path, geometry, cfg.channels);
        while (auto f = reader.next()) frames.push_back(std::move(*f));
    }

    CalibrationOptions copts;
    copts.min_frames = cfg.calibration_min_frames;
    copts.warn_frames = cfg.calibration_warn_frames;
    copts.max_hold_frames = cfg.max_hold_frames;
    copts.sigma_g = cfg.kernel_sigma;
    copts.r_g = cfg.kernel_radius;
    copts.tx_power_dbm = cfg.tx_power_dbm;

    const CalibrationProfile profile =
        calibrate(frames, geometry, grid, projection, cfg.channels,
                  pipeline_content_hash(cfg), copts);
    save_profile(opt.profile_path, profile);

    const double fade_max = profile.fade.maxCoeff();
    const double fade_mean = profile.fade.mean();
    fmt::print("calibrated {} links x {} channels from {} frames\n",
               profile.fade.rows(), profile.fade.cols(), frames.size());
    fmt::print("fade levels: mean {:.2f} dB, max {:.2f} dB\n", fade_mean,
               fade_max);
    fmt::print("empty-area image baseline: {:.4f}\n", profile.empty_baseline);
    fmt::print("profile -> {}\n", opt.profile_path);
    return 0;
}

int cmd_track(const TrackOptions& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.assoc) cfg.assoc = *opt.assoc;

    const CalibrationProfile profile = load_profile(opt.profile_path);
    const std::uint64_t want = pipeline_content_hash(cfg);
    if (profile.geometry_hash != want)
        throw std::invalid_argument(fmt::format(
            "calibration profile {} was built for a different deployment "
            "(hash {:016x}, config hash {:016x})",
            opt.profile_path, profile.geometry_hash, want));

    ProjectionOperator projection = obtain_projection(cfg, opt.pi_cache);
    const NetworkGeometry geometry = cfg.make_geometry();
    TrackerPipeline pipeline(cfg, profile, std::move(projection));

    TraceReader reader(opt.trace_path, geometry, cfg.channels);
    TrackLogWriter log(opt.log_path);
    std::unique_ptr<ImageDumpWriter> dump;
    if (!opt.dump_path.empty())
        dump = std::make_unique<ImageDumpWriter>(
            opt.dump_path, pipeline.grid().voxel_count());

    std::vector<long> frame_ids;
    std::vector<double> frame_ms;
    long frames = 0;
    while (auto f = reader.next()) {
        const FrameResult r = pipeline.process(*f);
        TrackLogFrame lf;
        lf.frame = r.frame;
        lf.timestamp = r.timestamp;
        lf.tracks = r.tracks;
        log.write(lf);
        if (dump) dump->write(r.frame, r.denoised.intensities);
        frame_ids.push_back(r.frame);
        frame_ms.push_back(r.elapsed_ms);
        ++frames;
    }
    log.close();
    if (dump) dump->close();
    if (!opt.timing_path.empty()) save_timing(opt.timing_path, frame_ids, frame_ms);

    if (pipeline.unavailable_links() > 0)
        log_warn("%ld link-frames had no usable measurement on any channel",
                 pipeline.unavailable_links());

    double mean_ms = 0.0, max_ms = 0.0;
    for (double v : frame_ms) {
        mean_ms += v;
        max_ms = std::max(max_ms, v);
    }
    if (frames > 0) mean_ms /= static_cast<double>(frames);
    fmt::print("tracked {} frames ({} association) -> {}\n", frames,
               cfg.assoc == AssocMethod::gnn ? "gnn" : "snn", opt.log_path);
    fmt::print("processing time per frame: mean {:.2f} ms, max {:.2f} ms\n",
               mean_ms, max_ms);
    return 0;
}

int cmd_eval(const EvalOptions& opt) {
    RunConfig cfg;
    if (!opt.config_path.empty()) cfg = load_config(opt.config_path);

    const std::vector<TrackLogFrame> log = load_track_log(opt.log_path);
    const std::vector<TruthFrame> truth = load_truth(opt.truth_path);
    if (log.empty()) throw std::invalid_argument("track log has no frames");
    if (truth.empty()) throw std::invalid_argument("truth file has no frames");

    std::map<long, std::vector<Vec2>> truth_by_frame;
    for (const TruthFrame& tf : truth) {
        std::vector<Vec2> pts;
        pts.reserve(tf.targets.size());
        for (const auto& [id, p] : tf.targets) pts.push_back(p);
        truth_by_frame.emplace(tf.frame, std::move(pts));
    }

    std::vector<std::vector<Vec2>> est_series, truth_series;
    long overlap = 0;
    for (const TrackLogFrame& lf : log) {
        auto it = truth_by_frame.find(lf.frame);
        if (it == truth_by_frame.end()) continue;
        ++overlap;
        std::vector<Vec2> est;
        for (const TrackRecord& t : lf.tracks)
            if (t.status == TrackStatus::confirmed) est.push_back(t.position);
        est_series.push_back(std::move(est));
        truth_series.push_back(it->second);
    }
    if (overlap == 0)
        throw std::invalid_argument(fmt::format(
            "track log frames [{}, {}] and truth frames [{}, {}] do not overlap",
            log.front().frame, log.back().frame, truth.front().frame,
            truth.back().frame));
    if (overlap != static_cast<long>(log.size()) ||
        overlap != static_cast<long>(truth.size()))
        log_warn("log has %zu frames, truth %zu; evaluating %ld overlapping",
                 log.size(), truth.size(), overlap);

    const MetricsReport rep =
        evaluate_frames(est_series, truth_series, cfg.ospa_cutoffs, cfg.metric_q);

    bool has_timing = false;
    double time_mean = 0.0, time_max = 0.0;
    if (!opt.timing_path.empty()) {
        const std::vector<double> ms = load_timing(opt.timing_path);
        if (!ms.empty()) {
            has_timing = true;
            for (double v : ms) {
                time_mean += v;
                time_max = std::max(time_max, v);
            }
            time_mean /= static_cast<double>(ms.size());
        }
    }

    fmt::print("frames evaluated: {} ({} skipped: one set empty)\n",
               rep.frames_total, rep.frames_skipped_empty);
    fmt::print("count error rate: {:.4f}\n", rep.cardinality_err);
    fmt::print("mean distance error: {:.4f} m (95th percentile {:.4f} m)\n",
               rep.omat_mean, rep.omat_q95);
    for (const auto& [g, v] : rep.ospa_mean)
        fmt::print("cutoff distance g={:g}: {:.4f} m\n", g, v);
    if (has_timing)
        fmt::print("processing time: mean {:.2f} ms, max {:.2f} ms\n", time_mean,
                   time_max);

    if (!opt.report_path.empty()) {
        nlohmann::json j;
        j["frames"] = rep.frames_total;
        j["frames_skipped_empty"] = rep.frames_skipped_empty;
        j["cardinality_error"] = rep.cardinality_err;
        j["omat"] = {{"mean", rep.omat_mean}, {"q95", rep.omat_q95}};
        nlohmann::json ospa_obj = nlohmann::json::object();
        for (const auto& [g, v] : rep.ospa_mean)
            ospa_obj[fmt::format("{:g}", g)] = v;
        j["ospa"] = ospa_obj;
        if (has_timing)
            j["timing"] = {{"mean_ms", time_mean}, {"max_ms", time_max}};
        std::ofstream out(opt.report_path);
        if (!out) throw std::runtime_error("cannot write " + opt.report_path);
        out << j.dump(2) << "\n";
        fmt::print("report -> {}\n", opt.report_path);
    }
    return 0;
}

}  // namespace rti
