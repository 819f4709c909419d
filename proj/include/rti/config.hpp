#pragma once

#include <string>
#include <vector>

#include "rti/common.hpp"
#include "rti/detection.hpp"
#include "rti/geometry.hpp"
#include "rti/tracking.hpp"

namespace rti {

enum class AssocMethod { gnn, snn };

// Full run configuration. Field defaults are the deployment values the
// pipeline was validated with; a config file only has to list what differs.
struct RunConfig {
    std::vector<Vec2> sensors;
    Rect bounds;
    std::vector<int> channels;
    double frame_rate = 10.0;
    std::vector<double> tx_power_dbm;  // per channel; empty = flat

    // imaging
    double pixel_width = 0.1524;
    double ellipse_lambda = 0.02;
    double voxel_sigma = 0.2236;       // prior pixel deviation, dB
    double noise_sigma = 1.0;          // measurement noise deviation, dB
    double correlation_distance = 3.0; // prior decay length, meters
    double kernel_sigma = 1.0;         // blur width, meters
    double kernel_radius = 0.75;       // blur truncation, meters

    // detection
    double beta = 0.80;
    double empty_floor = 0.01;
    double alpha_f = 0.9;
    double cluster_threshold = 1.25;   // HAC merge cutoff, meters
    double min_intensity_ratio = 0.8;
    int voxel_cap = 600;

    // tracking
    TrackingParams tracking;
    AssocMethod assoc = AssocMethod::gnn;

    // entrance region; empty polygons = perimeter band of band_width
    std::vector<std::vector<Vec2>> entrance_polygons;
    double entrance_band_width = 1.0;

    // calibration
    int calibration_min_frames = 30;
    int calibration_warn_frames = 100;
    int max_hold_frames = 10;

    // evaluation
    std::vector<double> ospa_cutoffs = {1.0, 2.5, 5.0};
    int metric_q = 2;

    NetworkGeometry make_geometry() const;
    VoxelGrid make_grid() const;
    EntranceRegion make_entrance() const;
};

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& cfg);

// Hash over everything that shapes the imaging chain: sensors, bounds,
// voxelization, ellipse width, prior, noise and the channel list. Profiles
// and cached projections carry it so stale artifacts are rejected.
std::uint64_t pipeline_content_hash(const RunConfig& cfg);

}  // namespace rti
