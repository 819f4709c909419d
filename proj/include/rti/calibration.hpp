#pragma once

#include <string>
#include <vector>

#include "rti/common.hpp"
#include "rti/geometry.hpp"
#include "rti/imaging.hpp"

namespace rti {

// Everything the live pipeline needs to interpret raw RSS: per-(link,channel)
// empty-area means, fade levels relative to each link's deepest channel, and
// the empty-area image intensity baseline used for thresholding before any
// target is tracked. geometry_hash binds the profile to the exact geometry,
// imaging parameters and channel list it was calibrated against.
struct CalibrationProfile {
    MatX mean_rss;   // link x channel, dBm
    MatX fade;       // link x channel, dB, row minimum is exactly 0
    double empty_baseline = 0.0;
    std::vector<int> channels;
    std::uint64_t geometry_hash = 0;
};

// IEEE 802.15.4 channel center frequency in MHz; channels 11..26.
double channel_frequency(int channel);

// Per-link fade levels: gain minus the link's minimum gain across channels.
MatX fade_levels(const MatX& gain);

struct CalibrationOptions {
    int min_frames = 30;
    int warn_frames = 100;
    int max_hold_frames = 10;
    double sigma_g = 1.0;
    double r_g = 0.75;
    // Transmit power per channel (dBm), subtracted from the RSS means before
    // fade extraction so power steps between channels don't masquerade as
    // fades. Empty means flat power.
    std::vector<double> tx_power_dbm;
};

// Batch calibration over an empty-area recording. Throws if any
// (link, channel) pair was never observed (the error message lists them) or
// if fewer than min_frames frames were provided.
CalibrationProfile calibrate(const std::vector<Frame>& frames,
                             const NetworkGeometry& geometry,
                             const VoxelGrid& grid,
                             const ProjectionOperator& projection,
                             const std::vector<int>& channels,
                             std::uint64_t geometry_hash,
                             const CalibrationOptions& opts);

void save_profile(const std::string& path, const CalibrationProfile& profile);
CalibrationProfile load_profile(const std::string& path);

}  // namespace rti
