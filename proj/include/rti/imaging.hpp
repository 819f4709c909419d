#pragma once

#include <Eigen/Core>
#include <vector>

#include "rti/common.hpp"
#include "rti/geometry.hpp"

namespace rti {

// One measurement interval across the whole network. rss is link x channel
// in dBm with NaN for entries that were not observed this frame (packet
// loss, scan gaps). Directional duplicates are already fused by the trace
// assembler.
struct Frame {
    long index = -1;
    double timestamp = 0.0;
    MatX rss;
};

enum class ImageStage { raw, denoised, masked };

struct RtiImage {
    VecX intensities;
    long frame_index = -1;
    ImageStage stage = ImageStage::raw;
};

// Collapses a frame's per-channel RSS changes into one value per link,
// weighting each channel by its fade level so that channels observed far
// above their link's deepest fade dominate. Stateful because missing
// entries are bridged with the last observed value for a bounded number of
// frames before the channel drops out of the sums.
class ChangeEstimator {
  public:
    ChangeEstimator(const MatX& mean_rss, const MatX& fade, int max_hold_frames);

    VecX compute(const Frame& frame);

    // Frames-so-far counter of links that produced y_l = 0 because no
    // channel had any usable measurement.
    long unavailable_links() const { return unavailable_links_; }

  private:
    const MatX& mean_;
    const MatX& fade_;
    int max_hold_;
    MatX held_;                 // last observed value per (link, channel)
    Eigen::MatrixXi held_age_;  // frames since observed; -1 = never seen
    long unavailable_links_ = 0;
};

// x = pi * y
RtiImage estimate_image(const ProjectionOperator& op, const VecX& y, long frame_index);

// Truncated Gaussian blur with kernel width sigma_g (meters), cut off at
// round(r_g / pixel_width) voxels and renormalized to unit sum. Out-of-grid
// taps read as zero.
RtiImage gaussian_denoise(const RtiImage& image, const VoxelGrid& grid,
                          double sigma_g, double r_g);

int denoise_kernel_radius(double r_g, double pixel_width);

}  // namespace rti
