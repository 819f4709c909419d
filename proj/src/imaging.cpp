#include "rti/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rti {

ChangeEstimator::ChangeEstimator(const MatX& mean_rss, const MatX& fade,
                                 int max_hold_frames)
    : mean_(mean_rss), fade_(fade), max_hold_(max_hold_frames) {
    if (mean_rss.rows() != fade.rows() || mean_rss.cols() != fade.cols())
        throw std::invalid_argument("mean/fade shape mismatch");
    if (max_hold_frames < 0)
        throw std::invalid_argument("hold window must be non-negative");
    held_ = MatX::Zero(mean_.rows(), mean_.cols());
    held_age_ = Eigen::MatrixXi::Constant(mean_.rows(), mean_.cols(), -1);
}

VecX ChangeEstimator::compute(const Frame& frame) {
    const int m = static_cast<int>(mean_.rows());
    const int k = static_cast<int>(mean_.cols());
    if (frame.rss.rows() != m || frame.rss.cols() != k)
        throw std::invalid_argument("frame shape does not match calibration");

    VecX y = VecX::Zero(m);
    for (int l = 0; l < m; ++l) {
        double weight_sum = 0.0, weighted = 0.0;
        double plain_sum = 0.0;
        int usable = 0;
        for (int c = 0; c < k; ++c) {
            const double observed = frame.rss(l, c);
            if (std::isfinite(observed)) {
                held_(l, c) = observed;
                held_age_(l, c) = 0;
            } else if (held_age_(l, c) >= 0) {
                ++held_age_(l, c);
            }
            const int age = held_age_(l, c);
            if (age < 0 || age > max_hold_) continue;  // never seen or stale

            const double change = std::abs(held_(l, c) - mean_(l, c));
            const double f = fade_(l, c);
            weighted += f * change;
            weight_sum += f;
            plain_sum += change;
            ++usable;
        }
        if (usable == 0) {
            ++unavailable_links_;  // y_l stays 0
        } else if (weight_sum > 0.0) {
            y(l) = weighted / weight_sum;
        } else {
            // Degenerate fade row: every usable channel sits at the link's
            // deepest fade, so fall back to the unweighted mean change.
            y(l) = plain_sum / usable;
        }
    }
    return y;
}

RtiImage estimate_image(const ProjectionOperator& op, const VecX& y,
                        long frame_index) {
    if (y.size() != op.pi.cols())
        throw std::invalid_argument("change vector length does not match projection");
    RtiImage img;
    img.intensities.noalias() = op.pi * y;
    img.frame_index = frame_index;
    img.stage = ImageStage::raw;
    return img;
}

int denoise_kernel_radius(double r_g, double pixel_width) {
    return static_cast<int>(std::floor(r_g / pixel_width + 0.5));
}

RtiImage gaussian_denoise(const RtiImage& image, const VoxelGrid& grid,
                          double sigma_g, double r_g) {
    if (image.stage != ImageStage::raw)
        throw std::invalid_argument("denoise expects a raw image");
    if (image.intensities.size() != grid.voxel_count())
        throw std::invalid_argument("image size does not match grid");
    if (!(sigma_g > 0.0) || !(r_g > 0.0))
        throw std::invalid_argument("kernel parameters must be positive");

    const int rad = denoise_kernel_radius(r_g, grid.pixel_width);
    const int span = 2 * rad + 1;
    const double p = grid.pixel_width;

    // The 1/(2*pi*sigma^2) normalization cancels in the unit-sum rescale.
    std::vector<double> kernel(static_cast<std::size_t>(span) * span);
    double sum = 0.0;
    for (int di = -rad; di <= rad; ++di)
        for (int dj = -rad; dj <= rad; ++dj) {
            const double d2 = (di * p) * (di * p) + (dj * p) * (dj * p);
            const double v = std::exp(-d2 / (2.0 * sigma_g * sigma_g));
            kernel[(di + rad) * span + (dj + rad)] = v;
            sum += v;
        }
    for (double& v : kernel) v /= sum;

    RtiImage out;
    out.frame_index = image.frame_index;
    out.stage = ImageStage::denoised;
    out.intensities.resize(grid.voxel_count());

    for (int row = 0; row < grid.ny; ++row) {
        for (int col = 0; col < grid.nx; ++col) {
            double acc = 0.0;
            const int di_lo = std::max(-rad, -row);
            const int di_hi = std::min(rad, grid.ny - 1 - row);
            const int dj_lo = std::max(-rad, -col);
            const int dj_hi = std::min(rad, grid.nx - 1 - col);
            for (int di = di_lo; di <= di_hi; ++di) {
                const double* src =
                    image.intensities.data() + (row + di) * grid.nx + col;
                const double* krow = kernel.data() + (di + rad) * span + rad;
                for (int dj = dj_lo; dj <= dj_hi; ++dj) acc += krow[dj] * src[dj];
            }
            out.intensities(row * grid.nx + col) = acc;
        }
    }
    return out;
}

}  // namespace rti
