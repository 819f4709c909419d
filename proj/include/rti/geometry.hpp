#pragma once

#include <Eigen/Sparse>
#include <string>
#include <utility>
#include <vector>

#include "rti/common.hpp"

namespace rti {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Static sensor deployment. Links are all unordered sensor pairs (i < j),
// enumerated lexicographically; that enumeration order is the link index
// used everywhere else (weight rows, RSS matrices, trace assembly).
struct NetworkGeometry {
    std::vector<Vec2> sensors;
    std::vector<std::pair<int, int>> links;

    int sensor_count() const { return static_cast<int>(sensors.size()); }
    int link_count() const { return static_cast<int>(links.size()); }

    // Builds the full mesh over the given sensor positions.
    // Requires at least 3 sensors and pairwise-distinct positions.
    static NetworkGeometry all_pairs(std::vector<Vec2> sensor_positions);
};

// Regular voxel grid over the monitored area, row-major from the south-west
// corner: index = row * nx + col, row along y, col along x.
struct VoxelGrid {
    Rect bounds;
    double pixel_width = 0.0;
    int nx = 0;  // columns (x)
    int ny = 0;  // rows (y)

    int voxel_count() const { return nx * ny; }

    Vec2 center(int index) const {
        int row = index / nx;
        int col = index % nx;
        return {bounds.min_x + (col + 0.5) * pixel_width,
                bounds.min_y + (row + 0.5) * pixel_width};
    }
};

VoxelGrid build_grid(const Rect& bounds, double pixel_width);

// Link-to-voxel weights. Row l is two-valued: 1/A_l inside the link's
// ellipse, 0 outside, where the ellipse has the link endpoints as foci and
// its major axis exceeds the link length by the excess path length lambda.
struct WeightMatrix {
    SpMat w;  // link_count x voxel_count
    double lambda = 0.0;
};

WeightMatrix ellipse_weights(const NetworkGeometry& geometry,
                             const VoxelGrid& grid, double lambda);

// Exponentially decaying spatial prior: C(j,i) = sigma_x^2 * exp(-d_ji / delta_c).
MatX prior_covariance(const VoxelGrid& grid, double sigma_x, double delta_c);

// Linear map from a length-M change vector to a length-N image, solved once:
// (W^T W + sigma_n^2 * C_x^{-1}) * pi = W^T.
struct ProjectionOperator {
    MatX pi;  // voxel_count x link_count, dense
    double sigma_n = 0.0;
    double sigma_x = 0.0;
    double delta_c = 0.0;
};

ProjectionOperator build_projection(const WeightMatrix& weights,
                                    const MatX& prior, double sigma_n,
                                    double sigma_x, double delta_c);

// Optional binary cache for the projection operator, keyed by a content hash
// of everything it was built from. load returns false on any mismatch
// (absent file, wrong magic, stale hash) and never fails the run.
bool load_projection_cache(const std::string& path, std::uint64_t key,
                           ProjectionOperator& out);
void save_projection_cache(const std::string& path, std::uint64_t key,
                           const ProjectionOperator& op);

}  // namespace rti
