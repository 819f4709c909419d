#include "rti/geometry.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace rti {

NetworkGeometry NetworkGeometry::all_pairs(std::vector<Vec2> sensor_positions) {
    if (sensor_positions.size() < 3)
        throw std::invalid_argument("network needs at least 3 sensors");
    const int r = static_cast<int>(sensor_positions.size());
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            if ((sensor_positions[i] - sensor_positions[j]).norm() == 0.0)
                throw std::invalid_argument(
                    "sensors " + std::to_string(i) + " and " + std::to_string(j) +
                    " share a position");

    NetworkGeometry g;
    g.sensors = std::move(sensor_positions);
    g.links.reserve(static_cast<std::size_t>(r) * (r - 1) / 2);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) g.links.emplace_back(i, j);
    return g;
}

VoxelGrid build_grid(const Rect& bounds, double pixel_width) {
    if (!(pixel_width > 0.0) || !std::isfinite(pixel_width))
        throw std::invalid_argument("pixel width must be positive");
    if (!(bounds.width > 0.0) || !(bounds.height > 0.0) ||
        !std::isfinite(bounds.width) || !std::isfinite(bounds.height))
        throw std::invalid_argument("grid bounds must have positive extent");

    VoxelGrid g;
    g.bounds = bounds;
    g.pixel_width = pixel_width;
    // The epsilon guards against 10/0.1 style quotients landing a hair above
    // an integer and adding a spurious row of voxels.
    g.nx = static_cast<int>(std::ceil(bounds.width / pixel_width - 1e-9));
    g.ny = static_cast<int>(std::ceil(bounds.height / pixel_width - 1e-9));
    return g;
}

WeightMatrix ellipse_weights(const NetworkGeometry& geometry,
                             const VoxelGrid& grid, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");

    const int m = geometry.link_count();
    const int n = grid.voxel_count();
    std::vector<Vec2> centers(n);
    for (int j = 0; j < n; ++j) centers[j] = grid.center(j);

    std::vector<Eigen::Triplet<double>> entries;
    for (int l = 0; l < m; ++l) {
        const Vec2& tx = geometry.sensors[geometry.links[l].first];
        const Vec2& rx = geometry.sensors[geometry.links[l].second];
        const double d = (tx - rx).norm();
        if (d == 0.0)
            throw std::invalid_argument("zero-length link " + std::to_string(l));
        const double a = (d + lambda) / 2.0;
        const double b = std::sqrt(a * a - (d / 2.0) * (d / 2.0));
        const double area = M_PI * a * b;
        const double inv_area = 1.0 / area;
        const double threshold = d + lambda;
        for (int j = 0; j < n; ++j) {
            const double path = (centers[j] - tx).norm() + (centers[j] - rx).norm();
            if (path < threshold) entries.emplace_back(l, j, inv_area);
        }
    }

    WeightMatrix w;
    w.lambda = lambda;
    w.w.resize(m, n);
    w.w.setFromTriplets(entries.begin(), entries.end());
    return w;
}

MatX prior_covariance(const VoxelGrid& grid, double sigma_x, double delta_c) {
    if (!(sigma_x > 0.0)) throw std::invalid_argument("sigma_x must be positive");
    if (!(delta_c > 0.0)) throw std::invalid_argument("delta_c must be positive");

    const int n = grid.voxel_count();
    std::vector<Vec2> centers(n);
    for (int j = 0; j < n; ++j) centers[j] = grid.center(j);

    const double var = sigma_x * sigma_x;
    MatX c(n, n);
    for (int j = 0; j < n; ++j) {
        c(j, j) = var;
        for (int i = j + 1; i < n; ++i) {
            const double v = var * std::exp(-(centers[j] - centers[i]).norm() / delta_c);
            c(j, i) = v;
            c(i, j) = v;
        }
    }
    return c;
}

ProjectionOperator build_projection(const WeightMatrix& weights,
                                    const MatX& prior, double sigma_n,
                                    double sigma_x, double delta_c) {
    const int n = static_cast<int>(weights.w.cols());
    if (prior.rows() != n || prior.cols() != n)
        throw std::invalid_argument("prior covariance does not match voxel count");
    if (!(sigma_n > 0.0))
        throw std::invalid_argument(
            "sigma_n must be positive; the unregularized problem is refused");

    Eigen::LLT<MatX> prior_llt(prior);
    if (prior_llt.info() != Eigen::Success)
        throw std::invalid_argument("prior covariance is not positive definite");
    MatX prior_inv = prior_llt.solve(MatX::Identity(n, n));

    MatX normal = MatX(SpMat(weights.w.transpose()) * weights.w);
    normal.noalias() += (sigma_n * sigma_n) * prior_inv;

    Eigen::LLT<MatX> normal_llt(normal);
    if (normal_llt.info() != Eigen::Success)
        throw std::runtime_error("regularized normal matrix is not positive definite");

    ProjectionOperator op;
    op.pi = normal_llt.solve(MatX(weights.w.transpose()));
    op.sigma_n = sigma_n;
    op.sigma_x = sigma_x;
    op.delta_c = delta_c;
    return op;
}

namespace {
constexpr char kPiMagic[8] = {'R', 'T', 'I', 'P', 'I', 'C', 'A', '1'};
}

bool load_projection_cache(const std::string& path, std::uint64_t key,
                           ProjectionOperator& out) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return false;
    char magic[8];
    std::uint64_t hash = 0;
    std::uint32_t rows = 0, cols = 0;
    double params[3];
    bool ok = std::fread(magic, 1, 8, f) == 8 &&
              std::memcmp(magic, kPiMagic, 8) == 0 &&
              std::fread(&hash, sizeof(hash), 1, f) == 1 && hash == key &&
              std::fread(&rows, sizeof(rows), 1, f) == 1 &&
              std::fread(&cols, sizeof(cols), 1, f) == 1 &&
              std::fread(params, sizeof(double), 3, f) == 3;
    if (ok) {
        out.pi.resize(rows, cols);
        ok = std::fread(out.pi.data(), sizeof(double),
                        static_cast<std::size_t>(rows) * cols,
                        f) == static_cast<std::size_t>(rows) * cols;
        out.sigma_n = params[0];
        out.sigma_x = params[1];
        out.delta_c = params[2];
    }
    std::fclose(f);
    if (ok) log_debug("projection cache hit: %s", path.c_str());
    return ok;
}

void save_projection_cache(const std::string& path, std::uint64_t key,
                           const ProjectionOperator& op) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write projection cache: " + path);
    const std::uint32_t rows = static_cast<std::uint32_t>(op.pi.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(op.pi.cols());
    const double params[3] = {op.sigma_n, op.sigma_x, op.delta_c};
    bool ok = std::fwrite(kPiMagic, 1, 8, f) == 8 &&
              std::fwrite(&key, sizeof(key), 1, f) == 1 &&
              std::fwrite(&rows, sizeof(rows), 1, f) == 1 &&
              std::fwrite(&cols, sizeof(cols), 1, f) == 1 &&
              std::fwrite(params, sizeof(double), 3, f) == 3 &&
              std::fwrite(op.pi.data(), sizeof(double),
                          static_cast<std::size_t>(rows) * cols,
                          f) == static_cast<std::size_t>(rows) * cols;
    std::fclose(f);
    if (!ok) throw std::runtime_error("short write on projection cache: " + path);
}

}  // namespace rti
