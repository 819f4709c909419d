#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>

namespace rti {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Axis-aligned monitored area. Origin convention: min corner is the
// south-west corner, x grows east, y grows north.
struct Rect {
    double min_x = 0.0;
    double min_y = 0.0;
    double width = 0.0;
    double height = 0.0;

    double max_x() const { return min_x + width; }
    double max_y() const { return min_y + height; }

    bool contains(const Vec2& p) const {
        return p.x() >= min_x && p.x() <= max_x() &&
               p.y() >= min_y && p.y() <= max_y();
    }
};

// FNV-1a, used for content hashes of geometry/config inputs so that derived
// artifacts (calibration profiles, cached projection matrices) can be bound
// to the exact inputs they were built from.
std::uint64_t fnv1a(const void* data, std::size_t len,
                    std::uint64_t h = 14695981039346656037ull);
std::uint64_t fnv1a_doubles(const double* v, std::size_t n, std::uint64_t h);
std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h);

// Log verbosity from the RTI_LOG environment variable:
// quiet|warn|info|debug. Defaults to warn. Messages go to stderr so they
// never pollute machine-readable stdout output.
int log_level();
void log_warn(const char* fmt, ...);
void log_info(const char* fmt, ...);
void log_debug(const char* fmt, ...);

}  // namespace rti
