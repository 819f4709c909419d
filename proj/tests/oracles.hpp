#pragma once

// Brute-force reference implementations the tests compare the library
// against. Everything here favors obviousness over speed and shares no code
// with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rti/common.hpp"
#include "rti/geometry.hpp"

namespace oracle {

struct AssignmentResult {
    int pair_count = 0;
    double total_cost = 0.0;
};

namespace detail {

inline void assignment_rec(const rti::MatX& c, int row, std::uint32_t used,
                           int pairs, double cost, AssignmentResult& best) {
    const int rows = static_cast<int>(c.rows());
    const int cols = static_cast<int>(c.cols());
    if (row == rows) {
        if (pairs > best.pair_count ||
            (pairs == best.pair_count && cost < best.total_cost)) {
            best.pair_count = pairs;
            best.total_cost = cost;
        }
        return;
    }
    assignment_rec(c, row + 1, used, pairs, cost, best);  // row unassigned
    for (int j = 0; j < cols; ++j) {
        if (used & (1u << j)) continue;
        const double v = c(row, j);
        if (!std::isfinite(v)) continue;
        assignment_rec(c, row + 1, used | (1u << j), pairs + 1, cost + v, best);
    }
}

}  // namespace detail

// Exhaustive search over every partial one-to-one pairing: most pairs first,
// cheapest total cost among those. Cols must fit a 32-bit mask.
inline AssignmentResult exhaustive_assignment(const rti::MatX& cost) {
    if (cost.cols() > 31) throw std::invalid_argument("too many columns");
    AssignmentResult best;
    best.total_cost = std::numeric_limits<double>::infinity();
    if (cost.rows() == 0 || cost.cols() == 0) return {0, 0.0};
    detail::assignment_rec(cost, 0, 0u, 0, 0.0, best);
    if (best.pair_count == 0) best.total_cost = 0.0;
    return best;
}

// Min-permutation q-norm average distance after replicating both sets up to
// the least common multiple of their sizes.
inline double brute_omat(std::vector<rti::Vec2> t, std::vector<rti::Vec2> z,
                         int q) {
    if (t.empty() || z.empty())
        throw std::invalid_argument("brute_omat needs non-empty sets");
    const std::size_t l = std::lcm(t.size(), z.size());
    std::vector<rti::Vec2> tr, zr;
    for (std::size_t i = 0; i < l; ++i) tr.push_back(t[i % t.size()]);
    for (std::size_t i = 0; i < l; ++i) zr.push_back(z[i % z.size()]);

    std::vector<int> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double acc = 0.0;
        for (std::size_t i = 0; i < l; ++i)
            acc += std::pow((tr[i] - zr[perm[i]]).norm(), q);
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(l), 1.0 / q);
}

// Cutoff metric with cardinality penalty, by exhaustive injection of the
// smaller set into the larger.
inline double brute_ospa(std::vector<rti::Vec2> t, std::vector<rti::Vec2> z,
                         double g, int q) {
    if (t.empty() && z.empty()) return 0.0;
    if (t.size() > z.size()) std::swap(t, z);
    const std::size_t n = t.size(), m = z.size();
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            acc += std::pow(std::min((t[i] - z[perm[i]]).norm(), g), q);
        acc += std::pow(g, q) * static_cast<double>(m - n);
        best = std::min(best, acc);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(m), 1.0 / q);
}

// Average linkage recomputed from scratch on every merge; pair ties break
// toward the lowest (then second-lowest) member voxel id. Merging is
// inclusive at the threshold.
inline std::vector<std::vector<int>> brute_hac(
    const std::vector<int>& voxel_ids, const std::vector<rti::Vec2>& positions,
    double threshold) {
    std::vector<std::vector<int>> clusters;   // member voxel ids, sorted
    std::vector<std::vector<rti::Vec2>> pts;  // matching positions
    for (std::size_t i = 0; i < voxel_ids.size(); ++i) {
        clusters.push_back({voxel_ids[i]});
        pts.push_back({positions[i]});
    }
    auto linkage = [&](std::size_t a, std::size_t b) {
        double acc = 0.0;
        for (const rti::Vec2& p : pts[a])
            for (const rti::Vec2& r : pts[b]) acc += (p - r).norm();
        return acc / static_cast<double>(pts[a].size() * pts[b].size());
    };
    while (clusters.size() > 1) {
        std::size_t ba = 0, bb = 0;
        double bd = std::numeric_limits<double>::infinity();
        int bl = 0, bh = 0;
        for (std::size_t a = 0; a < clusters.size(); ++a)
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double v = linkage(a, b);
                const int lo = std::min(clusters[a].front(), clusters[b].front());
                const int hi = std::max(clusters[a].front(), clusters[b].front());
                if (v < bd || (v == bd && (lo < bl || (lo == bl && hi < bh)))) {
                    bd = v;
                    ba = a;
                    bb = b;
                    bl = lo;
                    bh = hi;
                }
            }
        if (bd > threshold) break;
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(),
                            clusters[bb].end());
        std::sort(clusters[ba].begin(), clusters[ba].end());
        pts[ba].insert(pts[ba].end(), pts[bb].begin(), pts[bb].end());
        clusters.erase(clusters.begin() + static_cast<long>(bb));
        pts.erase(pts.begin() + static_cast<long>(bb));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return clusters;
}

// Point-in-ellipse test per voxel, with the closed-form ellipse area from
// the major axis (link length plus excess) and the foci separation.
inline rti::MatX brute_ellipse_weights(const rti::NetworkGeometry& geometry,
                                       const rti::VoxelGrid& grid,
                                       double lambda) {
    rti::MatX w = rti::MatX::Zero(geometry.link_count(), grid.voxel_count());
    for (int l = 0; l < geometry.link_count(); ++l) {
        const rti::Vec2 a = geometry.sensors[geometry.links[l].first];
        const rti::Vec2 b = geometry.sensors[geometry.links[l].second];
        const double d = (a - b).norm();
        const double major = d + lambda;
        const double area =
            M_PI * (major / 2.0) * (std::sqrt(major * major - d * d) / 2.0);
        for (int j = 0; j < grid.voxel_count(); ++j) {
            const rti::Vec2 c = grid.center(j);
            if ((c - a).norm() + (c - b).norm() < major) w(l, j) = 1.0 / area;
        }
    }
    return w;
}

// Residual of the normal equations the projection operator must satisfy:
// (W^T W + sigma_n^2 C^-1) pi = W^T, relative to the right-hand side.
inline double projection_residual(const rti::MatX& w, const rti::MatX& prior,
                                  double sigma_n, const rti::MatX& pi) {
    const rti::MatX lhs =
        w.transpose() * w + sigma_n * sigma_n * prior.inverse();
    const rti::MatX rhs = w.transpose();
    return (lhs * pi - rhs).norm() / rhs.norm();
}

// Tiny deterministic generator for test data; unrelated to the library rng.
class TestRand {
  public:
    explicit TestRand(std::uint64_t seed) : s_(seed ? seed : 1) {}

    double uniform(double lo, double hi) {
        s_ ^= s_ << 13;
        s_ ^= s_ >> 7;
        s_ ^= s_ << 17;
        const double u =
            static_cast<double>(s_ >> 11) / 9007199254740992.0;  // 2^53
        return lo + u * (hi - lo);
    }

    int uniform_int(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(uniform(0.0, 1.0) * (hi - lo + 1));
    }

  private:
    std::uint64_t s_;
};

}  // namespace oracle
