#include "rti/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rti {

bool EntranceRegion::contains(const Vec2& p) const {
    for (const auto& poly : polygons) {
        const int n = static_cast<int>(poly.size());
        if (n < 3) continue;
        // Ray cast toward +x; boundary points count as inside closely enough
        // for voxel centers, which never sit exactly on config coordinates.
        bool inside = false;
        for (int i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = poly[i];
            const Vec2& b = poly[j];
            if ((a.y() > p.y()) != (b.y() > p.y())) {
                const double x_cross =
                    a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
                if (p.x() < x_cross) inside = !inside;
            }
        }
        if (inside) return true;
    }
    return false;
}

EntranceRegion EntranceRegion::perimeter_band(const Rect& bounds, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("band width must be positive");
    auto rect = [](double x0, double y0, double x1, double y1) {
        return std::vector<Vec2>{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    };
    const double x0 = bounds.min_x, y0 = bounds.min_y;
    const double x1 = bounds.max_x(), y1 = bounds.max_y();
    EntranceRegion r;
    r.polygons.push_back(rect(x0, y0, x1, y0 + width));  // south
    r.polygons.push_back(rect(x0, y1 - width, x1, y1));  // north
    r.polygons.push_back(rect(x0, y0, x0 + width, y1));  // west
    r.polygons.push_back(rect(x1 - width, y0, x1, y1));  // east
    return r;
}

double update_threshold(ThresholdState& state,
                        const std::vector<int>& tracked_voxels,
                        const RtiImage& denoised) {
    if (denoised.stage != ImageStage::denoised)
        throw std::invalid_argument("threshold update expects a denoised image");

    if (tracked_voxels.empty()) {
        state.filter_initialized = false;
        state.threshold = std::max(2.0 * state.empty_baseline, state.empty_floor);
        return state.threshold;
    }

    double dimmest = std::numeric_limits<double>::max();
    for (int v : tracked_voxels) {
        if (v < 0 || v >= denoised.intensities.size())
            throw std::invalid_argument("tracked voxel outside image");
        dimmest = std::min(dimmest, denoised.intensities(v));
    }

    if (!state.filter_initialized) {
        state.filtered = dimmest;
        state.filter_initialized = true;
    } else {
        state.filtered =
            state.alpha_f * state.filtered + (1.0 - state.alpha_f) * dimmest;
    }
    state.threshold = state.beta * state.filtered;
    return state.threshold;
}

MaskedImage mask_image(const RtiImage& denoised, double threshold) {
    if (denoised.stage != ImageStage::denoised)
        throw std::invalid_argument("mask expects a denoised image");

    MaskedImage out;
    out.image.frame_index = denoised.frame_index;
    out.image.stage = ImageStage::masked;
    out.image.intensities = VecX::Zero(denoised.intensities.size());
    for (int j = 0; j < denoised.intensities.size(); ++j) {
        const double v = denoised.intensities(j);
        if (v > threshold) {  // strictly above
            out.image.intensities(j) = v;
            if (v > 0.0) out.voxels.push_back(j);
        }
    }
    return out;
}

namespace {

// Candidate pair ordering used for every HAC decision: nearest first, then
// by the merged clusters' smallest voxel ids so results are reproducible and
// independent of input order.
struct PairKey {
    double dist;
    int rep_lo;
    int rep_hi;
    bool operator<(const PairKey& o) const {
        if (dist != o.dist) return dist < o.dist;
        if (rep_lo != o.rep_lo) return rep_lo < o.rep_lo;
        return rep_hi < o.rep_hi;
    }
};

PairKey make_key(double d, int rep_a, int rep_b) {
    return {d, std::min(rep_a, rep_b), std::max(rep_a, rep_b)};
}

}  // namespace

std::vector<std::vector<int>> hac_cluster(const std::vector<int>& voxel_ids,
                                          const std::vector<Vec2>& positions,
                                          double merge_threshold) {
    const int n = static_cast<int>(voxel_ids.size());
    if (positions.size() != voxel_ids.size())
        throw std::invalid_argument("voxel/position length mismatch");
    if (merge_threshold < 0.0)
        throw std::invalid_argument("merge threshold must be non-negative");
    if (n == 0) return {};

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return voxel_ids[a] < voxel_ids[b]; });
    for (int i = 1; i < n; ++i)
        if (voxel_ids[order[i]] == voxel_ids[order[i - 1]])
            throw std::invalid_argument("duplicate voxel id in cluster input");

    std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
    auto d = [&](int a, int b) -> double& { return dist[a * n + b]; };
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double v =
                (positions[order[a]] - positions[order[b]]).norm();
            d(a, b) = v;
            d(b, a) = v;
        }

    std::vector<char> active(n, 1);
    std::vector<int> size(n, 1), rep(n);
    std::vector<std::vector<int>> members(n);
    for (int a = 0; a < n; ++a) {
        rep[a] = voxel_ids[order[a]];
        members[a] = {voxel_ids[order[a]]};
    }

    // Per-row nearest-neighbor cache; only rows whose neighbor was merged
    // away need a full rescan, which keeps the merge loop near O(n^2).
    std::vector<int> nn(n, -1);
    std::vector<PairKey> nn_key(n);
    auto rescan = [&](int a) {
        nn[a] = -1;
        for (int b = 0; b < n; ++b) {
            if (b == a || !active[b]) continue;
            const PairKey key = make_key(d(a, b), rep[a], rep[b]);
            if (nn[a] < 0 || key < nn_key[a]) {
                nn[a] = b;
                nn_key[a] = key;
            }
        }
    };
    for (int a = 0; a < n; ++a) rescan(a);

    int remaining = n;
    while (remaining > 1) {
        int best = -1;
        for (int a = 0; a < n; ++a) {
            if (!active[a] || nn[a] < 0) continue;
            if (best < 0 || nn_key[a] < nn_key[best]) best = a;
        }
        if (best < 0 || nn_key[best].dist > merge_threshold) break;

        int a = best, b = nn[best];
        if (rep[b] < rep[a]) std::swap(a, b);  // survivor keeps the lowest id

        // Average linkage between merged cluster and everything else is the
        // size-weighted mean of the two old distances.
        for (int c = 0; c < n; ++c) {
            if (!active[c] || c == a || c == b) continue;
            const double v = (size[a] * d(a, c) + size[b] * d(b, c)) /
                             static_cast<double>(size[a] + size[b]);
            d(a, c) = v;
            d(c, a) = v;
        }
        size[a] += size[b];
        members[a].insert(members[a].end(), members[b].begin(), members[b].end());
        active[b] = 0;
        --remaining;

        rescan(a);
        for (int c = 0; c < n; ++c) {
            if (!active[c] || c == a) continue;
            if (nn[c] == a || nn[c] == b) {
                rescan(c);
            } else {
                const PairKey key = make_key(d(c, a), rep[c], rep[a]);
                if (key < nn_key[c]) {
                    nn[c] = a;
                    nn_key[c] = key;
                }
            }
        }
    }

    std::vector<std::vector<int>> clusters;
    for (int a = 0; a < n; ++a) {
        if (!active[a]) continue;
        std::sort(members[a].begin(), members[a].end());
        clusters.push_back(std::move(members[a]));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return clusters;
}

std::vector<Observation> select_cluster_heads(
    const std::vector<std::vector<int>>& clusters, const MaskedImage& masked,
    const VoxelGrid& grid, const std::vector<TrackView>& tracks,
    const EntranceRegion& entrance, double min_intensity_ratio) {
    std::vector<Observation> kept;
    if (clusters.empty()) return kept;

    double peak = 0.0;
    for (int v : masked.voxels) peak = std::max(peak, masked.image.intensities(v));
    if (peak <= 0.0) return kept;

    for (const auto& cluster : clusters) {
        int head = -1;
        double head_val = -std::numeric_limits<double>::max();
        for (int v : cluster) {
            const double val = masked.image.intensities(v);
            if (val > head_val) {  // members are sorted, so ties keep the lowest id
                head_val = val;
                head = v;
            }
        }
        if (head < 0) continue;

        Observation obs;
        obs.voxel = head;
        obs.position = grid.center(head);
        obs.intensity = head_val / peak;
        obs.in_entrance = entrance.contains(obs.position);

        bool keep = obs.in_entrance;
        if (!keep && !tracks.empty()) {
            double dimmest_gating = std::numeric_limits<double>::max();
            bool gated = false;
            for (const TrackView& t : tracks) {
                if ((obs.position - t.position).norm() < t.gate_radius) {
                    gated = true;
                    dimmest_gating = std::min(dimmest_gating, t.last_intensity);
                }
            }
            keep = gated && obs.intensity >= min_intensity_ratio * dimmest_gating;
        }
        if (keep) kept.push_back(obs);
    }
    return kept;
}

}  // namespace rti
