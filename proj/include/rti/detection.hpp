#pragma once

#include <vector>

#include "rti/common.hpp"
#include "rti/geometry.hpp"
#include "rti/imaging.hpp"

namespace rti {

// Union of convex/concave polygons marking where people can enter the area.
// New tracks may only be born from detections inside this region.
struct EntranceRegion {
    std::vector<std::vector<Vec2>> polygons;

    bool contains(const Vec2& p) const;

    // Band of the given width just inside the area perimeter, as four
    // overlapping rectangles.
    static EntranceRegion perimeter_band(const Rect& bounds, double width);
};

// Detection threshold with two regimes: while targets are tracked it follows
// a low-passed version of the dimmest tracked intensity; with nothing
// tracked it falls back to a multiple of the calibrated empty-area baseline,
// floored to stay meaningful when the baseline is tiny.
struct ThresholdState {
    double alpha_f = 0.9;  // low-pass memory
    double beta = 0.8;     // fraction of the filtered intensity
    double empty_baseline = 0.0;
    double empty_floor = 0.01;
    double filtered = 0.0;
    double threshold = 0.0;
    bool filter_initialized = false;
};

// tracked_voxels: last assigned image voxel of every confirmed track. The
// filter seeds directly from the first minimum after a period with no
// confirmed tracks.
double update_threshold(ThresholdState& state,
                        const std::vector<int>& tracked_voxels,
                        const RtiImage& denoised);

struct MaskedImage {
    RtiImage image;           // masked stage; below-threshold voxels zeroed
    std::vector<int> voxels;  // indices with strictly positive masked value
};

MaskedImage mask_image(const RtiImage& denoised, double threshold);

// Agglomerative average-linkage clustering of voxel positions; merging stops
// once the closest pair of clusters is farther apart than merge_threshold.
// Returns clusters as sorted voxel-id lists, ordered by first member. The
// result does not depend on the order of the input voxels; distance ties
// break toward lower voxel ids.
std::vector<std::vector<int>> hac_cluster(const std::vector<int>& voxel_ids,
                                          const std::vector<Vec2>& positions,
                                          double merge_threshold);

// What the tracker needs to know about an existing track to vet detections.
struct TrackView {
    Vec2 position;
    double gate_radius = 0.0;
    double last_intensity = 0.0;  // normalized, from its last assignment
};

struct Observation {
    int voxel = -1;
    Vec2 position = Vec2::Zero();
    double intensity = 0.0;  // normalized to the masked-image maximum
    bool in_entrance = false;
};

// Reduces each cluster to its brightest voxel, then keeps heads that are
// either inside the entrance region or both gated by an existing track and
// at least min_intensity_ratio of the dimmest gating track's intensity.
std::vector<Observation> select_cluster_heads(
    const std::vector<std::vector<int>>& clusters, const MaskedImage& masked,
    const VoxelGrid& grid, const std::vector<TrackView>& tracks,
    const EntranceRegion& entrance, double min_intensity_ratio);

}  // namespace rti
