#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "rti/assignment.hpp"
#include "rti/common.hpp"
#include "rti/detection.hpp"

namespace rti {

enum class TrackStatus { candidate, confirmed };

struct Track {
    std::uint64_t id = 0;
    TrackStatus status = TrackStatus::candidate;
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Identity();
    double gate_radius = 0.0;
    double last_intensity = 0.0;  // normalized intensity at last assignment
    int last_voxel = -1;          // image voxel of last assigned head
    std::deque<bool> history;     // assignment outcomes, newest last
    int miss_streak = 0;
    bool intersecting = false;
};

struct TrackingParams {
    double gate_radius = 2.0;        // base gate, meters
    double intersect_distance = 2.0; // below this the gates double
    double process_sigma = 0.15;     // random-walk step per frame, meters
    double measurement_sigma = 0.3;  // head position noise, meters
    int window = 10;                 // history length in frames
    int confirm_count = 3;           // assignments in window to confirm
    int delete_misses = 10;          // consecutive misses to delete
};

struct TrackSet {
    std::vector<Track> tracks;
    std::uint64_t next_id = 1;

    int confirmed_count() const;
};

// Gated distance matrix, observations x tracks; pairs outside a track's
// gate are infeasible.
MatX build_association(const std::vector<Observation>& observations,
                       const std::vector<Track>& tracks);

// Brownian position model: the mean holds, uncertainty grows.
void kf_predict(Track& track, double process_sigma);
void kf_update(Track& track, const Vec2& z, double measurement_sigma);

// Applies one frame's association outcome: filter updates for assigned
// tracks, coasting for unassigned ones, candidate confirmation, deletion
// after a run of misses, birth of candidates from unassigned entrance-region
// observations, and gate doubling while two tracks are close together.
void step_lifecycle(TrackSet& set, const Assignment& assignment,
                    const std::vector<Observation>& observations,
                    const TrackingParams& params);

}  // namespace rti
