#include "rti/tracking.hpp"

#include <algorithm>

namespace rti {

int TrackSet::confirmed_count() const {
    int n = 0;
    for (const Track& t : tracks)
        if (t.status == TrackStatus::confirmed) ++n;
    return n;
}

MatX build_association(const std::vector<Observation>& observations,
                       const std::vector<Track>& tracks) {
    MatX cost(observations.size(), tracks.size());
    for (std::size_t i = 0; i < observations.size(); ++i)
        for (std::size_t j = 0; j < tracks.size(); ++j) {
            const double dist = (observations[i].position - tracks[j].mean).norm();
            cost(i, j) = dist < tracks[j].gate_radius ? dist : kInfeasible;
        }
    return cost;
}

void kf_predict(Track& track, double process_sigma) {
    track.cov += (process_sigma * process_sigma) * Mat2::Identity();
}

void kf_update(Track& track, const Vec2& z, double measurement_sigma) {
    const Mat2 s = track.cov + (measurement_sigma * measurement_sigma) * Mat2::Identity();
    const Mat2 gain = track.cov * s.inverse();
    track.mean += gain * (z - track.mean);
    track.cov = (Mat2::Identity() - gain) * track.cov;
    track.cov = 0.5 * (track.cov + track.cov.transpose());  // keep symmetric
}

namespace {

void push_history(Track& t, bool assigned, int window) {
    t.history.push_back(assigned);
    while (static_cast<int>(t.history.size()) > window) t.history.pop_front();
}

int assigned_in_window(const Track& t) {
    return static_cast<int>(std::count(t.history.begin(), t.history.end(), true));
}

}  // namespace

void step_lifecycle(TrackSet& set, const Assignment& assignment,
                    const std::vector<Observation>& observations,
                    const TrackingParams& params) {
    std::vector<int> track_to_obs(set.tracks.size(), -1);
    for (const auto& [obs, trk] : assignment.pairs) track_to_obs[trk] = obs;

    for (std::size_t j = 0; j < set.tracks.size(); ++j) {
        Track& t = set.tracks[j];
        kf_predict(t, params.process_sigma);
        const int obs = track_to_obs[j];
        if (obs >= 0) {
            const Observation& o = observations[obs];
            kf_update(t, o.position, params.measurement_sigma);
            t.miss_streak = 0;
            t.last_intensity = o.intensity;
            t.last_voxel = o.voxel;
            push_history(t, true, params.window);
            if (t.status == TrackStatus::candidate &&
                assigned_in_window(t) >= params.confirm_count)
                t.status = TrackStatus::confirmed;
        } else {
            ++t.miss_streak;
            push_history(t, false, params.window);
        }
    }

    std::erase_if(set.tracks, [&](const Track& t) {
        return t.miss_streak >= params.delete_misses;
    });

    // Unassigned detections can only start tracks where people can actually
    // appear; elsewhere they are treated as noise.
    for (std::size_t i = 0; i < observations.size(); ++i) {
        const bool assigned = std::any_of(
            assignment.pairs.begin(), assignment.pairs.end(),
            [&](const auto& p) { return p.first == static_cast<int>(i); });
        if (assigned || !observations[i].in_entrance) continue;
        Track t;
        t.id = set.next_id++;
        t.status = TrackStatus::candidate;
        t.mean = observations[i].position;
        const double half_gate = params.gate_radius / 2.0;
        t.cov = (half_gate * half_gate) * Mat2::Identity();
        t.gate_radius = params.gate_radius;
        t.last_intensity = observations[i].intensity;
        t.last_voxel = observations[i].voxel;
        set.tracks.push_back(std::move(t));
    }

    for (std::size_t a = 0; a < set.tracks.size(); ++a) {
        bool close = false;
        for (std::size_t b = 0; b < set.tracks.size() && !close; ++b)
            if (b != a && (set.tracks[a].mean - set.tracks[b].mean).norm() <
                              params.intersect_distance)
                close = true;
        set.tracks[a].intersecting = close;
        set.tracks[a].gate_radius =
            close ? 2.0 * params.gate_radius : params.gate_radius;
    }
}

}  // namespace rti
