#include "rti/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "rti/assignment.hpp"

namespace rti {

TrackerPipeline::TrackerPipeline(const RunConfig& cfg,
                                 const CalibrationProfile& profile,
                                 ProjectionOperator projection)
    : cfg_(cfg),
      profile_(profile),
      projection_(std::move(projection)),
      grid_(cfg_.make_grid()),
      entrance_(cfg_.make_entrance()),
      change_(profile_.mean_rss, profile_.fade, cfg_.max_hold_frames) {
    if (projection_.pi.rows() != grid_.voxel_count())
        throw std::invalid_argument("projection does not match the voxel grid");
    if (profile_.mean_rss.rows() != projection_.pi.cols())
        throw std::invalid_argument("profile does not match the link set");
    threshold_.alpha_f = cfg_.alpha_f;
    threshold_.beta = cfg_.beta;
    threshold_.empty_baseline = profile_.empty_baseline;
    threshold_.empty_floor = cfg_.empty_floor;
}

FrameResult TrackerPipeline::process(const Frame& frame) {
    const auto t0 = std::chrono::steady_clock::now();

    const VecX y = change_.compute(frame);
    const RtiImage raw = estimate_image(projection_, y, frame.index);
    RtiImage denoised =
        gaussian_denoise(raw, grid_, cfg_.kernel_sigma, cfg_.kernel_radius);

    std::vector<int> tracked_voxels;
    for (const Track& t : tracks_.tracks)
        if (t.status == TrackStatus::confirmed && t.last_voxel >= 0)
            tracked_voxels.push_back(t.last_voxel);
    const double threshold = update_threshold(threshold_, tracked_voxels, denoised);

    MaskedImage masked = mask_image(denoised, threshold);
    if (static_cast<int>(masked.voxels.size()) > cfg_.voxel_cap) {
        // Keep the brightest voxels; everything else leaves the detection
        // set entirely. Ties keep the lower voxel index.
        std::vector<int> order = masked.voxels;
        std::nth_element(order.begin(), order.begin() + cfg_.voxel_cap - 1,
                         order.end(), [&](int a, int b) {
                             const double ia = masked.image.intensities(a);
                             const double ib = masked.image.intensities(b);
                             return ia != ib ? ia > ib : a < b;
                         });
        order.resize(cfg_.voxel_cap);
        std::sort(order.begin(), order.end());
        for (int v : masked.voxels)
            if (!std::binary_search(order.begin(), order.end(), v))
                masked.image.intensities(v) = 0.0;
        masked.voxels = std::move(order);
    }

    std::vector<Vec2> positions;
    positions.reserve(masked.voxels.size());
    for (int v : masked.voxels) positions.push_back(grid_.center(v));
    const std::vector<std::vector<int>> clusters =
        hac_cluster(masked.voxels, positions, cfg_.cluster_threshold);

    std::vector<TrackView> views;
    views.reserve(tracks_.tracks.size());
    for (const Track& t : tracks_.tracks)
        views.push_back({t.mean, t.gate_radius, t.last_intensity});
    const std::vector<Observation> observations = select_cluster_heads(
        clusters, masked, grid_, views, entrance_, cfg_.min_intensity_ratio);

    const MatX cost = build_association(observations, tracks_.tracks);
    const Assignment assignment =
        cfg_.assoc == AssocMethod::gnn ? assign_gnn(cost) : assign_snn(cost);
    step_lifecycle(tracks_, assignment, observations, cfg_.tracking);

    FrameResult out;
    out.frame = frame.index;
    out.timestamp = frame.timestamp;
    out.threshold = threshold;
    out.denoised = std::move(denoised);
    out.observations = observations;
    out.tracks.reserve(tracks_.tracks.size());
    for (const Track& t : tracks_.tracks) {
        TrackRecord rec;
        rec.id = t.id;
        rec.status = t.status;
        rec.position = t.mean;
        rec.gate_radius = t.gate_radius;
        rec.intersecting = t.intersecting;
        out.tracks.push_back(rec);
    }
    out.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return out;
}

}  // namespace rti
