#pragma once

#include <vector>

#include "rti/calibration.hpp"
#include "rti/config.hpp"
#include "rti/detection.hpp"
#include "rti/geometry.hpp"
#include "rti/imaging.hpp"
#include "rti/trace.hpp"
#include "rti/tracking.hpp"

namespace rti {

// Everything one processed frame produces. The denoised image is kept so
// callers can dump it; track records are a snapshot taken after the
// lifecycle step.
struct FrameResult {
    long frame = -1;
    double timestamp = 0.0;
    double threshold = 0.0;
    RtiImage denoised;
    std::vector<Observation> observations;
    std::vector<TrackRecord> tracks;
    double elapsed_ms = 0.0;
};

// Frame-in, tracks-out. Owns all per-run state: the change estimator with
// its hold-last-value memory, the adaptive threshold filter and the track
// set. Construct once per recording and feed frames in order.
class TrackerPipeline {
  public:
    TrackerPipeline(const RunConfig& cfg, const CalibrationProfile& profile,
                    ProjectionOperator projection);
    // change_ holds references into profile_.
    TrackerPipeline(const TrackerPipeline&) = delete;
    TrackerPipeline& operator=(const TrackerPipeline&) = delete;

    FrameResult process(const Frame& frame);

    const TrackSet& track_set() const { return tracks_; }
    const VoxelGrid& grid() const { return grid_; }
    const EntranceRegion& entrance() const { return entrance_; }
    long unavailable_links() const { return change_.unavailable_links(); }

  private:
    RunConfig cfg_;
    CalibrationProfile profile_;  // change_ keeps references into this
    ProjectionOperator projection_;
    VoxelGrid grid_;
    EntranceRegion entrance_;
    ChangeEstimator change_;
    ThresholdState threshold_;
    TrackSet tracks_;
};

}  // namespace rti
