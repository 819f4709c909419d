#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rti/common.hpp"
#include "rti/config.hpp"
#include "rti/geometry.hpp"
#include "rti/trace.hpp"

namespace rti {

// Self-contained generator so traces are bit-identical across platforms and
// standard library versions: splitmix64 underneath, Box-Muller for normals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // standard normal
    Rng fork(std::uint64_t stream);  // independent deterministic substream

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// A person's scripted walk: appears at enter_frame on the first waypoint,
// follows the polyline at constant speed, holds the last waypoint once the
// path is exhausted, disappears at exit_frame.
struct TargetScript {
    int id = 0;
    long enter_frame = 0;
    long exit_frame = 0;
    std::vector<Vec2> waypoints;
    double speed = 1.0;  // m/s

    Vec2 position_at(double seconds_since_enter) const;
    double path_length() const;
};

struct Scenario {
    std::vector<TargetScript> targets;
    long frame_count = 0;
    std::uint64_t seed = 1;
    double noise_sigma = 1.0;       // per-record RSS noise, dB
    double drop_rate = 0.02;        // per-record loss probability
    double target_attenuation = 5.0;  // peak field change per person, dB
    double footprint_sigma = 0.3;   // person footprint width, meters
    double fade_spread = 8.0;       // synthesized fade range, dB
};

// Synthesized static channel state for a deployment: per-(link, channel)
// empty-area mean RSS (already quantized to the trace's 0.1 dB resolution)
// and the matching fade levels.
struct SynthChannelState {
    MatX mean_rss;  // link x channel, dBm
    MatX fade;      // link x channel, dB
};

SynthChannelState synthesize_fades(const NetworkGeometry& geometry,
                                   const std::vector<int>& channels,
                                   const std::vector<double>& tx_power_dbm,
                                   double fade_spread, std::uint64_t seed);

// Runs the forward model frame by frame and hands every packet record to
// sink in deterministic order. Truth output is optional.
void simulate(const RunConfig& cfg, const Scenario& scenario,
              const WeightMatrix& weights, const VoxelGrid& grid,
              const SynthChannelState& channel_state,
              const std::function<void(const TraceRecord&)>& sink,
              std::vector<TruthFrame>* truth_out);

struct PresetBundle {
    std::string name;
    RunConfig config;
    Scenario scenario;
    long calibration_frames = 120;
};

// Named end-to-end scenarios on three deployments (open area, apartment,
// office). The -cross variants send half the walkers around the loop in the
// opposite direction so paths repeatedly intersect.
PresetBundle scripted_paths(const std::string& preset);
std::vector<std::string> preset_names();

// Distinct close-approach episodes between any two targets: counts each dip
// of a pair's distance below `near` once, re-armed when they separate past
// `far`. Used to sanity-check the -cross presets.
int count_crossings(const std::vector<TruthFrame>& truth, double near = 0.7,
                    double far = 1.4);

}  // namespace rti
