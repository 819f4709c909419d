#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rti/config.hpp"
#include "rti/geometry.hpp"

namespace rti {

// The subcommand bodies live here, behind plain option structs, so tests
// can drive complete runs without spawning processes. Each returns the
// process exit code for the success path; error paths throw
// (std::invalid_argument for bad inputs, which the CLI maps to exit 2).

struct SimulateOptions {
    std::string preset;
    std::string out_prefix;   // writes <prefix>.trace/.truth/.config.json
                              // and <prefix>_calib.trace
    std::uint64_t seed = 1;
};

struct CalibrateOptions {
    std::string config_path;
    std::string trace_path;
    std::string profile_path;  // output
    std::string pi_cache;      // optional projection cache file
};

struct TrackOptions {
    std::string config_path;
    std::string profile_path;
    std::string trace_path;
    std::string log_path;     // output
    std::string timing_path;  // optional per-frame timing sidecar
    std::string dump_path;    // optional denoised-image dump
    std::string pi_cache;
    std::optional<AssocMethod> assoc;  // overrides the config when set
};

struct EvalOptions {
    std::string log_path;
    std::string truth_path;
    std::string report_path;   // optional JSON report
    std::string timing_path;   // optional; adds a timing section
    std::string config_path;   // optional; supplies cutoffs and q
};

int cmd_simulate(const SimulateOptions& opt);
int cmd_calibrate(const CalibrateOptions& opt);
int cmd_track(const TrackOptions& opt);
int cmd_eval(const EvalOptions& opt);

// Shared projection-with-cache helper: returns the cached operator when the
// cache file matches the config's content hash, otherwise builds and, if a
// cache path was given, saves it.
ProjectionOperator obtain_projection(const RunConfig& cfg,
                                     const std::string& cache_path);

}  // namespace rti
