#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "rti/common.hpp"
#include "rti/geometry.hpp"
#include "rti/imaging.hpp"
#include "rti/tracking.hpp"

namespace rti {

// One received packet measurement. Serialized as a single line:
// frame timestamp tx rx channel rss, with rss kept to one decimal.
struct TraceRecord {
    long frame = 0;
    double timestamp = 0.0;
    int tx = 0;
    int rx = 0;
    int channel = 0;
    double rss = 0.0;
};

class TraceWriter {
  public:
    explicit TraceWriter(const std::string& path);
    ~TraceWriter();
    TraceWriter(const TraceWriter&) = delete;
    TraceWriter& operator=(const TraceWriter&) = delete;

    void write(const TraceRecord& rec);
    void close();

  private:
    std::FILE* f_ = nullptr;
    std::string path_;
};

// Streams a trace file and assembles link x channel frames. Records must be
// grouped by frame with non-decreasing frame indices; tx/rx duplicates of
// the same link in one frame are averaged (direction fusion). Memory use is
// one frame regardless of trace length.
class TraceReader {
  public:
    TraceReader(const std::string& path, const NetworkGeometry& geometry,
                const std::vector<int>& channels);
    ~TraceReader();
    TraceReader(const TraceReader&) = delete;
    TraceReader& operator=(const TraceReader&) = delete;

    // Returns frames in file order; nullopt at end of file.
    std::optional<Frame> next();

  private:
    std::optional<TraceRecord> read_record();
    int link_index(int tx, int rx) const;

    std::FILE* f_ = nullptr;
    std::string path_;
    NetworkGeometry geometry_;  // owned: readers outlive caller temporaries
    std::vector<int> channel_col_;  // channel number -> column, -1 unknown
    std::optional<TraceRecord> pending_;
    long last_frame_ = -1;
    long line_ = 0;
};

// Ground-truth sidecar: explicit frame range plus one line per
// (frame, target) position.
struct TruthFrame {
    long frame = 0;
    std::vector<std::pair<int, Vec2>> targets;  // (target id, position)
};

void save_truth(const std::string& path, const std::vector<TruthFrame>& truth);
std::vector<TruthFrame> load_truth(const std::string& path);

// Track log: one F line per processed frame (frame, timestamp, track count)
// and one T line per live track.
struct TrackRecord {
    std::uint64_t id = 0;
    TrackStatus status = TrackStatus::candidate;
    Vec2 position = Vec2::Zero();
    double gate_radius = 0.0;
    bool intersecting = false;
};

struct TrackLogFrame {
    long frame = 0;
    double timestamp = 0.0;
    std::vector<TrackRecord> tracks;
};

class TrackLogWriter {
  public:
    explicit TrackLogWriter(const std::string& path);
    ~TrackLogWriter();
    TrackLogWriter(const TrackLogWriter&) = delete;
    TrackLogWriter& operator=(const TrackLogWriter&) = delete;

    void write(const TrackLogFrame& frame);
    void close();

  private:
    std::FILE* f_ = nullptr;
    std::string path_;
};

std::vector<TrackLogFrame> load_track_log(const std::string& path);

// Per-frame processing time sidecar. Kept out of the track log so logs stay
// reproducible run to run.
void save_timing(const std::string& path, const std::vector<long>& frames,
                 const std::vector<double>& ms);
std::vector<double> load_timing(const std::string& path);

// Raw image dump: per frame a 4-byte little-endian frame index followed by
// voxel_count little-endian 32-bit floats in row-major voxel order.
class ImageDumpWriter {
  public:
    ImageDumpWriter(const std::string& path, int voxel_count);
    ~ImageDumpWriter();
    ImageDumpWriter(const ImageDumpWriter&) = delete;
    ImageDumpWriter& operator=(const ImageDumpWriter&) = delete;

    void write(long frame, const VecX& intensities);
    void close();

  private:
    std::FILE* f_ = nullptr;
    std::string path_;
    int voxel_count_ = 0;
};

std::vector<std::pair<long, std::vector<float>>> load_image_dump(
    const std::string& path, int voxel_count);

}  // namespace rti
