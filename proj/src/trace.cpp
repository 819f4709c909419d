#include "rti/trace.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace rti {

namespace {

constexpr const char* kTraceHeader = "# rti-trace v1";
constexpr const char* kTruthHeader = "# rti-truth v1";
constexpr const char* kLogHeader = "# rti-tracklog v1";
constexpr const char* kTimingHeader = "# rti-timing v1";

std::FILE* open_or_throw(const std::string& path, const char* mode) {
    std::FILE* f = std::fopen(path.c_str(), mode);
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

// fgets into a std::string, stripping the trailing newline. False on EOF.
bool read_line(std::FILE* f, std::string& out) {
    char buf[512];
    if (!std::fgets(buf, sizeof(buf), f)) return false;
    std::size_t n = std::strlen(buf);
    while (n > 0 && (buf[n - 1] == '\n' || buf[n - 1] == '\r')) --n;
    out.assign(buf, n);
    return true;
}

void expect_header(std::FILE* f, const char* header, const std::string& path) {
    std::string line;
    if (!read_line(f, line) || line != header) {
        std::fclose(f);
        throw std::runtime_error(path + ": missing header '" + header + "'");
    }
}

}  // namespace

TraceWriter::TraceWriter(const std::string& path) : path_(path) {
    f_ = open_or_throw(path, "w");
    std::fprintf(f_, "%s\n", kTraceHeader);
}

TraceWriter::~TraceWriter() { close(); }

void TraceWriter::write(const TraceRecord& rec) {
    if (!f_) throw std::runtime_error("trace writer already closed");
    std::fprintf(f_, "%ld %.3f %d %d %d %.1f\n", rec.frame, rec.timestamp,
                 rec.tx, rec.rx, rec.channel, rec.rss);
}

void TraceWriter::close() {
    if (f_) {
        if (std::fclose(f_) != 0)
            throw std::runtime_error("close failed on " + path_);
        f_ = nullptr;
    }
}

TraceReader::TraceReader(const std::string& path,
                         const NetworkGeometry& geometry,
                         const std::vector<int>& channels)
    : path_(path), geometry_(geometry) {
    f_ = open_or_throw(path, "r");
    expect_header(f_, kTraceHeader, path);
    line_ = 1;
    channel_col_.assign(32, -1);
    for (std::size_t c = 0; c < channels.size(); ++c) {
        if (channels[c] < 0 || channels[c] >= 32)
            throw std::invalid_argument("channel number out of range");
        channel_col_[channels[c]] = static_cast<int>(c);
    }
}

TraceReader::~TraceReader() {
    if (f_) std::fclose(f_);
}

int TraceReader::link_index(int tx, int rx) const {
    const int r = geometry_.sensor_count();
    if (tx < 0 || rx < 0 || tx >= r || rx >= r || tx == rx) return -1;
    int i = std::min(tx, rx), j = std::max(tx, rx);
    // lexicographic pair enumeration: all pairs (i, *) precede (i+1, *)
    return i * (2 * r - i - 1) / 2 + (j - i - 1);
}

std::optional<TraceRecord> TraceReader::read_record() {
    std::string line;
    while (read_line(f_, line)) {
        ++line_;
        if (line.empty() || line[0] == '#') continue;
        TraceRecord rec;
        if (std::sscanf(line.c_str(), "%ld %lf %d %d %d %lf", &rec.frame,
                        &rec.timestamp, &rec.tx, &rec.rx, &rec.channel,
                        &rec.rss) != 6)
            throw std::runtime_error(path_ + ":" + std::to_string(line_) +
                                     ": malformed trace record");
        return rec;
    }
    return std::nullopt;
}

std::optional<Frame> TraceReader::next() {
    std::optional<TraceRecord> rec = pending_ ? pending_ : read_record();
    pending_.reset();
    if (!rec) return std::nullopt;

    const int m = geometry_.link_count();
    const int k = static_cast<int>(
        std::count_if(channel_col_.begin(), channel_col_.end(),
                      [](int c) { return c >= 0; }));
    Frame frame;
    frame.index = rec->frame;
    frame.timestamp = rec->timestamp;
    frame.rss = MatX::Zero(m, k);
    Eigen::MatrixXi count = Eigen::MatrixXi::Zero(m, k);

    if (frame.index <= last_frame_)
        throw std::runtime_error(path_ + ": frame indices must increase (" +
                                 std::to_string(frame.index) + " after " +
                                 std::to_string(last_frame_) + ")");

    while (rec && rec->frame == frame.index) {
        const int l = link_index(rec->tx, rec->rx);
        const int c = (rec->channel >= 0 &&
                       rec->channel < static_cast<int>(channel_col_.size()))
                          ? channel_col_[rec->channel]
                          : -1;
        if (l < 0)
            throw std::runtime_error(path_ + ": record references unknown sensors " +
                                     std::to_string(rec->tx) + "," +
                                     std::to_string(rec->rx));
        if (c < 0)
            throw std::runtime_error(path_ + ": record uses unconfigured channel " +
                                     std::to_string(rec->channel));
        frame.rss(l, c) += rec->rss;
        ++count(l, c);
        rec = read_record();
    }
    if (rec) {
        if (rec->frame < frame.index)
            throw std::runtime_error(path_ + ": frame indices must increase");
        pending_ = rec;
    }
    last_frame_ = frame.index;

    for (int l = 0; l < m; ++l)
        for (int c = 0; c < k; ++c)
            frame.rss(l, c) = count(l, c) > 0
                                  ? frame.rss(l, c) / count(l, c)
                                  : std::numeric_limits<double>::quiet_NaN();
    return frame;
}

void save_truth(const std::string& path, const std::vector<TruthFrame>& truth) {
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "%s\n", kTruthHeader);
    const long first = truth.empty() ? 0 : truth.front().frame;
    const long last = truth.empty() ? -1 : truth.back().frame;
    std::fprintf(f, "# frames %ld %ld\n", first, last);
    for (const TruthFrame& tf : truth)
        for (const auto& [id, pos] : tf.targets)
            std::fprintf(f, "%ld %d %.4f %.4f\n", tf.frame, id, pos.x(), pos.y());
    if (std::fclose(f) != 0) throw std::runtime_error("close failed on " + path);
}

std::vector<TruthFrame> load_truth(const std::string& path) {
    std::FILE* f = open_or_throw(path, "r");
    expect_header(f, kTruthHeader, path);
    std::string line;
    long first = 0, last = -1;
    if (!read_line(f, line) ||
        std::sscanf(line.c_str(), "# frames %ld %ld", &first, &last) != 2) {
        std::fclose(f);
        throw std::runtime_error(path + ": missing frame range line");
    }
    if (last < first) {
        std::fclose(f);
        throw std::runtime_error(path + ": empty frame range");
    }

    std::vector<TruthFrame> truth(static_cast<std::size_t>(last - first + 1));
    for (long k = first; k <= last; ++k)
        truth[static_cast<std::size_t>(k - first)].frame = k;

    while (read_line(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        long frame;
        int id;
        double x, y;
        if (std::sscanf(line.c_str(), "%ld %d %lf %lf", &frame, &id, &x, &y) != 4) {
            std::fclose(f);
            throw std::runtime_error(path + ": malformed truth record");
        }
        if (frame < first || frame > last) {
            std::fclose(f);
            throw std::runtime_error(path + ": truth record outside frame range");
        }
        truth[static_cast<std::size_t>(frame - first)].targets.emplace_back(
            id, Vec2(x, y));
    }
    std::fclose(f);
    return truth;
}

TrackLogWriter::TrackLogWriter(const std::string& path) : path_(path) {
    f_ = open_or_throw(path, "w");
    std::fprintf(f_, "%s\n", kLogHeader);
}

TrackLogWriter::~TrackLogWriter() { close(); }

void TrackLogWriter::write(const TrackLogFrame& frame) {
    if (!f_) throw std::runtime_error("track log writer already closed");
    std::fprintf(f_, "F %ld %.3f %zu\n", frame.frame, frame.timestamp,
                 frame.tracks.size());
    for (const TrackRecord& t : frame.tracks)
        std::fprintf(f_, "T %ld %" PRIu64 " %s %.4f %.4f %.2f %d\n", frame.frame,
                     t.id, t.status == TrackStatus::confirmed ? "confirmed" : "candidate",
                     t.position.x(), t.position.y(), t.gate_radius,
                     t.intersecting ? 1 : 0);
}

void TrackLogWriter::close() {
    if (f_) {
        if (std::fclose(f_) != 0)
            throw std::runtime_error("close failed on " + path_);
        f_ = nullptr;
    }
}

std::vector<TrackLogFrame> load_track_log(const std::string& path) {
    std::FILE* f = open_or_throw(path, "r");
    expect_header(f, kLogHeader, path);
    std::vector<TrackLogFrame> frames;
    std::string line;
    long ln = 1;
    while (read_line(f, line)) {
        ++ln;
        if (line.empty() || line[0] == '#') continue;
        if (line[0] == 'F') {
            TrackLogFrame fr;
            std::size_t n = 0;
            if (std::sscanf(line.c_str(), "F %ld %lf %zu", &fr.frame,
                            &fr.timestamp, &n) != 3) {
                std::fclose(f);
                throw std::runtime_error(path + ":" + std::to_string(ln) +
                                         ": malformed frame line");
            }
            fr.tracks.reserve(n);
            frames.push_back(std::move(fr));
        } else if (line[0] == 'T') {
            long frame;
            TrackRecord t;
            char status[16];
            double x, y;
            int inter;
            if (std::sscanf(line.c_str(), "T %ld %" SCNu64 " %15s %lf %lf %lf %d",
                            &frame, &t.id, status, &x, &y, &t.gate_radius,
                            &inter) != 7 ||
                frames.empty() || frames.back().frame != frame) {
                std::fclose(f);
                throw std::runtime_error(path + ":" + std::to_string(ln) +
                                         ": malformed track line");
            }
            t.status = std::strcmp(status, "confirmed") == 0
                           ? TrackStatus::confirmed
                           : TrackStatus::candidate;
            t.position = Vec2(x, y);
            t.intersecting = inter != 0;
            frames.back().tracks.push_back(t);
        } else {
            std::fclose(f);
            throw std::runtime_error(path + ":" + std::to_string(ln) +
                                     ": unknown record type");
        }
    }
    std::fclose(f);
    return frames;
}

void save_timing(const std::string& path, const std::vector<long>& frames,
                 const std::vector<double>& ms) {
    if (frames.size() != ms.size())
        throw std::invalid_argument("timing series length mismatch");
    std::FILE* f = open_or_throw(path, "w");
    std::fprintf(f, "%s\n", kTimingHeader);
    for (std::size_t i = 0; i < frames.size(); ++i)
        std::fprintf(f, "%ld %.3f\n", frames[i], ms[i]);
    if (std::fclose(f) != 0) throw std::runtime_error("close failed on " + path);
}

std::vector<double> load_timing(const std::string& path) {
    std::FILE* f = open_or_throw(path, "r");
    expect_header(f, kTimingHeader, path);
    std::vector<double> ms;
    std::string line;
    while (read_line(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        long frame;
        double v;
        if (std::sscanf(line.c_str(), "%ld %lf", &frame, &v) != 2) {
            std::fclose(f);
            throw std::runtime_error(path + ": malformed timing record");
        }
        ms.push_back(v);
    }
    std::fclose(f);
    return ms;
}

ImageDumpWriter::ImageDumpWriter(const std::string& path, int voxel_count)
    : path_(path), voxel_count_(voxel_count) {
    f_ = open_or_throw(path, "wb");
}

ImageDumpWriter::~ImageDumpWriter() { close(); }

void ImageDumpWriter::write(long frame, const VecX& intensities) {
    if (!f_) throw std::runtime_error("image dump already closed");
    if (intensities.size() != voxel_count_)
        throw std::invalid_argument("image size mismatch in dump");
    const std::uint32_t idx = static_cast<std::uint32_t>(frame);
    std::vector<float> row(voxel_count_);
    for (int j = 0; j < voxel_count_; ++j)
        row[j] = static_cast<float>(intensities(j));
    if (std::fwrite(&idx, sizeof(idx), 1, f_) != 1 ||
        std::fwrite(row.data(), sizeof(float), row.size(), f_) != row.size())
        throw std::runtime_error("short write on image dump " + path_);
}

void ImageDumpWriter::close() {
    if (f_) {
        if (std::fclose(f_) != 0)
            throw std::runtime_error("close failed on " + path_);
        f_ = nullptr;
    }
}

std::vector<std::pair<long, std::vector<float>>> load_image_dump(
    const std::string& path, int voxel_count) {
    std::FILE* f = open_or_throw(path, "rb");
    std::vector<std::pair<long, std::vector<float>>> out;
    for (;;) {
        std::uint32_t idx = 0;
        const std::size_t got = std::fread(&idx, sizeof(idx), 1, f);
        if (got == 0) break;
        std::vector<float> img(voxel_count);
        if (std::fread(img.data(), sizeof(float), img.size(), f) != img.size()) {
            std::fclose(f);
            throw std::runtime_error(path + ": truncated image record");
        }
        out.emplace_back(static_cast<long>(idx), std::move(img));
    }
    std::fclose(f);
    return out;
}

}  // namespace rti
