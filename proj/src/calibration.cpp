#include "rti/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace rti {

double channel_frequency(int channel) {
    if (channel < 11 || channel > 26)
        throw std::invalid_argument("channel " + std::to_string(channel) +
                                    " outside 11..26");
    return 2405.0 + 5.0 * (channel - 11);
}

MatX fade_levels(const MatX& gain) {
    MatX f = gain;
    for (int l = 0; l < f.rows(); ++l) f.row(l).array() -= f.row(l).minCoeff();
    return f;
}

CalibrationProfile calibrate(const std::vector<Frame>& frames,
                             const NetworkGeometry& geometry,
                             const VoxelGrid& grid,
                             const ProjectionOperator& projection,
                             const std::vector<int>& channels,
                             std::uint64_t geometry_hash,
                             const CalibrationOptions& opts) {
    const int m = geometry.link_count();
    const int k = static_cast<int>(channels.size());
    if (k == 0) throw std::invalid_argument("no channels configured");
    for (int c : channels) channel_frequency(c);  // range check
    if (static_cast<int>(frames.size()) < opts.min_frames)
        throw std::invalid_argument(
            "calibration needs at least " + std::to_string(opts.min_frames) +
            " frames, got " + std::to_string(frames.size()));
    if (static_cast<int>(frames.size()) < opts.warn_frames)
        log_warn("calibration uses only %zu frames; %d or more recommended",
                 frames.size(), opts.warn_frames);
    if (!opts.tx_power_dbm.empty() &&
        static_cast<int>(opts.tx_power_dbm.size()) != k)
        throw std::invalid_argument("tx power table length does not match channels");

    MatX sum = MatX::Zero(m, k);
    Eigen::MatrixXi count = Eigen::MatrixXi::Zero(m, k);
    for (const Frame& fr : frames) {
        if (fr.rss.rows() != m || fr.rss.cols() != k)
            throw std::invalid_argument("calibration frame shape mismatch");
        for (int l = 0; l < m; ++l)
            for (int c = 0; c < k; ++c)
                if (std::isfinite(fr.rss(l, c))) {
                    sum(l, c) += fr.rss(l, c);
                    ++count(l, c);
                }
    }

    std::string missing;
    int missing_count = 0;
    for (int l = 0; l < m; ++l)
        for (int c = 0; c < k; ++c)
            if (count(l, c) == 0) {
                ++missing_count;
                if (missing_count <= 20) {
                    char buf[64];
                    std::snprintf(buf, sizeof(buf), " (link %d, channel %d)", l,
                                  channels[c]);
                    missing += buf;
                }
            }
    if (missing_count > 0) {
        if (missing_count > 20) missing += " ...";
        throw std::runtime_error(
            "calibration incomplete: " + std::to_string(missing_count) +
            " unobserved link/channel pairs:" + missing);
    }

    CalibrationProfile profile;
    profile.mean_rss = sum.array() / count.cast<double>().array();
    MatX gain = profile.mean_rss;
    if (!opts.tx_power_dbm.empty())
        for (int c = 0; c < k; ++c) gain.col(c).array() -= opts.tx_power_dbm[c];
    profile.fade = fade_levels(gain);
    profile.channels = channels;
    profile.geometry_hash = geometry_hash;

    // Empty-area intensity baseline: run the same imaging front end over the
    // calibration frames and average the per-frame image maxima.
    ChangeEstimator estimator(profile.mean_rss, profile.fade, opts.max_hold_frames);
    double acc = 0.0;
    for (const Frame& fr : frames) {
        const VecX y = estimator.compute(fr);
        RtiImage raw = estimate_image(projection, y, fr.index);
        RtiImage den = gaussian_denoise(raw, grid, opts.sigma_g, opts.r_g);
        acc += den.intensities.maxCoeff();
    }
    profile.empty_baseline = std::max(0.0, acc / static_cast<double>(frames.size()));
    return profile;
}

namespace {
constexpr char kProfileMagic[8] = {'R', 'T', 'I', 'P', 'R', 'O', 'F', '1'};

void write_or_throw(std::FILE* f, const void* p, std::size_t n,
                    const std::string& path) {
    if (std::fwrite(p, 1, n, f) != n) {
        std::fclose(f);
        throw std::runtime_error("short write on profile: " + path);
    }
}
}  // namespace

void save_profile(const std::string& path, const CalibrationProfile& profile) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write profile: " + path);
    const std::uint32_t m = static_cast<std::uint32_t>(profile.mean_rss.rows());
    const std::uint32_t k = static_cast<std::uint32_t>(profile.mean_rss.cols());
    write_or_throw(f, kProfileMagic, 8, path);
    write_or_throw(f, &profile.geometry_hash, sizeof(profile.geometry_hash), path);
    write_or_throw(f, &m, sizeof(m), path);
    write_or_throw(f, &k, sizeof(k), path);
    std::vector<std::int32_t> ch(profile.channels.begin(), profile.channels.end());
    write_or_throw(f, ch.data(), ch.size() * sizeof(std::int32_t), path);
    write_or_throw(f, &profile.empty_baseline, sizeof(double), path);
    write_or_throw(f, profile.mean_rss.data(), sizeof(double) * m * k, path);
    write_or_throw(f, profile.fade.data(), sizeof(double) * m * k, path);
    std::fclose(f);
}

CalibrationProfile load_profile(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open profile: " + path);
    char magic[8];
    std::uint32_t m = 0, k = 0;
    CalibrationProfile p;
    bool ok = std::fread(magic, 1, 8, f) == 8 &&
              std::memcmp(magic, kProfileMagic, 8) == 0 &&
              std::fread(&p.geometry_hash, sizeof(p.geometry_hash), 1, f) == 1 &&
              std::fread(&m, sizeof(m), 1, f) == 1 &&
              std::fread(&k, sizeof(k), 1, f) == 1 && k > 0 && m > 0;
    if (ok) {
        std::vector<std::int32_t> ch(k);
        ok = std::fread(ch.data(), sizeof(std::int32_t), k, f) == k;
        p.channels.assign(ch.begin(), ch.end());
        p.mean_rss.resize(m, k);
        p.fade.resize(m, k);
        ok = ok && std::fread(&p.empty_baseline, sizeof(double), 1, f) == 1 &&
             std::fread(p.mean_rss.data(), sizeof(double),
                        std::size_t(m) * k, f) == std::size_t(m) * k &&
             std::fread(p.fade.data(), sizeof(double), std::size_t(m) * k, f) ==
                 std::size_t(m) * k;
    }
    std::fclose(f);
    if (!ok) throw std::runtime_error("profile corrupt or wrong format: " + path);
    return p;
}

}  // namespace rti
