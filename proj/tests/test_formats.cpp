#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rti/config.hpp"
#include "rti/trace.hpp"

using namespace rti;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

NetworkGeometry triangle() {
    return NetworkGeometry::all_pairs({{0, 0}, {4, 0}, {2, 3}});
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    for (const std::string& l : lines) out << l << '\n';
}

}  // namespace

TEST_CASE("trace frames fuse directions and mark absent links") {
    TempFile tmp("tmp_fmt_fuse.trace");
    {
        TraceWriter w(tmp.path);
        TraceRecord r;
        r.frame = 0;
        r.timestamp = 0.0;
        // link (0,1), channel 11: both directions, averaged
        r.tx = 0, r.rx = 1, r.channel = 11, r.rss = -50.0;
        w.write(r);
        r.tx = 1, r.rx = 0, r.rss = -52.0;
        w.write(r);
        // link (0,1), channel 18: one direction only
        r.tx = 0, r.rx = 1, r.channel = 18, r.rss = -47.5;
        w.write(r);
        // link (1,2), channel 11
        r.tx = 2, r.rx = 1, r.channel = 11, r.rss = -60.3;
        w.write(r);
    }
    TraceReader reader(tmp.path, triangle(), {11, 18});
    auto frame = reader.next();
    REQUIRE(frame.has_value());
    CHECK(frame->index == 0);
    CHECK(frame->rss.rows() == 3);
    CHECK(frame->rss.cols() == 2);
    CHECK(frame->rss(0, 0) == doctest::Approx(-51.0));   // fused
    CHECK(frame->rss(0, 1) == doctest::Approx(-47.5));
    CHECK(frame->rss(2, 0) == doctest::Approx(-60.3));
    CHECK(std::isnan(frame->rss(1, 0)));  // link (0,2) never reported
    CHECK(std::isnan(frame->rss(1, 1)));
    CHECK(std::isnan(frame->rss(2, 1)));
    CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("trace frames keep file order and may skip indices") {
    TempFile tmp("tmp_fmt_gap.trace");
    {
        TraceWriter w(tmp.path);
        TraceRecord r;
        r.tx = 0, r.rx = 1, r.channel = 11;
        r.frame = 0, r.timestamp = 0.0, r.rss = -50.0;
        w.write(r);
        r.frame = 2, r.timestamp = 0.2, r.rss = -51.0;
        w.write(r);
    }
    TraceReader reader(tmp.path, triangle(), {11});
    auto a = reader.next();
    auto b = reader.next();
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->index == 0);
    CHECK(b->index == 2);
    CHECK(b->timestamp == doctest::Approx(0.2));
    CHECK_FALSE(reader.next().has_value());
}

TEST_CASE("trace reader rejects broken streams") {
    NetworkGeometry geo = triangle();

    TempFile back("tmp_fmt_back.trace");
    write_lines(back.path, {"# rti-trace v1", "1 0.1 0 1 11 -50.0",
                            "0 0.0 0 1 11 -50.0"});
    TraceReader r1(back.path, geo, {11});
    CHECK_THROWS_AS(r1.next(), std::runtime_error);

    TempFile sensors("tmp_fmt_sensors.trace");
    write_lines(sensors.path, {"# rti-trace v1", "0 0.0 0 9 11 -50.0"});
    TraceReader r2(sensors.path, geo, {11});
    CHECK_THROWS_AS(r2.next(), std::runtime_error);

    TempFile self("tmp_fmt_self.trace");
    write_lines(self.path, {"# rti-trace v1", "0 0.0 1 1 11 -50.0"});
    TraceReader r3(self.path, geo, {11});
    CHECK_THROWS_AS(r3.next(), std::runtime_error);

    TempFile chan("tmp_fmt_chan.trace");
    write_lines(chan.path, {"# rti-trace v1", "0 0.0 0 1 26 -50.0"});
    TraceReader r4(chan.path, geo, {11, 18});
    CHECK_THROWS_AS(r4.next(), std::runtime_error);

    TempFile garbled("tmp_fmt_garbled.trace");
    write_lines(garbled.path, {"# rti-trace v1", "not a record"});
    TraceReader r5(garbled.path, geo, {11});
    CHECK_THROWS_AS(r5.next(), std::runtime_error);

    TempFile headerless("tmp_fmt_headerless.trace");
    write_lines(headerless.path, {"0 0.0 0 1 11 -50.0"});
    CHECK_THROWS_AS(TraceReader(headerless.path, geo, {11}),
                    std::runtime_error);

    CHECK_THROWS_AS(TraceReader("tmp_fmt_missing.trace", geo, {11}),
                    std::runtime_error);
}

TEST_CASE("truth files round-trip including empty frames") {
    TempFile tmp("tmp_fmt_truth.txt");
    std::vector<TruthFrame> truth(3);
    truth[0].frame = 5;
    truth[0].targets = {{1, Vec2{1.25, 2.0}}, {2, Vec2{0.1234, 4.5678}}};
    truth[1].frame = 6;  // nobody present
    truth[2].frame = 7;
    truth[2].targets = {{1, Vec2{1.35, 2.0}}};

    save_truth(tmp.path, truth);
    const auto loaded = load_truth(tmp.path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[0].frame == 5);
    REQUIRE(loaded[0].targets.size() == 2);
    CHECK(loaded[0].targets[0].first == 1);
    CHECK(loaded[0].targets[0].second.x() == doctest::Approx(1.25));
    CHECK(loaded[0].targets[1].second.y() == doctest::Approx(4.5678));
    CHECK(loaded[1].targets.empty());
    REQUIRE(loaded[2].targets.size() == 1);
    CHECK(loaded[2].targets[0].second.x() == doctest::Approx(1.35));
}

TEST_CASE("an empty truth file refuses to load") {
    TempFile tmp("tmp_fmt_truth_empty.txt");
    save_truth(tmp.path, {});
    CHECK_THROWS_AS(load_truth(tmp.path), std::runtime_error);
}

TEST_CASE("track logs round-trip") {
    TempFile tmp("tmp_fmt_log.txt");
    {
        TrackLogWriter w(tmp.path);
        TrackLogFrame f0;
        f0.frame = 0;
        f0.timestamp = 0.0;
        w.write(f0);  // no tracks yet

        TrackLogFrame f1;
        f1.frame = 1;
        f1.timestamp = 0.1;
        TrackRecord a;
        a.id = 3;
        a.status = TrackStatus::confirmed;
        a.position = {1.5, 2.25};
        a.gate_radius = 4.0;
        a.intersecting = true;
        TrackRecord b;
        b.id = 9;
        b.status = TrackStatus::candidate;
        b.position = {0.1234, 7.0};
        b.gate_radius = 2.0;
        b.intersecting = false;
        f1.tracks = {a, b};
        w.write(f1);
    }
    const auto frames = load_track_log(tmp.path);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].frame == 0);
    CHECK(frames[0].tracks.empty());
    CHECK(frames[1].frame == 1);
    CHECK(frames[1].timestamp == doctest::Approx(0.1));
    REQUIRE(frames[1].tracks.size() == 2);
    CHECK(frames[1].tracks[0].id == 3);
    CHECK(frames[1].tracks[0].status == TrackStatus::confirmed);
    CHECK(frames[1].tracks[0].position.x() == doctest::Approx(1.5));
    CHECK(frames[1].tracks[0].position.y() == doctest::Approx(2.25));
    CHECK(frames[1].tracks[0].gate_radius == doctest::Approx(4.0));
    CHECK(frames[1].tracks[0].intersecting);
    CHECK(frames[1].tracks[1].id == 9);
    CHECK(frames[1].tracks[1].status == TrackStatus::candidate);
    CHECK_FALSE(frames[1].tracks[1].intersecting);
}

TEST_CASE("track log loader rejects stray records") {
    TempFile orphan("tmp_fmt_log_orphan.txt");
    write_lines(orphan.path,
                {"# rti-tracklog v1", "T 0 1 confirmed 1.0 1.0 2.0 0"});
    CHECK_THROWS_AS(load_track_log(orphan.path), std::runtime_error);

    TempFile mismatch("tmp_fmt_log_mismatch.txt");
    write_lines(mismatch.path, {"# rti-tracklog v1", "F 0 0.000 1",
                                "T 5 1 confirmed 1.0 1.0 2.0 0"});
    CHECK_THROWS_AS(load_track_log(mismatch.path), std::runtime_error);

    TempFile junk("tmp_fmt_log_junk.txt");
    write_lines(junk.path, {"# rti-tracklog v1", "X what"});
    CHECK_THROWS_AS(load_track_log(junk.path), std::runtime_error);
}

TEST_CASE("timing files round-trip") {
    TempFile tmp("tmp_fmt_timing.txt");
    save_timing(tmp.path, {0, 1, 2}, {1.25, 0.5, 12.875});
    const auto ms = load_timing(tmp.path);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0] == doctest::Approx(1.25));
    CHECK(ms[1] == doctest::Approx(0.5));
    CHECK(ms[2] == doctest::Approx(12.875));

    CHECK_THROWS_AS(save_timing(tmp.path, {0, 1}, {1.0}),
                    std::invalid_argument);
}

TEST_CASE("image dumps round-trip exactly") {
    TempFile tmp("tmp_fmt_dump.bin");
    VecX a(4), b(4);
    a << 0.0, 1.5, -2.25, 1e-3;
    b << 4.0, 5.0, 6.0, 7.0;
    {
        ImageDumpWriter w(tmp.path, 4);
        w.write(0, a);
        w.write(3, b);
        CHECK_THROWS_AS(w.write(4, VecX::Zero(5)), std::invalid_argument);
    }
    const auto frames = load_image_dump(tmp.path, 4);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].first == 0);
    CHECK(frames[1].first == 3);
    for (int j = 0; j < 4; ++j) {
        CHECK(frames[0].second[j] == static_cast<float>(a(j)));
        CHECK(frames[1].second[j] == static_cast<float>(b(j)));
    }

    // wrong geometry: the fixed-size records no longer line up
    CHECK_THROWS_AS(load_image_dump(tmp.path, 7), std::runtime_error);
}

TEST_CASE("configs round-trip through json") {
    RunConfig cfg;
    cfg.sensors = {{0, 0}, {4, 0}, {4, 3}, {0.5, 2.75}};
    cfg.bounds = {0.0, 0.0, 4.0, 3.0};
    cfg.channels = {15, 20, 25};
    cfg.frame_rate = 12.5;
    cfg.tx_power_dbm = {0.0, 3.0, -1.5};
    cfg.pixel_width = 0.2;
    cfg.ellipse_lambda = 0.03;
    cfg.voxel_sigma = 0.5;
    cfg.noise_sigma = 1.5;
    cfg.correlation_distance = 2.0;
    cfg.kernel_sigma = 0.9;
    cfg.kernel_radius = 0.6;
    cfg.beta = 0.7;
    cfg.empty_floor = 0.02;
    cfg.alpha_f = 0.85;
    cfg.cluster_threshold = 1.0;
    cfg.min_intensity_ratio = 0.75;
    cfg.voxel_cap = 400;
    cfg.tracking.gate_radius = 2.5;
    cfg.tracking.intersect_distance = 1.5;
    cfg.tracking.process_sigma = 0.2;
    cfg.tracking.measurement_sigma = 0.4;
    cfg.tracking.window = 8;
    cfg.tracking.confirm_count = 2;
    cfg.tracking.delete_misses = 7;
    cfg.assoc = AssocMethod::snn;
    cfg.entrance_polygons = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}},
                             {{3, 2}, {4, 2}, {4, 3}, {3, 3}}};
    cfg.entrance_band_width = 0.5;
    cfg.calibration_min_frames = 10;
    cfg.calibration_warn_frames = 20;
    cfg.max_hold_frames = 5;
    cfg.ospa_cutoffs = {1.5, 3.0};
    cfg.metric_q = 1;

    TempFile tmp("tmp_fmt_config.json");
    save_config(tmp.path, cfg);
    const RunConfig got = load_config(tmp.path);

    REQUIRE(got.sensors.size() == 4);
    CHECK((got.sensors[3] - cfg.sensors[3]).norm() == 0.0);
    CHECK(got.bounds.width == 4.0);
    CHECK(got.channels == cfg.channels);
    CHECK(got.frame_rate == 12.5);
    CHECK(got.tx_power_dbm == cfg.tx_power_dbm);
    CHECK(got.pixel_width == 0.2);
    CHECK(got.ellipse_lambda == 0.03);
    CHECK(got.voxel_sigma == 0.5);
    CHECK(got.noise_sigma == 1.5);
    CHECK(got.correlation_distance == 2.0);
    CHECK(got.kernel_sigma == 0.9);
    CHECK(got.kernel_radius == 0.6);
    CHECK(got.beta == 0.7);
    CHECK(got.empty_floor == 0.02);
    CHECK(got.alpha_f == 0.85);
    CHECK(got.cluster_threshold == 1.0);
    CHECK(got.min_intensity_ratio == 0.75);
    CHECK(got.voxel_cap == 400);
    CHECK(got.tracking.gate_radius == 2.5);
    CHECK(got.tracking.intersect_distance == 1.5);
    CHECK(got.tracking.process_sigma == 0.2);
    CHECK(got.tracking.measurement_sigma == 0.4);
    CHECK(got.tracking.window == 8);
    CHECK(got.tracking.confirm_count == 2);
    CHECK(got.tracking.delete_misses == 7);
    CHECK(got.assoc == AssocMethod::snn);
    REQUIRE(got.entrance_polygons.size() == 2);
    CHECK((got.entrance_polygons[1][2] - Vec2{4, 3}).norm() == 0.0);
    CHECK(got.entrance_band_width == 0.5);
    CHECK(got.calibration_min_frames == 10);
    CHECK(got.calibration_warn_frames == 20);
    CHECK(got.max_hold_frames == 5);
    CHECK(got.ospa_cutoffs == cfg.ospa_cutoffs);
    CHECK(got.metric_q == 1);

    // polygons, when present, define the entrance region
    CHECK(got.make_entrance().contains({3.5, 2.5}));
    CHECK_FALSE(got.make_entrance().contains({2.0, 1.5}));
}

TEST_CASE("config loading validates the essentials") {
    TempFile no_geo("tmp_fmt_cfg_nogeo.json");
    write_lines(no_geo.path, {"{\"channels\": [11]}"});
    CHECK_THROWS_AS(load_config(no_geo.path), std::invalid_argument);

    TempFile no_chan("tmp_fmt_cfg_nochan.json");
    write_lines(no_chan.path,
                {"{\"geometry\": {\"sensors\": [[0,0],[1,0],[0,1]], "
                 "\"bounds\": [0,0,2,2]}, \"channels\": []}"});
    CHECK_THROWS_AS(load_config(no_chan.path), std::invalid_argument);

    TempFile bad_assoc("tmp_fmt_cfg_assoc.json");
    write_lines(bad_assoc.path,
                {"{\"geometry\": {\"sensors\": [[0,0],[1,0],[0,1]], "
                 "\"bounds\": [0,0,2,2]}, \"channels\": [11], "
                 "\"tracking\": {\"association\": \"magic\"}}"});
    CHECK_THROWS_AS(load_config(bad_assoc.path), std::invalid_argument);

    TempFile not_json("tmp_fmt_cfg_parse.json");
    write_lines(not_json.path, {"{nope"});
    CHECK_THROWS_AS(load_config(not_json.path), std::invalid_argument);

    CHECK_THROWS_AS(load_config("tmp_fmt_cfg_missing.json"),
                    std::runtime_error);

    // geometry hash tracks imaging-relevant fields only
    RunConfig a;
    a.sensors = {{0, 0}, {1, 0}, {0, 1}};
    a.bounds = {0, 0, 2, 2};
    a.channels = {11};
    RunConfig b = a;
    b.beta = 0.5;  // detection tuning: same imaging chain
    CHECK(pipeline_content_hash(a) == pipeline_content_hash(b));
    RunConfig c = a;
    c.pixel_width = 0.3;
    CHECK(pipeline_content_hash(a) != pipeline_content_hash(c));
    RunConfig d = a;
    d.sensors[2] = {0.0, 1.5};
    CHECK(pipeline_content_hash(a) != pipeline_content_hash(d));
}
