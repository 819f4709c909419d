#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rti/detection.hpp"

using namespace rti;

namespace {

RtiImage denoised_image(std::initializer_list<double> values) {
    RtiImage img;
    img.intensities = VecX(static_cast<long>(values.size()));
    long i = 0;
    for (double v : values) img.intensities(i++) = v;
    img.stage = ImageStage::denoised;
    return img;
}

}  // namespace

TEST_CASE("perimeter band wraps the area edge") {
    EntranceRegion band = EntranceRegion::perimeter_band({0, 0, 10, 8}, 1.0);
    CHECK(band.contains({0.5, 4.0}));
    CHECK(band.contains({9.5, 4.0}));
    CHECK(band.contains({5.0, 0.5}));
    CHECK(band.contains({5.0, 7.5}));
    CHECK(band.contains({0.2, 0.2}));  // corner overlap
    CHECK_FALSE(band.contains({5.0, 4.0}));
    CHECK_FALSE(band.contains({1.5, 1.5}));
}

TEST_CASE("polygon entrance does point-in-polygon") {
    EntranceRegion door;
    door.polygons = {{{0.0, 2.0}, {1.0, 2.0}, {1.0, 4.0}, {0.0, 4.0}}};
    CHECK(door.contains({0.5, 3.0}));
    CHECK_FALSE(door.contains({1.5, 3.0}));
    CHECK_FALSE(door.contains({0.5, 4.5}));
}

TEST_CASE("empty room threshold takes the larger of baseline and floor") {
    ThresholdState st;
    st.empty_baseline = 0.005;
    st.empty_floor = 0.01;
    RtiImage img = denoised_image({0.0, 0.0});
    CHECK(update_threshold(st, {}, img) == doctest::Approx(0.01));

    st.empty_baseline = 0.02;
    CHECK(update_threshold(st, {}, img) == doctest::Approx(0.04));
}

TEST_CASE("tracked threshold follows the dimmest tracked intensity") {
    ThresholdState st;
    RtiImage img = denoised_image({0.9, 0.5, 0.7});
    // seeds straight from the first minimum
    double t = update_threshold(st, {0, 1, 2}, img);
    CHECK(st.filtered == doctest::Approx(0.5));
    CHECK(t == doctest::Approx(0.4));
}

TEST_CASE("threshold filter converges geometrically") {
    ThresholdState st;
    RtiImage seed = denoised_image({0.5});
    update_threshold(st, {0}, seed);

    RtiImage target = denoised_image({1.0});
    double err = 0.5;
    for (int i = 0; i < 20; ++i) {
        update_threshold(st, {0}, target);
        const double next = 1.0 - st.filtered;
        CHECK(next == doctest::Approx(err * 0.9).epsilon(1e-9));
        err = next;
    }
    CHECK(st.threshold == doctest::Approx(0.8 * st.filtered));
}

TEST_CASE("threshold reseeds after the room empties") {
    ThresholdState st;
    st.empty_baseline = 0.0;
    RtiImage a = denoised_image({0.5});
    update_threshold(st, {0}, a);
    update_threshold(st, {}, a);  // room empty, filter resets
    RtiImage b = denoised_image({0.9});
    update_threshold(st, {0}, b);
    CHECK(st.filtered == doctest::Approx(0.9));  // reseeded, no 0.5 memory
}

TEST_CASE("threshold update rejects non-denoised stages") {
    ThresholdState st;
    RtiImage raw = denoised_image({1.0});
    raw.stage = ImageStage::raw;
    CHECK_THROWS_AS(update_threshold(st, {0}, raw), std::invalid_argument);
}

TEST_CASE("masking keeps strictly brighter voxels only") {
    MaskedImage m = mask_image(denoised_image({0.1, 0.5}), 0.3);
    REQUIRE(m.voxels.size() == 1);
    CHECK(m.voxels[0] == 1);
    CHECK(m.image.intensities(0) == 0.0);
    CHECK(m.image.intensities(1) == doctest::Approx(0.5));
    CHECK(m.image.stage == ImageStage::masked);

    // equality is excluded
    MaskedImage eq = mask_image(denoised_image({0.3, 0.5}), 0.3);
    REQUIRE(eq.voxels.size() == 1);
    CHECK(eq.voxels[0] == 1);

    MaskedImage none = mask_image(denoised_image({0.1, 0.2}), 0.3);
    CHECK(none.voxels.empty());
    CHECK(none.image.intensities.norm() == 0.0);

    MaskedImage all = mask_image(denoised_image({0.1, 0.2}), 0.0);
    CHECK(all.voxels.size() == 2);
}

TEST_CASE("clustering separates near and far voxels") {
    // two voxels 0.15 m apart, one 3 m away
    std::vector<int> ids = {4, 9, 17};
    std::vector<Vec2> pos = {{1.0, 1.0}, {1.15, 1.0}, {4.15, 1.0}};
    auto clusters = hac_cluster(ids, pos, 1.25);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0] == std::vector<int>{4, 9});
    CHECK(clusters[1] == std::vector<int>{17});
}

TEST_CASE("single voxel forms a singleton cluster") {
    auto clusters = hac_cluster({7}, {{2.0, 2.0}}, 1.25);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0] == std::vector<int>{7});
}

TEST_CASE("zero threshold keeps every distinct voxel apart") {
    std::vector<int> ids = {0, 1, 2};
    std::vector<Vec2> pos = {{0, 0}, {0.1, 0}, {0.2, 0}};
    auto clusters = hac_cluster(ids, pos, 0.0);
    CHECK(clusters.size() == 3);
}

TEST_CASE("clustering is insensitive to input order") {
    std::vector<int> ids = {3, 1, 8, 5};
    std::vector<Vec2> pos = {{0, 0}, {0.3, 0}, {2.5, 0}, {2.2, 0.1}};
    auto a = hac_cluster(ids, pos, 1.0);
    std::vector<int> ids2 = {5, 8, 1, 3};
    std::vector<Vec2> pos2 = {{2.2, 0.1}, {2.5, 0}, {0.3, 0}, {0, 0}};
    auto b = hac_cluster(ids2, pos2, 1.0);
    CHECK(a == b);
}

TEST_CASE("clustering rejects duplicate ids and negative thresholds") {
    CHECK_THROWS_AS(hac_cluster({1, 1}, {{0, 0}, {1, 0}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(hac_cluster({1, 2}, {{0, 0}, {1, 0}}, -0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(hac_cluster({1, 2}, {{0, 0}}, 1.0), std::invalid_argument);
}

TEST_CASE("clustering matches the from-scratch average-linkage oracle") {
    oracle::TestRand rnd(77);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = rnd.uniform_int(1, 35);
        std::vector<int> ids;
        std::vector<Vec2> pos;
        for (int i = 0; i < n; ++i) {
            ids.push_back(i * 3 + trial % 3);
            pos.push_back({rnd.uniform(0.0, 6.0), rnd.uniform(0.0, 5.0)});
        }
        const double threshold = rnd.uniform(0.2, 2.5);
        CHECK(hac_cluster(ids, pos, threshold) ==
              oracle::brute_hac(ids, pos, threshold));
    }
}

namespace {

struct HeadRig {
    VoxelGrid grid;
    MaskedImage masked;
    EntranceRegion entrance;

    HeadRig() : grid(build_grid({0, 0, 10.0, 10.0}, 0.5)) {
        masked.image.intensities = VecX::Zero(grid.voxel_count());
        masked.image.stage = ImageStage::masked;
        entrance.polygons = {{{0.0, 0.0}, {1.0, 0.0}, {1.0, 10.0}, {0.0, 10.0}}};
    }

    int set(const Vec2& p, double intensity) {
        int best = 0;
        double bd = 1e9;
        for (int j = 0; j < grid.voxel_count(); ++j) {
            const double d = (grid.center(j) - p).norm();
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        masked.image.intensities(best) = intensity;
        masked.voxels.push_back(best);
        return best;
    }
};

}  // namespace

TEST_CASE("entrance heads are always kept") {
    HeadRig rig;
    const int v = rig.set({0.75, 5.0}, 0.3);
    auto obs = select_cluster_heads({{v}}, rig.masked, rig.grid, {},
                                    rig.entrance, 0.8);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].voxel == v);
    CHECK(obs[0].in_entrance);
    CHECK(obs[0].intensity == doctest::Approx(1.0));  // lone voxel is the peak
}

TEST_CASE("heads near a track need a fraction of its intensity") {
    HeadRig rig;
    const int bright = rig.set({6.0, 6.0}, 1.0);   // sets the peak
    const int head = rig.set({5.0, 5.0}, 0.9);     // candidate head
    std::vector<TrackView> tracks = {{{4.0, 3.9}, 2.0, 0.8}};
    // head is ~1.5 m from the track; 0.9 >= 0.8 * 0.8
    auto obs = select_cluster_heads({{head}, {bright}}, rig.masked, rig.grid,
                                    tracks, rig.entrance, 0.8);
    bool found = false;
    for (const Observation& o : obs) found = found || o.voxel == head;
    CHECK(found);
}

TEST_CASE("dim heads near a track are dropped") {
    HeadRig rig;
    const int bright = rig.set({6.0, 6.0}, 1.0);
    const int dim = rig.set({5.0, 5.0}, 0.5);  // 0.5 < 0.8 * 0.8
    std::vector<TrackView> tracks = {{{4.0, 3.9}, 2.0, 0.8}};
    auto obs = select_cluster_heads({{dim}, {bright}}, rig.masked, rig.grid,
                                    tracks, rig.entrance, 0.8);
    for (const Observation& o : obs) CHECK(o.voxel != dim);
}

TEST_CASE("ungated heads outside the entrance are dropped") {
    HeadRig rig;
    const int far = rig.set({7.0, 2.0}, 1.0);
    std::vector<TrackView> tracks = {{{4.0, 2.0}, 2.0, 0.9}};  // 3 m away
    auto obs = select_cluster_heads({{far}}, rig.masked, rig.grid, tracks,
                                    rig.entrance, 0.8);
    CHECK(obs.empty());

    // with no tracks at all it is dropped too
    auto none = select_cluster_heads({{far}}, rig.masked, rig.grid, {},
                                     rig.entrance, 0.8);
    CHECK(none.empty());
}

TEST_CASE("the per-cluster head is the brightest member") {
    HeadRig rig;
    const int a = rig.set({0.25, 2.0}, 0.4);
    const int b = rig.set({0.25, 2.5}, 0.7);
    const int c = rig.set({0.25, 3.0}, 0.5);
    auto obs = select_cluster_heads({{a, b, c}}, rig.masked, rig.grid, {},
                                    rig.entrance, 0.8);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].voxel == b);
    CHECK(obs[0].intensity == doctest::Approx(1.0));
    CHECK(obs[0].position == rig.grid.center(b));
}
