#include "rti/simulator.hpp"

#include "rti/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

namespace rti {

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Rng Rng::fork(std::uint64_t stream) {
    return Rng(fnv1a_u64(state_, fnv1a_u64(stream, 0xcbf29ce484222325ull)));
}

double TargetScript::path_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        len += (waypoints[i] - waypoints[i - 1]).norm();
    return len;
}

Vec2 TargetScript::position_at(double seconds_since_enter) const {
    if (waypoints.empty())
        throw std::invalid_argument("target script has no waypoints");
    double remaining = speed * std::max(0.0, seconds_since_enter);
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double seg = (waypoints[i] - waypoints[i - 1]).norm();
        if (remaining <= seg) {
            const double f = seg > 0.0 ? remaining / seg : 0.0;
            return waypoints[i - 1] + f * (waypoints[i] - waypoints[i - 1]);
        }
        remaining -= seg;
    }
    return waypoints.back();  // path exhausted: stand still
}

namespace {
double quantize_dbm(double v) { return std::round(v * 10.0) / 10.0; }
}  // namespace

SynthChannelState synthesize_fades(const NetworkGeometry& geometry,
                                   const std::vector<int>& channels,
                                   const std::vector<double>& tx_power_dbm,
                                   double fade_spread, std::uint64_t seed) {
    const int m = geometry.link_count();
    const int k = static_cast<int>(channels.size());
    if (k == 0) throw std::invalid_argument("no channels to synthesize");
    if (k == 1) log_warn("single-channel network: all fade levels will be 0");
    if (!tx_power_dbm.empty() && static_cast<int>(tx_power_dbm.size()) != k)
        throw std::invalid_argument("tx power table length mismatch");

    Rng rng(fnv1a_u64(seed, fnv1a("fades", 5)));
    SynthChannelState st;
    st.mean_rss.resize(m, k);
    MatX gain(m, k);
    for (int l = 0; l < m; ++l)
        for (int c = 0; c < k; ++c) {
            // Free-space-ish baseline with a per-channel multipath dip drawn
            // uniformly over the configured spread.
            const double g = -45.0 - rng.uniform() * fade_spread;
            const double p = tx_power_dbm.empty() ? 0.0 : tx_power_dbm[c];
            // Quantize the mean to the trace resolution so an empty-area
            // recording reproduces it exactly.
            st.mean_rss(l, c) = quantize_dbm(p + g);
            gain(l, c) = st.mean_rss(l, c) - p;
        }
    st.fade = fade_levels(gain);
    return st;
}

void simulate(const RunConfig& cfg, const Scenario& scenario,
              const WeightMatrix& weights, const VoxelGrid& grid,
              const SynthChannelState& channel_state,
              const std::function<void(const TraceRecord&)>& sink,
              std::vector<TruthFrame>* truth_out) {
    const NetworkGeometry geometry = cfg.make_geometry();
    const int m = geometry.link_count();
    const int k = static_cast<int>(cfg.channels.size());
    if (channel_state.mean_rss.rows() != m || channel_state.mean_rss.cols() != k)
        throw std::invalid_argument("channel state shape mismatch");
    if (scenario.frame_count <= 0)
        throw std::invalid_argument("scenario needs at least one frame");
    for (const TargetScript& t : scenario.targets) {
        if (t.enter_frame >= t.exit_frame)
            throw std::invalid_argument("target " + std::to_string(t.id) +
                                        ": enter must precede exit");
        if (t.waypoints.empty() || !(t.speed > 0.0))
            throw std::invalid_argument("target " + std::to_string(t.id) +
                                        ": needs waypoints and positive speed");
        for (const Vec2& w : t.waypoints)
            if (!cfg.bounds.contains(w))
                throw std::invalid_argument("target " + std::to_string(t.id) +
                                            ": waypoint leaves the monitored area");
    }

    Rng master(scenario.seed);
    Rng noise_rng = master.fork(1);
    Rng drop_rng = master.fork(2);
    Rng sign_rng = master.fork(3);

    // Change polarity per (link, channel): channels observed above their
    // link's deepest fade attenuate when crossed; the deepest-fade channel
    // reacts unpredictably, so it gets a random persistent polarity.
    MatX sign(m, k), scale(m, k);
    for (int l = 0; l < m; ++l) {
        const double fmax = channel_state.fade.row(l).maxCoeff();
        for (int c = 0; c < k; ++c) {
            const double f = channel_state.fade(l, c);
            sign(l, c) = f > 0.0 ? -1.0 : (sign_rng.uniform() < 0.5 ? -1.0 : 1.0);
            scale(l, c) = fmax > 0.0 ? f / fmax : 0.0;
        }
    }

    const double sigma2 = scenario.footprint_sigma * scenario.footprint_sigma;
    const double reach = 4.0 * scenario.footprint_sigma;
    VecX x_true(grid.voxel_count());

    if (truth_out) truth_out->clear();

    for (long frame = 0; frame < scenario.frame_count; ++frame) {
        const double ts = static_cast<double>(frame) / cfg.frame_rate;

        TruthFrame tf;
        tf.frame = frame;
        x_true.setZero();
        for (const TargetScript& t : scenario.targets) {
            if (frame < t.enter_frame || frame >= t.exit_frame) continue;
            const Vec2 pos =
                t.position_at((frame - t.enter_frame) / cfg.frame_rate);
            if (!cfg.bounds.contains(pos))
                throw std::invalid_argument("target " + std::to_string(t.id) +
                                            " leaves the monitored area");
            tf.targets.emplace_back(t.id, pos);

            const int col_lo = std::max(
                0, static_cast<int>((pos.x() - reach - grid.bounds.min_x) /
                                    grid.pixel_width));
            const int col_hi = std::min(
                grid.nx - 1, static_cast<int>((pos.x() + reach - grid.bounds.min_x) /
                                              grid.pixel_width));
            const int row_lo = std::max(
                0, static_cast<int>((pos.y() - reach - grid.bounds.min_y) /
                                    grid.pixel_width));
            const int row_hi = std::min(
                grid.ny - 1, static_cast<int>((pos.y() + reach - grid.bounds.min_y) /
                                              grid.pixel_width));
            for (int row = row_lo; row <= row_hi; ++row)
                for (int col = col_lo; col <= col_hi; ++col) {
                    const int j = row * grid.nx + col;
                    const double d2 = (grid.center(j) - pos).squaredNorm();
                    x_true(j) += scenario.target_attenuation *
                                 std::exp(-d2 / (2.0 * sigma2));
                }
        }
        if (truth_out) truth_out->push_back(tf);

        const VecX y_clean = weights.w * x_true;

        for (int l = 0; l < m; ++l) {
            const auto [tx, rx] = geometry.links[l];
            for (int c = 0; c < k; ++c) {
                const double delta = sign(l, c) * y_clean(l) * scale(l, c);
                for (int dir = 0; dir < 2; ++dir) {
                    const double noise = scenario.noise_sigma > 0.0
                                             ? scenario.noise_sigma * noise_rng.normal()
                                             : 0.0;
                    const bool dropped = drop_rng.uniform() < scenario.drop_rate;
                    if (dropped) continue;
                    TraceRecord rec;
                    rec.frame = frame;
                    rec.timestamp = ts;
                    rec.tx = dir == 0 ? tx : rx;
                    rec.rx = dir == 0 ? rx : tx;
                    rec.channel = cfg.channels[c];
                    rec.rss = quantize_dbm(channel_state.mean_rss(l, c) + delta + noise);
                    sink(rec);
                }
            }
        }
    }
}

namespace {

std::vector<Vec2> perimeter_sensors(const Rect& b, int count) {
    const double perimeter = 2.0 * (b.width + b.height);
    const double step = perimeter / count;
    std::vector<Vec2> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        double s = i * step;
        if (s < b.width) {
            out.emplace_back(b.min_x + s, b.min_y);
        } else if (s < b.width + b.height) {
            out.emplace_back(b.max_x(), b.min_y + (s - b.width));
        } else if (s < 2.0 * b.width + b.height) {
            out.emplace_back(b.max_x() - (s - b.width - b.height), b.max_y());
        } else {
            out.emplace_back(b.min_x, b.max_y() - (s - 2.0 * b.width - b.height));
        }
    }
    return out;
}

// Walks a closed polyline starting at corner 0: first reverse_edges edges
// against the listed corner order, then forward_edges edges along it. A pure
// forward walk is (0, n*edges).
std::vector<Vec2> lap_path(const std::vector<Vec2>& corners, int reverse_edges,
                           int forward_edges) {
    const int n = static_cast<int>(corners.size());
    std::vector<Vec2> path;
    path.reserve(reverse_edges + forward_edges + 1);
    int idx = 0;
    path.push_back(corners[idx]);
    for (int e = 0; e < reverse_edges; ++e) {
        idx = (idx + n - 1) % n;
        path.push_back(corners[idx]);
    }
    for (int e = 0; e < forward_edges; ++e) {
        idx = (idx + 1) % n;
        path.push_back(corners[idx]);
    }
    return path;
}

long walk_frames(const TargetScript& t, double frame_rate) {
    return static_cast<long>(std::ceil(t.path_length() / t.speed * frame_rate));
}

void finish_scenario(PresetBundle& b) {
    long last_exit = 0;
    for (const TargetScript& t : b.scenario.targets)
        last_exit = std::max(last_exit, t.exit_frame);
    b.scenario.frame_count = last_exit + 60;  // tail so deletions settle
}

// Walkers share one lane loop, entering staggered so same-direction pairs
// stay apart. In a crossing variant the last walker first goes against the
// flow for a bounded stint, meeting every other walker head on a few times,
// then turns around and follows; an unbounded opposing walk would pile up
// dozens of merge events and has no counterpart in a plausible walk. An
// optional entry spur is prepended to every walk, for lanes that run in the
// interior of the area and have to be joined through the entrance band; an
// optional exit spur is appended so walkers can leave the loop somewhere
// harmless instead of fading out on the lane itself.
void add_lane_walkers(PresetBundle& b, int count, bool cross,
                      const std::vector<Vec2>& corners, int laps, double speed,
                      long first_enter, long stagger, int stint_edges,
                      const std::vector<Vec2>& entry_spur = {},
                      const std::vector<Vec2>& exit_spur = {}) {
    const int n = static_cast<int>(corners.size());
    for (int i = 0; i < count; ++i) {
        TargetScript t;
        t.id = i + 1;
        t.speed = speed;
        t.enter_frame = first_enter + i * stagger;
        const bool crosser = cross && i == count - 1;
        t.waypoints = crosser
                          ? lap_path(corners, stint_edges, laps * n)
                          : lap_path(corners, 0, laps * n);
        t.waypoints.insert(t.waypoints.begin(), entry_spur.begin(),
                           entry_spur.end());
        t.waypoints.insert(t.waypoints.end(), exit_spur.begin(),
                           exit_spur.end());
        t.exit_frame = t.enter_frame + walk_frames(t, b.config.frame_rate) + 1;
        b.scenario.targets.push_back(std::move(t));
    }
    finish_scenario(b);
}

PresetBundle open_preset(bool cross) {
    PresetBundle b;
    b.config.bounds = {0.0, 0.0, 10.0, 7.0};
    b.config.sensors = perimeter_sensors(b.config.bounds, 30);
    b.config.channels = {11, 15, 18, 22, 26};
    b.config.tx_power_dbm = {4.5, 4.3, 4.6, 4.4, 4.5};
    // Lane hugs the walls inside the entrance band, so a walker is
    // re-acquirable anywhere along it.
    add_lane_walkers(b, 2, cross,
                     {{0.9, 0.9}, {9.1, 0.9}, {9.1, 6.1}, {0.9, 6.1}}, 5, 1.5,
                     30, 50, 6);
    return b;
}

PresetBundle apartment_preset() {
    PresetBundle b;
    b.config.bounds = {0.0, 0.0, 7.0, 8.25};
    b.config.sensors = perimeter_sensors(b.config.bounds, 33);
    b.config.channels = {15, 20, 25, 26};
    b.config.tx_power_dbm = {4.5, 4.4, 4.6, 4.3};
    // Two ways in: the main door on the west wall and the balcony door in
    // the north-east corner.
    b.config.entrance_polygons = {
        {{0.0, 2.9}, {1.1, 2.9}, {1.1, 4.3}, {0.0, 4.3}},
        {{5.9, 7.15}, {7.0, 7.15}, {7.0, 8.25}, {5.9, 8.25}}};

    // The lane passes through the main-door region once per lap.
    const std::vector<Vec2> corners = {{0.8, 3.6},
                                       {1.5, 1.5},
                                       {5.5, 1.5},
                                       {5.5, 6.75},
                                       {1.5, 6.75}};
    TargetScript t1;
    t1.id = 1;
    t1.speed = 2.0;
    t1.enter_frame = 30;
    t1.waypoints = lap_path(corners, 0, 8 * 5);
    t1.waypoints.insert(t1.waypoints.begin(), {0.5, 3.6});
    t1.exit_frame = t1.enter_frame + walk_frames(t1, b.config.frame_rate) + 1;

    TargetScript t2;  // enters from the balcony, first walks against t1
    t2.id = 2;
    t2.speed = 2.0;
    // Brisk pace: head-on meetings pass quickly enough that both tracks
    // coast through the merged blob instead of timing out.  Timed so the
    // second meeting lands inside the main-door region anyway.
    t2.enter_frame = 151;
    // Same cycle rotated so the lane is joined at the corner nearest the
    // balcony door.
    const std::vector<Vec2> from_balcony = {corners[3], corners[4], corners[0],
                                            corners[1], corners[2]};
    t2.waypoints = lap_path(from_balcony, 5, 6 * 5);
    t2.waypoints.insert(t2.waypoints.begin(), {6.5, 7.8});
    t2.exit_frame = t2.enter_frame + walk_frames(t2, b.config.frame_rate) + 1;

    b.scenario.targets = {std::move(t1), std::move(t2)};
    finish_scenario(b);
    return b;
}

PresetBundle office_preset(int people, bool cross) {
    PresetBundle b;
    b.config.bounds = {0.0, 0.0, 8.2, 8.2};
    b.config.sensors = perimeter_sensors(b.config.bounds, 27);
    // A few sensors sit on furniture inside the room.
    b.config.sensors.insert(b.config.sensors.end(),
                            {{2.3, 2.9}, {5.9, 2.9}, {2.3, 5.3}, {5.9, 5.3},
                             {4.1, 4.1}});
    b.config.channels = {11, 15, 18, 22, 26};
    b.config.tx_power_dbm = {4.5, 4.3, 4.6, 4.4, 4.5};
    // With no one tracked the threshold falls back on the empty-room
    // baseline, which sits far below a person's blob; the first walker in
    // would light up a huge mask that fragments into spurious detections.
    // This room's floor is set just under the blob core instead, so a
    // near-empty mask stays a compact disc.
    b.config.empty_floor = 0.45;
    // The lane is an octagon: a square circuit with the corners cut. After a
    // head-on meeting at a 90-degree corner the two walkers separate too
    // slowly and the merged blob outlives the coasting track; the shallower
    // 135-degree turns keep every meeting shorter than the track timeout.
    // The lane also keeps clear of the entrance band, where stray blob
    // fragments would start spurious tracks: walkers join it through an entry
    // spur along the south wall (long enough for acquisition) and leave by
    // vanishing at the room centre, so the fading remnant never reaches the
    // band either. The brisk pace keeps crossing merges short.
    const double a = 1.7, bb = 6.5, c = 0.8;
    add_lane_walkers(b, people, cross,
                     {{a + c, a},
                      {bb - c, a},
                      {bb, a + c},
                      {bb, bb - c},
                      {bb - c, bb},
                      {a + c, bb},
                      {a, bb - c},
                      {a, a + c}},
                     15, 2.2, 30, 20, 16, {{0.9, 0.9}, {2.4, 0.9}},
                     {{4.1, 4.1}});
    return b;
}

}  // namespace

PresetBundle scripted_paths(const std::string& preset) {
    PresetBundle b;
    if (preset == "open-2-follow") {
        b = open_preset(false);
    } else if (preset == "open-2-cross") {
        b = open_preset(true);
    } else if (preset == "apartment-2-cross") {
        b = apartment_preset();
    } else if (preset == "office-2") {
        b = office_preset(2, false);
    } else if (preset == "office-3") {
        b = office_preset(3, false);
    } else if (preset == "office-4") {
        b = office_preset(4, false);
    } else if (preset == "office-2-cross") {
        b = office_preset(2, true);
    } else if (preset == "office-3-cross") {
        b = office_preset(3, true);
    } else if (preset == "office-4-cross") {
        b = office_preset(4, true);
    } else {
        std::string known;
        for (const std::string& n : preset_names()) known += " " + n;
        throw std::invalid_argument("unknown preset '" + preset + "'; known:" + known);
    }
    b.name = preset;
    return b;
}

std::vector<std::string> preset_names() {
    return {"open-2-follow", "open-2-cross",   "apartment-2-cross",
            "office-2",      "office-3",       "office-4",
            "office-2-cross", "office-3-cross", "office-4-cross"};
}

int count_crossings(const std::vector<TruthFrame>& truth, double near,
                    double far) {
    std::map<std::pair<int, int>, bool> in_episode;
    int events = 0;
    for (const TruthFrame& tf : truth) {
        for (std::size_t a = 0; a < tf.targets.size(); ++a)
            for (std::size_t c = a + 1; c < tf.targets.size(); ++c) {
                const auto key = std::minmax(tf.targets[a].first, tf.targets[c].first);
                const double d =
                    (tf.targets[a].second - tf.targets[c].second).norm();
                bool& active = in_episode[key];
                if (!active && d < near) {
                    active = true;
                    ++events;
                } else if (active && d > far) {
                    active = false;
                }
            }
    }
    return events;
}

}  // namespace rti
