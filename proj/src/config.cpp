#include "rti/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace rti {

using nlohmann::json;

NetworkGeometry RunConfig::make_geometry() const {
    return NetworkGeometry::all_pairs(sensors);
}

VoxelGrid RunConfig::make_grid() const { return build_grid(bounds, pixel_width); }

EntranceRegion RunConfig::make_entrance() const {
    if (!entrance_polygons.empty()) {
        EntranceRegion r;
        r.polygons = entrance_polygons;
        return r;
    }
    return EntranceRegion::perimeter_band(bounds, entrance_band_width);
}

namespace {

json vec2_list(const std::vector<Vec2>& pts) {
    json out = json::array();
    for (const Vec2& p : pts) out.push_back({p.x(), p.y()});
    return out;
}

std::vector<Vec2> parse_vec2_list(const json& j, const char* what) {
    std::vector<Vec2> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument(std::string(what) + ": expected [x, y] pairs");
        out.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return out;
}

template <typename T>
void maybe(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }

    RunConfig cfg;
    if (!j.contains("geometry"))
        throw std::invalid_argument("config missing geometry section");
    const json& geo = j.at("geometry");
    cfg.sensors = parse_vec2_list(geo.at("sensors"), "sensors");
    const auto& b = geo.at("bounds");
    if (!b.is_array() || b.size() != 4)
        throw std::invalid_argument("bounds must be [min_x, min_y, width, height]");
    cfg.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                  b[3].get<double>()};

    cfg.channels = j.at("channels").get<std::vector<int>>();
    maybe(j, "frame_rate", cfg.frame_rate);
    maybe(j, "tx_power_dbm", cfg.tx_power_dbm);

    if (j.contains("imaging")) {
        const json& im = j.at("imaging");
        maybe(im, "pixel_width", cfg.pixel_width);
        maybe(im, "ellipse_lambda", cfg.ellipse_lambda);
        maybe(im, "voxel_sigma", cfg.voxel_sigma);
        maybe(im, "noise_sigma", cfg.noise_sigma);
        maybe(im, "correlation_distance", cfg.correlation_distance);
        maybe(im, "kernel_sigma", cfg.kernel_sigma);
        maybe(im, "kernel_radius", cfg.kernel_radius);
    }
    if (j.contains("detection")) {
        const json& de = j.at("detection");
        maybe(de, "beta", cfg.beta);
        maybe(de, "empty_floor", cfg.empty_floor);
        maybe(de, "alpha_f", cfg.alpha_f);
        maybe(de, "cluster_threshold", cfg.cluster_threshold);
        maybe(de, "min_intensity_ratio", cfg.min_intensity_ratio);
        maybe(de, "voxel_cap", cfg.voxel_cap);
    }
    if (j.contains("tracking")) {
        const json& tr = j.at("tracking");
        maybe(tr, "gate_radius", cfg.tracking.gate_radius);
        maybe(tr, "intersect_distance", cfg.tracking.intersect_distance);
        maybe(tr, "process_sigma", cfg.tracking.process_sigma);
        maybe(tr, "measurement_sigma", cfg.tracking.measurement_sigma);
        maybe(tr, "window", cfg.tracking.window);
        maybe(tr, "confirm_count", cfg.tracking.confirm_count);
        maybe(tr, "delete_misses", cfg.tracking.delete_misses);
        if (tr.contains("association")) {
            const std::string a = tr.at("association").get<std::string>();
            if (a == "gnn")
                cfg.assoc = AssocMethod::gnn;
            else if (a == "snn")
                cfg.assoc = AssocMethod::snn;
            else
                throw std::invalid_argument("association must be gnn or snn");
        }
    }
    if (j.contains("entrance")) {
        const json& en = j.at("entrance");
        maybe(en, "band_width", cfg.entrance_band_width);
        if (en.contains("polygons"))
            for (const auto& poly : en.at("polygons"))
                cfg.entrance_polygons.push_back(parse_vec2_list(poly, "entrance polygon"));
    }
    if (j.contains("calibration")) {
        const json& ca = j.at("calibration");
        maybe(ca, "min_frames", cfg.calibration_min_frames);
        maybe(ca, "warn_frames", cfg.calibration_warn_frames);
        maybe(ca, "hold_last_frames", cfg.max_hold_frames);
    }
    if (j.contains("eval")) {
        const json& ev = j.at("eval");
        maybe(ev, "ospa_cutoffs", cfg.ospa_cutoffs);
        maybe(ev, "q", cfg.metric_q);
    }

    if (cfg.channels.empty()) throw std::invalid_argument("channel list is empty");
    if (!cfg.tx_power_dbm.empty() &&
        cfg.tx_power_dbm.size() != cfg.channels.size())
        throw std::invalid_argument("tx_power_dbm length must match channels");
    if (!(cfg.frame_rate > 0.0))
        throw std::invalid_argument("frame_rate must be positive");
    return cfg;
}

void save_config(const std::string& path, const RunConfig& cfg) {
    json j;
    j["format"] = "rti-config v1";
    j["geometry"]["sensors"] = vec2_list(cfg.sensors);
    j["geometry"]["bounds"] = {cfg.bounds.min_x, cfg.bounds.min_y,
                               cfg.bounds.width, cfg.bounds.height};
    j["channels"] = cfg.channels;
    j["frame_rate"] = cfg.frame_rate;
    if (!cfg.tx_power_dbm.empty()) j["tx_power_dbm"] = cfg.tx_power_dbm;

    j["imaging"] = {{"pixel_width", cfg.pixel_width},
                    {"ellipse_lambda", cfg.ellipse_lambda},
                    {"voxel_sigma", cfg.voxel_sigma},
                    {"noise_sigma", cfg.noise_sigma},
                    {"correlation_distance", cfg.correlation_distance},
                    {"kernel_sigma", cfg.kernel_sigma},
                    {"kernel_radius", cfg.kernel_radius}};
    j["detection"] = {{"beta", cfg.beta},
                      {"empty_floor", cfg.empty_floor},
                      {"alpha_f", cfg.alpha_f},
                      {"cluster_threshold", cfg.cluster_threshold},
                      {"min_intensity_ratio", cfg.min_intensity_ratio},
                      {"voxel_cap", cfg.voxel_cap}};
    j["tracking"] = {{"gate_radius", cfg.tracking.gate_radius},
                     {"intersect_distance", cfg.tracking.intersect_distance},
                     {"process_sigma", cfg.tracking.process_sigma},
                     {"measurement_sigma", cfg.tracking.measurement_sigma},
                     {"window", cfg.tracking.window},
                     {"confirm_count", cfg.tracking.confirm_count},
                     {"delete_misses", cfg.tracking.delete_misses},
                     {"association", cfg.assoc == AssocMethod::gnn ? "gnn" : "snn"}};
    json en;
    en["band_width"] = cfg.entrance_band_width;
    if (!cfg.entrance_polygons.empty()) {
        en["polygons"] = json::array();
        for (const auto& poly : cfg.entrance_polygons)
            en["polygons"].push_back(vec2_list(poly));
    }
    j["entrance"] = en;
    j["calibration"] = {{"min_frames", cfg.calibration_min_frames},
                        {"warn_frames", cfg.calibration_warn_frames},
                        {"hold_last_frames", cfg.max_hold_frames}};
    j["eval"] = {{"ospa_cutoffs", cfg.ospa_cutoffs}, {"q", cfg.metric_q}};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << j.dump(2) << '\n';
}

std::uint64_t pipeline_content_hash(const RunConfig& cfg) {
    std::uint64_t h = fnv1a("rti-pipeline-v1", 15);
    for (const Vec2& s : cfg.sensors) h = fnv1a_doubles(s.data(), 2, h);
    const double box[4] = {cfg.bounds.min_x, cfg.bounds.min_y, cfg.bounds.width,
                           cfg.bounds.height};
    h = fnv1a_doubles(box, 4, h);
    const double params[6] = {cfg.pixel_width,  cfg.ellipse_lambda,
                              cfg.voxel_sigma,  cfg.noise_sigma,
                              cfg.correlation_distance, 0.0};
    h = fnv1a_doubles(params, 6, h);
    for (int c : cfg.channels) h = fnv1a_u64(static_cast<std::uint64_t>(c), h);
    for (double p : cfg.tx_power_dbm) h = fnv1a_doubles(&p, 1, h);
    return h;
}

}  // namespace rti
