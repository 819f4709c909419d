#include <cstdint>
#include <exception>
#include <string>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "rti/commands.hpp"
#include "rti/simulator.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "RF tomographic tracking: calibrate a sensor network from an "
        "empty-area recording, track people through a recorded trace, "
        "generate synthetic recordings and score track logs against truth."};
    app.require_subcommand(1);

    rti::SimulateOptions sim;
    CLI::App* c_sim = app.add_subcommand(
        "simulate", "Generate a synthetic recording from a named preset");
    std::string preset_help = "preset name; one of:";
    for (const std::string& n : rti::preset_names()) preset_help += " " + n;
    c_sim->add_option("--preset", sim.preset, preset_help)->required();
    c_sim->add_option("--out", sim.out_prefix,
                      "output prefix; writes <out>.trace, <out>.truth, "
                      "<out>.config.json and <out>_calib.trace")
        ->required();
    c_sim->add_option("--seed", sim.seed, "random seed (default 1)");

    rti::CalibrateOptions cal;
    CLI::App* c_cal = app.add_subcommand(
        "calibrate", "Build a calibration profile from an empty-area trace");
    c_cal->add_option("--config", cal.config_path, "run configuration (JSON)")
        ->required();
    c_cal->add_option("--trace", cal.trace_path, "empty-area recording")
        ->required();
    c_cal->add_option("--out", cal.profile_path, "profile output path")
        ->required();
    c_cal->add_option("--pi-cache", cal.pi_cache,
                      "projection operator cache file (read/write)");

    rti::TrackOptions trk;
    std::string assoc_arg;
    CLI::App* c_trk =
        app.add_subcommand("track", "Track people through a recorded trace");
    c_trk->add_option("--config", trk.config_path, "run configuration (JSON)")
        ->required();
    c_trk->add_option("--profile", trk.profile_path, "calibration profile")
        ->required();
    c_trk->add_option("--trace", trk.trace_path, "recording to process")
        ->required();
    c_trk->add_option("--out", trk.log_path, "track log output path")
        ->required();
    c_trk->add_option("--assoc", assoc_arg,
                      "association method: gnn (optimal) or snn (greedy); "
                      "overrides the config")
        ->check(CLI::IsMember({"gnn", "snn"}));
    c_trk->add_option("--timing", trk.timing_path,
                      "write per-frame processing times to this sidecar file");
    c_trk->add_option("--dump-images", trk.dump_path,
                      "write per-frame denoised images (binary)");
    c_trk->add_option("--pi-cache", trk.pi_cache,
                      "projection operator cache file (read/write)");

    rti::EvalOptions ev;
    CLI::App* c_ev = app.add_subcommand(
        "eval", "Score a track log against a ground-truth file");
    c_ev->add_option("--log", ev.log_path, "track log")->required();
    c_ev->add_option("--truth", ev.truth_path, "ground truth")->required();
    c_ev->add_option("--report", ev.report_path, "JSON report output path");
    c_ev->add_option("--timing", ev.timing_path,
                     "timing sidecar; adds a timing section to the report");
    c_ev->add_option("--config", ev.config_path,
                     "run configuration; supplies cutoff distances and the "
                     "error exponent");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_sim->parsed()) return rti::cmd_simulate(sim);
        if (c_cal->parsed()) return rti::cmd_calibrate(cal);
        if (c_trk->parsed()) {
            if (!assoc_arg.empty())
                trk.assoc = assoc_arg == "gnn" ? rti::AssocMethod::gnn
                                               : rti::AssocMethod::snn;
            return rti::cmd_track(trk);
        }
        if (c_ev->parsed()) return rti::cmd_eval(ev);
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
