// fsosim -- deterministic simulator and analysis toolkit for a 54-channel
// DWDM free-space optical link under atmospheric scintillation.
//
// Subcommands: simulate | analyze | calibrate | modem-curve

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <string>

#include "fsosim/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"DWDM free-space optical link simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string telemetry_path;
    std::string out_dir;
    std::string targets;
    std::string curve_format;
    std::string curve_out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double osnr_lo = 12.0, osnr_hi = 25.0;

    auto* sim = app.add_subcommand("simulate", "run a campaign and write telemetry + reports");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--seed", seed, "override the master seed")->each([&](const std::string&) { seed_set = true; });
    sim->add_option("--out", out_dir, "output directory (default: config [output] dir, env FSOSIM_OUT)");

    auto* ana = app.add_subcommand("analyze", "build reports from an existing telemetry CSV");
    ana->add_option("telemetry", telemetry_path, "telemetry CSV path")->required();
    ana->add_option("--config", config_path, "optional config for the OSNR profile section");
    ana->add_option("--out", out_dir, "output directory");

    auto* cal = app.add_subcommand("calibrate", "fit turbulence/lock parameters to target interval shares");
    cal->add_option("--config", config_path, "run configuration file")->required();
    cal->add_option("--targets", targets, "valid,uncorrected,lost percentages (default 61.34,38.61,0.05)");
    cal->add_option("--seed", seed, "override the master seed")->each([&](const std::string&) { seed_set = true; });
    cal->add_option("--out", out_dir, "output directory for calibrated.cfg");

    auto* cur = app.add_subcommand("modem-curve", "dump a BER-vs-OSNR curve as CSV");
    cur->add_option("format", curve_format, "dp16qam | dp8qam | dpqpsk | spqpsk")->required();
    cur->add_option("--from", osnr_lo, "OSNR range start in dB (default 12)");
    cur->add_option("--to", osnr_hi, "OSNR range end in dB (default 25)");
    cur->add_option("--out", curve_out, "output CSV file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    const auto opt_out = out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);

    if (sim->parsed())
        return fsosim::cmd_simulate(config_path, seed_set ? std::optional(seed) : std::nullopt, opt_out);
    if (ana->parsed())
        return fsosim::cmd_analyze(telemetry_path,
                                   config_path.empty() ? std::nullopt
                                                       : std::optional<std::filesystem::path>(config_path),
                                   opt_out);
    if (cal->parsed())
        return fsosim::cmd_calibrate(config_path, targets.empty() ? std::nullopt : std::optional(targets),
                                     opt_out, seed_set ? std::optional(seed) : std::nullopt);
    if (cur->parsed())
        return fsosim::cmd_modem_curve(curve_format, osnr_lo, osnr_hi,
                                       curve_out.empty() ? std::nullopt
                                                         : std::optional<std::filesystem::path>(curve_out));
    return fsosim::kExitConfig;
}
