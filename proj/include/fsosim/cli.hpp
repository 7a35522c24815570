#pragma once

// Command implementations behind the fsosim executable. Exit codes are part
// of the contract: 0 success, 1 partial report output, 2 configuration or
// input parse error, 3 I/O error, 4 calibration did not reach tolerance.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fsosim/campaign.hpp"
#include "fsosim/config.hpp"
#include "fsosim/report.hpp"

namespace fsosim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitCalibration = 4;

namespace detail {

inline std::filesystem::path resolve_out_dir(const std::optional<std::filesystem::path>& flag,
                                             const std::string& config_dir) {
    if (flag) return *flag;
    if (const char* env = std::getenv("FSOSIM_OUT"); env && *env) return env;
    return config_dir;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    return parse_config(in, path.filename().string());
}

struct RunInputs {
    ChannelPlan plan;
    std::map<int, double> osnr_offsets;
    TurbulenceSchedule schedule;
    CampaignConfig campaign;
};

inline RunInputs build_inputs(const RunConfig& cfg) {
    RunInputs in;
    in.plan = build_default_plan(cfg.plan);

    if (!cfg.calibration_file.empty()) {
        std::ifstream f(cfg.calibration_file);
        if (!f) throw IoError("cannot open calibration file " + cfg.calibration_file);
        in.osnr_offsets = load_osnr_offsets(f);
    }

    in.schedule.kind = cfg.schedule_kind;
    in.schedule.base = cfg.turb;
    in.schedule.walk_step_sigma = cfg.walk_step_sigma;
    in.schedule.walk_min_factor = cfg.walk_min_factor;
    in.schedule.walk_max_factor = cfg.walk_max_factor;
    if (cfg.schedule_kind == ScheduleKind::Replay) {
        if (cfg.replay_file.empty()) throw ConfigError("schedule = replay needs turbulence.replay_file");
        std::ifstream f(cfg.replay_file);
        if (!f) throw IoError("cannot open replay file " + cfg.replay_file);
        in.schedule.replay_samples = fading_from_csv(f, cfg.turb).samples;
    }

    in.campaign.dwell_s = cfg.dwell_s;
    in.campaign.readout_per_s = cfg.readout_per_s;
    in.campaign.retune_gap_s = cfg.retune_gap_s;
    in.campaign.scan_order = cfg.scan_steps;
    in.campaign.schedule = in.schedule;
    in.campaign.lock_rules = cfg.lock;
    in.campaign.master_seed = cfg.seed;
    in.campaign.validate();
    return in;
}

inline CampaignRun execute_run(const RunConfig& cfg) {
    const auto in = build_inputs(cfg);
    if (cfg.mode == RunMode::Dual)
        return run_dual_cut(in.plan, cfg.link, in.campaign, cfg.dual_slots, cfg.dual_formats, cfg.modems,
                            in.osnr_offsets);
    return run_campaign(in.plan, cfg.link, in.campaign, cfg.modems, in.osnr_offsets);
}

}  // namespace detail

// ---------------------------------------------------------------- simulate

inline int cmd_simulate(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed,
                        std::optional<std::filesystem::path> out_dir_flag, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    try {
        RunConfig cfg = detail::load_config(config_path);
        if (seed) cfg.seed = *seed;
        const auto out_dir = detail::resolve_out_dir(out_dir_flag, cfg.out_dir);

        const auto run = detail::execute_run(cfg);

        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir.string());

        {
            std::ofstream os(out_dir / "telemetry.csv", std::ios::binary);
            if (!os) throw IoError("cannot write " + (out_dir / "telemetry.csv").string());
            write_telemetry_csv(run.telemetry, os);
        }
        {
            std::ofstream os(out_dir / "manifest.txt", std::ios::binary);
            if (!os) throw IoError("cannot write " + (out_dir / "manifest.txt").string());
            write_manifest(run, os);
        }
        {
            std::ofstream os(out_dir / "plan.csv", std::ios::binary);
            if (!os) throw IoError("cannot write " + (out_dir / "plan.csv").string());
            os << plan_to_csv(run.plan_snapshots.back());
        }

        // Reports go through the emitted CSV, so `simulate` and a later
        // `analyze` of the same file produce identical bytes.
        std::ifstream back(out_dir / "telemetry.csv", std::ios::binary);
        auto ingested = ingest_log(back);
        if (!ingested.row_errors.empty())
            throw std::logic_error("emitted telemetry failed to re-parse: " + ingested.row_errors.front());
        const auto& plan = run.plan_snapshots.back();
        const auto status = render_report(ingested.log, &run.profile, &plan, out_dir);

        out << "telemetry: " << (out_dir / "telemetry.csv").string() << " (" << run.telemetry.size()
            << " records)\n";
        for (int slot : status.omitted_slots) err << "note: slot " << slot << " has no valid intervals\n";
        return status.partial() ? kExitPartial : kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

// ----------------------------------------------------------------- analyze

inline int cmd_analyze(const std::filesystem::path& telemetry_path,
                       std::optional<std::filesystem::path> config_path,
                       std::optional<std::filesystem::path> out_dir_flag, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
    try {
        std::ifstream in(telemetry_path, std::ios::binary);
        if (!in) {
            err << "io error: cannot open " << telemetry_path.string() << '\n';
            return kExitIo;
        }
        IngestResult ingested;
        try {
            ingested = ingest_log(in);
        } catch (const IngestError& e) {
            err << "parse error: " << e.what() << '\n';
            return kExitConfig;
        }
        for (const auto& msg : ingested.row_errors) err << telemetry_path.string() << ": " << msg << '\n';
        if (ingested.log.records.empty()) {
            err << "parse error: no telemetry records in " << telemetry_path.string() << '\n';
            return kExitConfig;
        }

        std::optional<OsnrProfile> profile;
        std::optional<ChannelPlan> plan;
        std::string out_dir_cfg = "out";
        if (config_path) {
            const RunConfig cfg = detail::load_config(*config_path);
            const auto inputs = detail::build_inputs(cfg);
            ChannelPlan p = inputs.plan;
            if (cfg.mode == RunMode::Dual) {
                p = tune_cut(p, CutSelector::Even, cfg.dual_slots.even_slot);
                p = tune_cut(p, CutSelector::Odd, cfg.dual_slots.odd_slot);
                p = set_cut_format(p, CutSelector::Even, cfg.dual_formats.even);
                p = set_cut_format(p, CutSelector::Odd, cfg.dual_formats.odd);
            }
            profile = mean_osnr_profile(cfg.link, p, inputs.osnr_offsets);
            plan = p;
            out_dir_cfg = cfg.out_dir;
        }
        const auto out_dir = detail::resolve_out_dir(out_dir_flag, out_dir_cfg);

        const auto status = render_report(ingested.log, profile ? &*profile : nullptr, plan ? &*plan : nullptr,
                                          out_dir);
        out << "analyzed " << ingested.log.records.size() << " records into " << out_dir.string() << '\n';
        for (int slot : status.omitted_slots) err << "note: slot " << slot << " has no valid intervals\n";
        if (!ingested.row_errors.empty()) return kExitConfig;
        return status.partial() ? kExitPartial : kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

// --------------------------------------------------------------- calibrate

struct CalibrationTargets {
    double valid_pct{61.34};
    double uncorrected_pct{38.61};
    double lost_pct{0.05};
};

struct CalibrationTolerance {
    double valid{3.0};
    double uncorrected{3.0};
    double lost{0.05};
};

struct CalibrationResult {
    double scintillation_index{};
    double lock_loss_threshold_db{};
    double lost_duration_ms{};
    Percentages achieved{};   // the channel carrying the target format (DP-16QAM)
    Percentages companion{};  // the co-simulated other CUT
    bool within_tolerance{};
    int evaluations{};
};

namespace detail {

struct CalibEval {
    Percentages target_channel{};
    Percentages companion{};
};

inline CalibEval evaluate_calibration(const RunConfig& base, double sigma2, double threshold_db,
                                      double lost_ms) {
    RunConfig cfg = base;
    cfg.mode = RunMode::Dual;
    cfg.schedule_kind = ScheduleKind::Fixed;
    cfg.turb.scintillation_index = sigma2;
    cfg.turb.lock_loss_threshold_db = threshold_db;
    cfg.lock.lost_duration_ms = lost_ms;

    const auto run = execute_run(cfg);
    TelemetryLog log{run.telemetry, LogSource::Simulated};

    const bool even_is_16qam = cfg.dual_formats.even == ModulationKind::DP16QAM;
    const int target_slot = even_is_16qam ? cfg.dual_slots.even_slot : cfg.dual_slots.odd_slot;
    const int other_slot = even_is_16qam ? cfg.dual_slots.odd_slot : cfg.dual_slots.even_slot;
    return {interval_percentages(log, target_slot), interval_percentages(log, other_slot)};
}

inline double calibration_error(const Percentages& got, const CalibrationTargets& want) {
    const double dv = got.valid_pct - want.valid_pct;
    const double du = got.uncorrected_pct - want.uncorrected_pct;
    const double dl = got.lost_pct - want.lost_pct;
    return dv * dv + du * du + dl * dl;
}

inline bool within(const Percentages& got, const CalibrationTargets& want, const CalibrationTolerance& tol) {
    return std::abs(got.valid_pct - want.valid_pct) <= tol.valid &&
           std::abs(got.uncorrected_pct - want.uncorrected_pct) <= tol.uncorrected &&
           std::abs(got.lost_pct - want.lost_pct) <= tol.lost;
}

}  // namespace detail

// Fits (scintillation index, lock-loss threshold, lost duration) so the
// simulated dual-CUT DP-16QAM interval shares match the targets. Valid% is
// monotone in the scintillation index for a fixed seed, so the main axis is
// a bisection; the lock parameters fall back to a small grid only when the
// defaults cannot reach tolerance.
inline CalibrationResult calibrate_dual_cut(const RunConfig& base, const CalibrationTargets& targets,
                                            const CalibrationTolerance& tol = {}) {
    if (!(targets.valid_pct >= 0 && targets.uncorrected_pct >= 0 && targets.lost_pct >= 0 &&
          targets.valid_pct <= 100 && targets.uncorrected_pct <= 100 && targets.lost_pct <= 100))
        throw std::invalid_argument("calibration targets must be percentages");

    int evals = 0;
    const auto eval = [&](double s2, double thr, double lost) {
        ++evals;
        return detail::evaluate_calibration(base, s2, thr, lost);
    };

    const auto fit_sigma = [&](double thr, double lost) {
        double lo = 0.0, hi = 0.02;
        auto at_hi = eval(hi, thr, lost);
        while (at_hi.target_channel.valid_pct > targets.valid_pct && hi < 4.0) {
            lo = hi;
            hi *= 2.0;
            at_hi = eval(hi, thr, lost);
        }
        detail::CalibEval result = at_hi;
        double mid = hi;
        for (int i = 0; i < 22; ++i) {
            mid = 0.5 * (lo + hi);
            result = eval(mid, thr, lost);
            (result.target_channel.valid_pct > targets.valid_pct ? lo : hi) = mid;
        }
        return std::pair{mid, result};
    };

    CalibrationResult best;
    double best_err = std::numeric_limits<double>::infinity();
    const auto consider = [&](double s2, double thr, double lost, const detail::CalibEval& e) {
        const double err = detail::calibration_error(e.target_channel, targets);
        if (err < best_err) {
            best_err = err;
            best = {s2, thr, lost, e.target_channel, e.companion,
                    detail::within(e.target_channel, targets, tol), evals};
        }
        return best.within_tolerance;
    };

    {
        const auto [s2, e] = fit_sigma(base.turb.lock_loss_threshold_db, base.lock.lost_duration_ms);
        if (consider(s2, base.turb.lock_loss_threshold_db, base.lock.lost_duration_ms, e)) {
            best.evaluations = evals;
            return best;
        }
    }
    for (double thr : {10.0, 8.0, 6.0}) {
        for (double lost : {3.0, 5.0}) {
            const auto [s2, e] = fit_sigma(thr, lost);
            if (consider(s2, thr, lost, e)) {
                best.evaluations = evals;
                return best;
            }
        }
    }
    best.evaluations = evals;
    return best;
}

inline int cmd_calibrate(const std::filesystem::path& config_path, const std::optional<std::string>& targets_csv,
                         std::optional<std::filesystem::path> out_dir_flag,
                         std::optional<std::uint64_t> seed = std::nullopt, std::ostream& out = std::cout,
                         std::ostream& err = std::cerr) {
    try {
        RunConfig cfg = detail::load_config(config_path);
        if (seed) cfg.seed = *seed;
        CalibrationTargets targets;
        if (targets_csv) {
            const auto f = split_csv(*targets_csv);
            if (f.size() != 3) throw ConfigError("--targets needs valid,uncorrected,lost percentages");
            targets.valid_pct = parse_double(f[0]);
            targets.uncorrected_pct = parse_double(f[1]);
            targets.lost_pct = parse_double(f[2]);
        }

        const auto result = calibrate_dual_cut(cfg, targets);

        const auto line = [&](const char* name, double got, double want) {
            out << name << ": achieved " << format_fixed(got, 2) << " %, target " << format_fixed(want, 2)
                << " %\n";
        };
        out << "calibration of (scintillation_index, lock_loss_threshold_db, lost_duration_ms) in "
            << result.evaluations << " simulations\n";
        out << "fitted: scintillation_index = " << format_double(result.scintillation_index)
            << ", lock_loss_threshold_db = " << format_double(result.lock_loss_threshold_db)
            << ", lost_duration_ms = " << format_double(result.lost_duration_ms) << '\n';
        line("valid", result.achieved.valid_pct, targets.valid_pct);
        line("uncorrected", result.achieved.uncorrected_pct, targets.uncorrected_pct);
        line("lost", result.achieved.lost_pct, targets.lost_pct);
        out << "companion CUT: valid " << format_fixed(result.companion.valid_pct, 2) << " %, uncorrected "
            << format_fixed(result.companion.uncorrected_pct, 2) << " %, lost "
            << format_fixed(result.companion.lost_pct, 2) << " %\n";

        RunConfig fitted = cfg;
        fitted.mode = RunMode::Dual;
        fitted.schedule_kind = ScheduleKind::Fixed;
        fitted.turb.scintillation_index = result.scintillation_index;
        fitted.turb.lock_loss_threshold_db = result.lock_loss_threshold_db;
        fitted.lock.lost_duration_ms = result.lost_duration_ms;

        const auto out_dir = detail::resolve_out_dir(out_dir_flag, cfg.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir.string());
        const auto path = out_dir / "calibrated.cfg";
        std::ofstream os(path, std::ios::binary);
        if (!os) throw IoError("cannot write " + path.string());
        os << serialize_config(fitted);
        out << "fitted config written to " << path.string() << '\n';

        if (!result.within_tolerance) {
            err << "calibration did not reach tolerance; best-found values written\n";
            return kExitCalibration;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

// ------------------------------------------------------------- modem-curve

inline int cmd_modem_curve(const std::string& format_name_str, double osnr_lo_db, double osnr_hi_db,
                           std::optional<std::filesystem::path> out_file, std::ostream& out = std::cout,
                           std::ostream& err = std::cerr) {
    const auto kind = parse_format(format_name_str);
    if (!kind) {
        err << "config error: unknown modulation format '" << format_name_str << "'\n";
        return kExitConfig;
    }
    if (!(osnr_lo_db < osnr_hi_db)) {
        err << "config error: OSNR range must satisfy lo < hi\n";
        return kExitConfig;
    }
    if (*kind == ModulationKind::DP8QAM)
        err << "warning: the DP-8QAM curve is an uncalibrated constellation approximation\n";

    ModemModel model{modulation(*kind), *kind == ModulationKind::SPQPSK ? 32.0 : kCutSymbolRateGbd,
                     ModemSettings{}.penalty_db(*kind), kDefaultFecLimit};
    std::ostringstream csv;
    csv << "osnr_db,ber\n";
    const int steps = static_cast<int>(std::llround((osnr_hi_db - osnr_lo_db) / 0.1));
    for (int i = 0; i <= steps; ++i) {
        const double osnr = osnr_lo_db + 0.1 * i;
        csv << format_fixed(osnr, 1) << ',' << format_double(ber_from_osnr(model, osnr)) << '\n';
    }
    if (out_file) {
        std::ofstream os(*out_file, std::ios::binary);
        if (!os) {
            err << "io error: cannot write " << out_file->string() << '\n';
            return kExitIo;
        }
        os << csv.str();
    } else {
        out << csv.str();
    }
    return kExitOk;
}

}  // namespace fsosim
