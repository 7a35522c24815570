#pragma once

// Run configuration: a flat, sectioned key = value text format. Parsing is
// strict -- unknown sections or keys are errors, so a typo cannot silently
// fall back to a default and quietly change a calibrated run. Every key has
// a documented default and may be omitted.

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsosim/campaign.hpp"
#include "fsosim/csv.hpp"
#include "fsosim/linkbudget.hpp"
#include "fsosim/plan.hpp"
#include "fsosim/turbulence.hpp"

namespace fsosim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { Dual, Scan };

struct RunConfig {
    PlanOptions plan{};
    LinkConfig link{};
    std::string calibration_file{};  // optional per-slot OSNR offsets CSV

    ModemSettings modems{};

    TurbulenceParams turb{0.0417, 2.0, 0.1, 12.0, 2.0};  // shipped scintillation index is the dual-CUT fit
    ScheduleKind schedule_kind{ScheduleKind::Fixed};
    double walk_step_sigma{0.1};
    double walk_min_factor{0.25};
    double walk_max_factor{4.0};
    std::string replay_file{};
    LockRules lock{};

    RunMode mode{RunMode::Dual};
    double dwell_s{120.0};
    int readout_per_s{16};
    double retune_gap_s{300.0};
    std::vector<ScanStep> scan_steps{};  // empty = full default scan
    DualCutSlots dual_slots{};
    DualCutFormats dual_formats{};
    std::uint64_t seed{kDefaultSeed};

    std::string out_dir{"out"};
};

namespace detail {

inline std::uint64_t parse_seed(std::string_view s) {
    s = trim(s);
    std::uint64_t v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("not an unsigned integer: '" + std::string(s) + "'");
    return v;
}

inline ModulationKind parse_format_or_throw(std::string_view s) {
    const auto kind = parse_format(trim(s));
    if (!kind) throw std::invalid_argument("unknown modulation format '" + std::string(trim(s)) + "'");
    return *kind;
}

inline std::vector<ScanStep> parse_scan_steps(std::string_view s) {
    std::vector<ScanStep> steps;
    if (trim(s) == "all") return steps;
    for (auto item : split_csv(s)) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw std::invalid_argument("scan step must look like even:30 or odd:29");
        const auto grid = trim(item.substr(0, colon));
        CutSelector cut;
        if (grid == "even")
            cut = CutSelector::Even;
        else if (grid == "odd")
            cut = CutSelector::Odd;
        else
            throw std::invalid_argument("scan step grid must be 'even' or 'odd'");
        steps.push_back({cut, static_cast<int>(parse_int(item.substr(colon + 1)))});
    }
    if (steps.empty()) throw std::invalid_argument("scan step list is empty");
    return steps;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in, const std::string& source_name = "config") {
    RunConfig cfg;

    using Setter = std::function<void(std::string_view)>;
    const std::map<std::string, Setter> setters = {
        {"plan.base_freq_thz", [&](auto v) { cfg.plan.base_freq_thz = parse_double(v); }},
        {"plan.cut_even_slot", [&](auto v) { cfg.plan.cut_even_slot = static_cast<int>(parse_int(v)); }},
        {"plan.cut_odd_slot", [&](auto v) { cfg.plan.cut_odd_slot = static_cast<int>(parse_int(v)); }},
        {"plan.loading_tx_osnr_db", [&](auto v) { cfg.plan.loading_tx_osnr_db = parse_double(v); }},
        {"plan.cut_tx_osnr_db", [&](auto v) { cfg.plan.cut_tx_osnr_db = parse_double(v); }},

        {"link.tx_power_dbm", [&](auto v) { cfg.link.tx_power_total_dbm = parse_double(v); }},
        {"link.center_osnr_db", [&](auto v) { cfg.link.center_osnr_db = parse_double(v); }},
        {"link.tilt_db_per_thz", [&](auto v) { cfg.link.tilt_db_per_thz = parse_double(v); }},
        {"link.link_length_km", [&](auto v) { cfg.link.link_length_km = parse_double(v); }},
        {"link.calibration_file", [&](auto v) { cfg.calibration_file = std::string(trim(v)); }},

        {"modem.fec_limit", [&](auto v) { cfg.modems.fec_limit = parse_double(v); }},
        {"modem.penalty_dp16qam_db", [&](auto v) { cfg.modems.penalty_dp16qam_db = parse_double(v); }},
        {"modem.penalty_dp8qam_db", [&](auto v) { cfg.modems.penalty_dp8qam_db = parse_double(v); }},
        {"modem.penalty_dpqpsk_db", [&](auto v) { cfg.modems.penalty_dpqpsk_db = parse_double(v); }},
        {"modem.penalty_spqpsk_db", [&](auto v) { cfg.modems.penalty_spqpsk_db = parse_double(v); }},

        {"turbulence.scintillation_index", [&](auto v) { cfg.turb.scintillation_index = parse_double(v); }},
        {"turbulence.coherence_time_ms", [&](auto v) { cfg.turb.coherence_time_ms = parse_double(v); }},
        {"turbulence.sample_interval_ms", [&](auto v) { cfg.turb.sample_interval_ms = parse_double(v); }},
        {"turbulence.lock_loss_threshold_db", [&](auto v) { cfg.turb.lock_loss_threshold_db = parse_double(v); }},
        {"turbulence.relock_time_ms", [&](auto v) { cfg.turb.relock_time_ms = parse_double(v); }},
        {"turbulence.lost_duration_ms", [&](auto v) { cfg.lock.lost_duration_ms = parse_double(v); }},
        {"turbulence.schedule",
         [&](auto v) {
             const auto s = trim(v);
             if (s == "fixed")
                 cfg.schedule_kind = ScheduleKind::Fixed;
             else if (s == "walk")
                 cfg.schedule_kind = ScheduleKind::RandomWalk;
             else if (s == "replay")
                 cfg.schedule_kind = ScheduleKind::Replay;
             else
                 throw std::invalid_argument("schedule must be fixed, walk or replay");
         }},
        {"turbulence.walk_step_sigma", [&](auto v) { cfg.walk_step_sigma = parse_double(v); }},
        {"turbulence.walk_min_factor", [&](auto v) { cfg.walk_min_factor = parse_double(v); }},
        {"turbulence.walk_max_factor", [&](auto v) { cfg.walk_max_factor = parse_double(v); }},
        {"turbulence.replay_file", [&](auto v) { cfg.replay_file = std::string(trim(v)); }},

        {"campaign.mode",
         [&](auto v) {
             const auto s = trim(v);
             if (s == "dual")
                 cfg.mode = RunMode::Dual;
             else if (s == "scan")
                 cfg.mode = RunMode::Scan;
             else
                 throw std::invalid_argument("mode must be dual or scan");
         }},
        {"campaign.dwell_s", [&](auto v) { cfg.dwell_s = parse_double(v); }},
        {"campaign.readout_per_s", [&](auto v) { cfg.readout_per_s = static_cast<int>(parse_int(v)); }},
        {"campaign.retune_gap_s", [&](auto v) { cfg.retune_gap_s = parse_double(v); }},
        {"campaign.scan_steps", [&](auto v) { cfg.scan_steps = detail::parse_scan_steps(v); }},
        {"campaign.dual_even_slot", [&](auto v) { cfg.dual_slots.even_slot = static_cast<int>(parse_int(v)); }},
        {"campaign.dual_odd_slot", [&](auto v) { cfg.dual_slots.odd_slot = static_cast<int>(parse_int(v)); }},
        {"campaign.dual_even_format", [&](auto v) { cfg.dual_formats.even = detail::parse_format_or_throw(v); }},
        {"campaign.dual_odd_format", [&](auto v) { cfg.dual_formats.odd = detail::parse_format_or_throw(v); }},
        {"campaign.seed", [&](auto v) { cfg.seed = detail::parse_seed(v); }},

        {"output.dir", [&](auto v) { cfg.out_dir = std::string(trim(v)); }},
    };

    std::string line, section;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const auto at = [&] { return source_name + ":" + std::to_string(lineno) + ": "; };
        auto s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(at() + "malformed section header");
            section = std::string(trim(s.substr(1, s.size() - 2)));
            if (section != "plan" && section != "link" && section != "modem" && section != "turbulence" &&
                section != "campaign" && section != "output")
                throw ConfigError(at() + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ConfigError(at() + "expected key = value");
        if (section.empty()) throw ConfigError(at() + "key outside any section");
        const std::string key = section + "." + std::string(trim(s.substr(0, eq)));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(at() + "unknown key '" + key + "'");
        if (auto [prev, inserted] = seen.emplace(key, lineno); !inserted)
            throw ConfigError(at() + "duplicate key '" + key + "' (first set on line " +
                              std::to_string(prev->second) + ")");
        try {
            it->second(s.substr(eq + 1));
        } catch (const std::exception& e) {
            throw ConfigError(at() + key + ": " + e.what());
        }
    }
    return cfg;
}

// Full config snapshot with every key spelled out; cmd_calibrate writes the
// fitted parameters in this form so a run is reproducible from one file.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[plan]\n";
    os << "base_freq_thz = " << format_double(cfg.plan.base_freq_thz) << '\n';
    os << "cut_even_slot = " << cfg.plan.cut_even_slot << '\n';
    os << "cut_odd_slot = " << cfg.plan.cut_odd_slot << '\n';
    os << "loading_tx_osnr_db = " << format_double(cfg.plan.loading_tx_osnr_db) << '\n';
    os << "cut_tx_osnr_db = " << format_double(cfg.plan.cut_tx_osnr_db) << '\n';
    os << "\n[link]\n";
    os << "tx_power_dbm = " << format_double(cfg.link.tx_power_total_dbm) << '\n';
    os << "center_osnr_db = " << format_double(cfg.link.center_osnr_db) << '\n';
    os << "tilt_db_per_thz = " << format_double(cfg.link.tilt_db_per_thz) << '\n';
    os << "link_length_km = " << format_double(cfg.link.link_length_km) << '\n';
    if (!cfg.calibration_file.empty()) os << "calibration_file = " << cfg.calibration_file << '\n';
    os << "\n[modem]\n";
    os << "fec_limit = " << format_double(cfg.modems.fec_limit) << '\n';
    os << "penalty_dp16qam_db = " << format_double(cfg.modems.penalty_dp16qam_db) << '\n';
    os << "penalty_dp8qam_db = " << format_double(cfg.modems.penalty_dp8qam_db) << '\n';
    os << "penalty_dpqpsk_db = " << format_double(cfg.modems.penalty_dpqpsk_db) << '\n';
    os << "penalty_spqpsk_db = " << format_double(cfg.modems.penalty_spqpsk_db) << '\n';
    os << "\n[turbulence]\n";
    os << "scintillation_index = " << format_double(cfg.turb.scintillation_index) << '\n';
    os << "coherence_time_ms = " << format_double(cfg.turb.coherence_time_ms) << '\n';
    os << "sample_interval_ms = " << format_double(cfg.turb.sample_interval_ms) << '\n';
    os << "lock_loss_threshold_db = " << format_double(cfg.turb.lock_loss_threshold_db) << '\n';
    os << "relock_time_ms = " << format_double(cfg.turb.relock_time_ms) << '\n';
    os << "lost_duration_ms = " << format_double(cfg.lock.lost_duration_ms) << '\n';
    os << "schedule = "
       << (cfg.schedule_kind == ScheduleKind::RandomWalk
               ? "walk"
               : cfg.schedule_kind == ScheduleKind::Replay ? "replay" : "fixed")
       << '\n';
    os << "walk_step_sigma = " << format_double(cfg.walk_step_sigma) << '\n';
    os << "walk_min_factor = " << format_double(cfg.walk_min_factor) << '\n';
    os << "walk_max_factor = " << format_double(cfg.walk_max_factor) << '\n';
    if (!cfg.replay_file.empty()) os << "replay_file = " << cfg.replay_file << '\n';
    os << "\n[campaign]\n";
    os << "mode = " << (cfg.mode == RunMode::Dual ? "dual" : "scan") << '\n';
    os << "dwell_s = " << format_double(cfg.dwell_s) << '\n';
    os << "readout_per_s = " << cfg.readout_per_s << '\n';
    os << "retune_gap_s = " << format_double(cfg.retune_gap_s) << '\n';
    if (!cfg.scan_steps.empty()) {
        os << "scan_steps = ";
        for (std::size_t i = 0; i < cfg.scan_steps.size(); ++i) {
            if (i) os << ',';
            os << (cfg.scan_steps[i].cut == CutSelector::Even ? "even:" : "odd:") << cfg.scan_steps[i].slot;
        }
        os << '\n';
    }
    os << "dual_even_slot = " << cfg.dual_slots.even_slot << '\n';
    os << "dual_odd_slot = " << cfg.dual_slots.odd_slot << '\n';
    os << "dual_even_format = " << format_name(cfg.dual_formats.even) << '\n';
    os << "dual_odd_format = " << format_name(cfg.dual_formats.odd) << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "\n[output]\n";
    os << "dir = " << cfg.out_dir << '\n';
    return os.str();
}

}  // namespace fsosim
