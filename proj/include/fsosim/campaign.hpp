#pragma once

// Measurement-campaign orchestration: sequential CUT scan with dwell and
// retune timing, per-step turbulence schedule, receiver lock tracking,
// 10-ms interval accumulation and the 16-per-second readout subsampling.
// Everything is a pure function of (plan, link, config), so a master seed
// reproduces a campaign byte for byte.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "fsosim/fec_intervals.hpp"
#include "fsosim/linkbudget.hpp"
#include "fsosim/modem.hpp"
#include "fsosim/plan.hpp"
#include "fsosim/turbulence.hpp"

namespace fsosim {

constexpr std::uint64_t kDefaultSeed = 987654321;

// splitmix64 finalizer over (master, step); collision-resistant stream split.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t step) {
    std::uint64_t z = master_seed + (step + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

enum class ScheduleKind { Fixed, PerStep, RandomWalk, Replay };

// Atmospheric conditions drift between scan steps (hours pass while the
// optics are adjusted). The schedule supplies per-step parameters: a fixed
// set, an explicit list, a bounded multiplicative random walk on the
// scintillation index, or a replayed measured power vector.
struct TurbulenceSchedule {
    ScheduleKind kind{ScheduleKind::Fixed};
    TurbulenceParams base{};
    std::vector<TurbulenceParams> per_step{};
    double walk_step_sigma{0.1};  // std-dev of the log step applied to sigma_I^2
    double walk_min_factor{0.25};
    double walk_max_factor{4.0};
    std::vector<double> replay_samples{};

    std::vector<TurbulenceParams> materialize(std::size_t n_steps, std::uint64_t master_seed) const {
        base.validate();
        std::vector<TurbulenceParams> out;
        out.reserve(n_steps);
        switch (kind) {
            case ScheduleKind::Fixed:
            case ScheduleKind::Replay:
                out.assign(n_steps, base);
                break;
            case ScheduleKind::PerStep:
                if (per_step.size() < n_steps)
                    throw std::invalid_argument("per-step schedule shorter than the scan order");
                for (std::size_t i = 0; i < n_steps; ++i) {
                    per_step[i].validate();
                    out.push_back(per_step[i]);
                }
                break;
            case ScheduleKind::RandomWalk: {
                NormalSampler normal(derive_seed(master_seed, 0xA7005CEDULL));
                double sigma2 = base.scintillation_index;
                const double lo = base.scintillation_index * walk_min_factor;
                const double hi = base.scintillation_index * walk_max_factor;
                for (std::size_t i = 0; i < n_steps; ++i) {
                    TurbulenceParams p = base;
                    p.scintillation_index = sigma2;
                    out.push_back(p);
                    sigma2 = std::clamp(sigma2 * std::exp(walk_step_sigma * normal()), lo, hi);
                }
                break;
            }
        }
        return out;
    }
};

struct ScanStep {
    CutSelector cut{CutSelector::Even};
    int slot{};
};

struct CampaignConfig {
    double dwell_s{120.0};
    int readout_per_s{16};
    double retune_gap_s{300.0};
    std::vector<ScanStep> scan_order{};  // empty = full default scan
    TurbulenceSchedule schedule{};
    LockRules lock_rules{};
    std::uint64_t master_seed{kDefaultSeed};

    void validate() const {
        if (!(dwell_s > 0.0)) throw std::invalid_argument("dwell must be positive");
        if (readout_per_s < 1 || readout_per_s > 100)
            throw std::invalid_argument("readout rate must be 1..100 intervals/s");
        if (!(retune_gap_s >= 0.0)) throw std::invalid_argument("retune gap must be >= 0");
    }
};

struct StepChannel {
    CutSelector cut{CutSelector::Even};
    int slot{};
    ModulationKind format{ModulationKind::DP16QAM};
};

struct StepInfo {
    int index{};
    std::uint64_t seed{};
    double t_start_s{};
    TurbulenceParams params{};
    std::vector<StepChannel> channels;
};

struct CampaignRun {
    CampaignConfig config{};
    OsnrProfile profile{};
    std::vector<IntervalRecord> telemetry;
    std::vector<StepInfo> steps;
    std::vector<ChannelPlan> plan_snapshots;
};

// Even CUT walks the even grid, then the odd CUT walks the odd grid; the
// SP-QPSK reference slot is skipped.
inline std::vector<ScanStep> default_scan_order(const ChannelPlan& plan) {
    std::vector<ScanStep> order;
    const int ref = plan.sp_qpsk_slot();
    for (int slot = 0; slot < kChannelCount; slot += 2)
        if (slot != ref) order.push_back({CutSelector::Even, slot});
    for (int slot = 1; slot < kChannelCount; slot += 2)
        if (slot != ref) order.push_back({CutSelector::Odd, slot});
    return order;
}

namespace detail {

// Receiver lock over a fading series: unlocked while the fade depth is at or
// beyond the threshold, and for relock_time after it last was.
inline std::vector<bool> track_lock(const FadingSeries& fading) {
    const double thr = fading.params.lock_loss_threshold_db;
    const double relock = fading.params.relock_time_ms;
    const double dt = fading.sample_interval_ms;
    std::vector<bool> unlocked(fading.samples.size());
    double since_fade_ms = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < fading.samples.size(); ++i) {
        if (fade_depth_db(fading.samples[i]) >= thr) {
            since_fade_ms = 0.0;
            unlocked[i] = true;
        } else {
            since_fade_ms += dt;
            unlocked[i] = since_fade_ms < relock - 1e-12;
        }
    }
    return unlocked;
}

inline std::vector<int> readout_indices(int readout_per_s) {
    const int stride = 100 / readout_per_s;
    std::vector<int> idx;
    idx.reserve(readout_per_s);
    for (int j = 0; j < readout_per_s; ++j) idx.push_back(j * stride);
    return idx;
}

struct DwellChannel {
    int slot{};
    std::int64_t freq_ghz{};
    ModemModel model{};
    double mean_osnr_db{};
    double gross_rate_gbps{};
};

// Simulates one dwell: per-sub-sample OSNR and BER for each measured channel
// (all channels share the fading), accumulates 10-ms intervals and keeps the
// read-out subset. Records are appended ordered by time, then slot.
inline void simulate_dwell(const FadingSeries& fading, const std::vector<DwellChannel>& channels,
                           double t_start_s, int readout_per_s, const LockRules& lock_rules,
                           std::vector<IntervalRecord>& out) {
    const double dt = fading.sample_interval_ms;
    const auto per_interval = static_cast<std::size_t>(std::llround(kIntervalMs / dt));
    const std::size_t n_intervals = fading.samples.size() / per_interval;
    const auto unlocked = track_lock(fading);
    const auto keep = readout_indices(readout_per_s);

    std::vector<SubSample> subs(per_interval);
    for (std::size_t iv = 0; iv < n_intervals; ++iv) {
        const auto in_second = static_cast<int>(iv % 100);
        if (!std::binary_search(keep.begin(), keep.end(), in_second)) continue;
        const std::size_t base = iv * per_interval;
        for (const auto& ch : channels) {
            for (std::size_t k = 0; k < per_interval; ++k) {
                if (unlocked[base + k]) {
                    subs[k] = {std::nullopt, dt};
                } else {
                    const double osnr = ch.mean_osnr_db - fade_depth_db(fading.samples[base + k]);
                    subs[k] = {ber_from_osnr(ch.model, osnr), dt};
                }
            }
            IntervalRecord rec = accumulate_interval(subs, ch.model, ch.gross_rate_gbps, lock_rules);
            rec.t_start_s = t_start_s + static_cast<double>(iv) * (kIntervalMs / 1000.0);
            rec.channel_slot = ch.slot;
            rec.freq_ghz = ch.freq_ghz;
            out.push_back(rec);
        }
    }
}

inline DwellChannel make_dwell_channel(const Channel& ch, const OsnrProfile& profile, double fec_limit,
                                       double impl_penalty_db) {
    ModemModel model{ch.format, ch.symbol_rate_gbd, impl_penalty_db, fec_limit};
    model.validate();
    return {ch.slot, ch.center_freq_ghz, model, profile.at(ch.slot), ch.gross_rate_gbps()};
}

inline FadingSeries step_fading(const TurbulenceSchedule& schedule, const TurbulenceParams& params,
                                double dwell_ms, std::uint64_t seed) {
    if (schedule.kind != ScheduleKind::Replay) return generate_fading(params, dwell_ms, seed);
    const auto needed = static_cast<std::size_t>(std::llround(dwell_ms / params.sample_interval_ms));
    if (schedule.replay_samples.size() < needed)
        throw std::invalid_argument("replay series shorter than the dwell");
    FadingSeries series;
    series.params = params;
    series.sample_interval_ms = params.sample_interval_ms;
    series.seed = 0;
    series.samples.assign(schedule.replay_samples.begin(),
                          schedule.replay_samples.begin() + static_cast<std::ptrdiff_t>(needed));
    return series;
}

}  // namespace detail

struct ModemSettings {
    double fec_limit{kDefaultFecLimit};
    double penalty_db(ModulationKind kind) const {
        switch (kind) {
            case ModulationKind::DP16QAM: return penalty_dp16qam_db;
            case ModulationKind::DP8QAM: return penalty_dp8qam_db;
            case ModulationKind::DPQPSK: return penalty_dpqpsk_db;
            case ModulationKind::SPQPSK: return penalty_spqpsk_db;
        }
        throw std::invalid_argument("unknown modulation");
    }
    double penalty_dp16qam_db{kDefaultImplPenaltyDb};
    double penalty_dp8qam_db{kDefaultImplPenaltyDb};
    double penalty_dpqpsk_db{kDefaultQpskPenaltyDb};
    double penalty_spqpsk_db{kDefaultQpskPenaltyDb};
};

inline CampaignRun run_campaign(const ChannelPlan& plan, const LinkConfig& link, const CampaignConfig& config,
                                const ModemSettings& modems = {}, const std::map<int, double>& osnr_offsets = {}) {
    config.validate();
    plan.validate();

    CampaignRun run;
    run.config = config;
    run.profile = mean_osnr_profile(link, plan, osnr_offsets);

    const auto scan = config.scan_order.empty() ? default_scan_order(plan) : config.scan_order;
    const auto params_per_step = config.schedule.materialize(scan.size(), config.master_seed);

    {  // reject any invalid scan slot before simulating
        ChannelPlan probe = plan;
        for (const auto& step : scan) probe = tune_cut(probe, step.cut, step.slot);
    }

    ChannelPlan current = plan;
    double t = 0.0;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        current = tune_cut(current, scan[i].cut, scan[i].slot);
        const Channel& cut = current.cut(scan[i].cut);

        StepInfo step;
        step.index = static_cast<int>(i);
        step.seed = derive_seed(config.master_seed, i);
        step.t_start_s = t;
        step.params = params_per_step[i];
        step.channels.push_back({scan[i].cut, cut.slot, cut.format.kind});

        const auto fading = detail::step_fading(config.schedule, step.params, config.dwell_s * 1000.0, step.seed);
        const auto ch = detail::make_dwell_channel(cut, run.profile, modems.fec_limit,
                                                   modems.penalty_db(cut.format.kind));
        detail::simulate_dwell(fading, {ch}, t, config.readout_per_s, config.lock_rules, run.telemetry);

        run.steps.push_back(step);
        run.plan_snapshots.push_back(current);
        t += config.dwell_s + config.retune_gap_s;
    }
    return run;
}

struct DualCutSlots {
    int even_slot{30};  // 193.60 THz on the default grid
    int odd_slot{29};   // 193.55 THz
};

struct DualCutFormats {
    ModulationKind even{ModulationKind::DP16QAM};
    ModulationKind odd{ModulationKind::DPQPSK};
};

// Both CUTs parked on adjacent slots and captured simultaneously: a single
// fading series drives both channels, so their interval streams share
// timestamps exactly.
inline CampaignRun run_dual_cut(const ChannelPlan& plan, const LinkConfig& link, const CampaignConfig& config,
                                const DualCutSlots& slots, const DualCutFormats& formats = {},
                                const ModemSettings& modems = {}, const std::map<int, double>& osnr_offsets = {}) {
    config.validate();
    if (std::abs(slots.even_slot - slots.odd_slot) != 1)
        throw std::invalid_argument("dual-CUT slots must be adjacent");

    ChannelPlan current = tune_cut(plan, CutSelector::Even, slots.even_slot);
    current = tune_cut(current, CutSelector::Odd, slots.odd_slot);
    current = set_cut_format(current, CutSelector::Even, formats.even);
    current = set_cut_format(current, CutSelector::Odd, formats.odd);

    CampaignRun run;
    run.config = config;
    run.profile = mean_osnr_profile(link, current, osnr_offsets);

    const auto params_per_step = config.schedule.materialize(1, config.master_seed);

    StepInfo step;
    step.index = 0;
    step.seed = derive_seed(config.master_seed, 0);
    step.t_start_s = 0.0;
    step.params = params_per_step[0];
    step.channels.push_back({CutSelector::Even, slots.even_slot, formats.even});
    step.channels.push_back({CutSelector::Odd, slots.odd_slot, formats.odd});

    const auto fading = detail::step_fading(config.schedule, step.params, config.dwell_s * 1000.0, step.seed);
    const Channel& even = current.cut(CutSelector::Even);
    const Channel& odd = current.cut(CutSelector::Odd);
    std::vector<detail::DwellChannel> channels;
    // lower slot first so records are ordered by (time, slot)
    for (const Channel* ch : odd.slot < even.slot ? std::vector<const Channel*>{&odd, &even}
                                                  : std::vector<const Channel*>{&even, &odd})
        channels.push_back(detail::make_dwell_channel(*ch, run.profile, modems.fec_limit,
                                                      modems.penalty_db(ch->format.kind)));
    detail::simulate_dwell(fading, channels, 0.0, config.readout_per_s, config.lock_rules, run.telemetry);

    run.steps.push_back(step);
    run.plan_snapshots.push_back(current);
    return run;
}

// Run manifest: enough to reproduce a campaign exactly.
inline void write_manifest(const CampaignRun& run, std::ostream& os) {
    os << "[run]\n";
    os << "master_seed = " << run.config.master_seed << '\n';
    os << "dwell_s = " << format_double(run.config.dwell_s) << '\n';
    os << "readout_per_s = " << run.config.readout_per_s << '\n';
    os << "retune_gap_s = " << format_double(run.config.retune_gap_s) << '\n';
    os << "lost_duration_ms = " << format_double(run.config.lock_rules.lost_duration_ms) << '\n';
    os << "steps = " << run.steps.size() << '\n';
    for (const auto& step : run.steps) {
        os << "\n[step " << step.index << "]\n";
        os << "seed = " << step.seed << '\n';
        os << "t_start_s = " << format_double(step.t_start_s) << '\n';
        for (const auto& ch : step.channels)
            os << "channel = " << (ch.cut == CutSelector::Even ? "even" : "odd") << ':' << ch.slot << ':'
               << format_name(ch.format) << '\n';
        os << "scintillation_index = " << format_double(step.params.scintillation_index) << '\n';
        os << "coherence_time_ms = " << format_double(step.params.coherence_time_ms) << '\n';
        os << "sample_interval_ms = " << format_double(step.params.sample_interval_ms) << '\n';
        os << "lock_loss_threshold_db = " << format_double(step.params.lock_loss_threshold_db) << '\n';
        os << "relock_time_ms = " << format_double(step.params.relock_time_ms) << '\n';
    }
}

}  // namespace fsosim
