#pragma once

// 10-ms interval bookkeeping: aggregates sub-millisecond BER/lock samples
// into one record and applies the three-way interval taxonomy.
//
//   Lost        - the receiver was unlocked for at least lost_duration of the
//                 interval; the pre-FEC BER reads "nan".
//   Uncorrected - at least one FEC block failed (a sub-sample was unlocked or
//                 above the FEC limit); the computed BER is kept for
//                 diagnostics but is invalid for statistics.
//   Valid       - no uncorrected blocks; the BER is the duration-weighted
//                 mean, quantized to a whole error count. Zero errors report
//                 the below-floor sentinel (shown as "<1e-8").

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "fsosim/modem.hpp"
#include "fsosim/plan.hpp"

namespace fsosim {

constexpr double kIntervalMs = 10.0;
constexpr double kBelowFloorBer = 1e-8;

struct SubSample {
    std::optional<double> ber;  // nullopt while the receiver is unlocked
    double duration_ms{};
};

enum class IntervalClass { Valid, Uncorrected, Lost };

inline std::string_view class_name(IntervalClass cls) {
    switch (cls) {
        case IntervalClass::Valid: return "valid";
        case IntervalClass::Uncorrected: return "uncorrected";
        case IntervalClass::Lost: return "lost";
    }
    return "?";
}

struct IntervalRecord {
    double t_start_s{};
    int channel_slot{};
    std::int64_t freq_ghz{};
    ModulationKind format{ModulationKind::DP16QAM};
    double prefec_ber{};  // NaN when the interval is lost
    bool below_floor{};
    std::int64_t uncorrected_blocks{};
    std::int64_t postfec_errors{};
    bool locked{};
    IntervalClass cls{IntervalClass::Valid};
};

struct QuantizedBer {
    double ber{};
    bool below_floor{};
};

inline QuantizedBer quantize_ber(std::int64_t error_count, std::int64_t bits_in_interval) {
    if (bits_in_interval <= 0) throw std::invalid_argument("bits_in_interval must be positive");
    if (error_count < 0) throw std::invalid_argument("error count must be >= 0");
    if (error_count == 0) return {kBelowFloorBer, true};
    return {static_cast<double>(error_count) / static_cast<double>(bits_in_interval), false};
}

inline IntervalClass classify(const IntervalRecord& record) {
    if (std::isnan(record.prefec_ber)) return IntervalClass::Lost;
    if (record.postfec_errors == 0 && record.uncorrected_blocks == 0) return IntervalClass::Valid;
    return IntervalClass::Uncorrected;
}

struct LockRules {
    double lost_duration_ms{5.0};  // unlocked time that turns an interval into Lost
};

inline IntervalRecord accumulate_interval(std::span<const SubSample> sub_samples, const ModemModel& model,
                                          double gross_rate_gbps, const LockRules& rules = {}) {
    if (sub_samples.empty()) throw std::invalid_argument("interval needs at least one sub-sample");
    double total_ms = 0.0, unlocked_ms = 0.0, granularity = std::numeric_limits<double>::infinity();
    for (const auto& s : sub_samples) {
        if (!(s.duration_ms > 0.0)) throw std::invalid_argument("sub-sample duration must be positive");
        total_ms += s.duration_ms;
        granularity = std::min(granularity, s.duration_ms);
        if (!s.ber) unlocked_ms += s.duration_ms;
    }
    if (std::abs(total_ms - kIntervalMs) > 1e-9)
        throw std::invalid_argument("sub-sample durations must sum to 10 ms");

    IntervalRecord rec;
    rec.format = model.format.kind;
    rec.locked = unlocked_ms == 0.0;

    // One FEC block per granularity-sized slice; a bad sub-sample corrupts
    // all the blocks it spans.
    std::int64_t blocks = 0;
    double ber_weight = 0.0, ber_time = 0.0;
    for (const auto& s : sub_samples) {
        const bool bad = !s.ber || *s.ber > model.fec_limit;
        if (bad) blocks += std::max<std::int64_t>(1, std::llround(s.duration_ms / granularity));
        if (s.ber) {
            ber_weight += *s.ber * s.duration_ms;
            ber_time += s.duration_ms;
        }
    }
    rec.uncorrected_blocks = blocks;
    rec.postfec_errors = 0;

    if (unlocked_ms >= rules.lost_duration_ms - 1e-12 || ber_time == 0.0) {
        rec.prefec_ber = std::numeric_limits<double>::quiet_NaN();
        rec.locked = false;
        rec.cls = IntervalClass::Lost;
        return rec;
    }

    const double mean_ber = ber_weight / ber_time;
    if (blocks > 0) {
        rec.prefec_ber = mean_ber;  // invalid for statistics, retained for diagnostics
        rec.cls = IntervalClass::Uncorrected;
        return rec;
    }

    const auto bits = static_cast<std::int64_t>(std::llround(gross_rate_gbps * 1e9 * (kIntervalMs / 1000.0)));
    const auto quantized = quantize_ber(std::llround(mean_ber * static_cast<double>(bits)), bits);
    rec.prefec_ber = quantized.ber;
    rec.below_floor = quantized.below_floor;
    rec.cls = IntervalClass::Valid;
    return rec;
}

}  // namespace fsosim
