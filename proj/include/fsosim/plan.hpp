#pragma once

// DWDM channel plan of the 54-channel C-band trial: channel roles, modulation
// formats and data-rate bookkeeping. Frequencies are kept as integer GHz so
// grid arithmetic is exact; data rates are kept as integer Mbit/s so the
// aggregate capacity sums exactly.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fsosim/csv.hpp"

namespace fsosim {

enum class ModulationKind { DP16QAM, DP8QAM, DPQPSK, SPQPSK };

struct ModulationFormat {
    ModulationKind kind{ModulationKind::DPQPSK};
    int bits_per_symbol{4};  // across all polarizations
    int polarizations{2};
};

constexpr ModulationFormat modulation(ModulationKind kind) {
    switch (kind) {
        case ModulationKind::DP16QAM: return {kind, 8, 2};
        case ModulationKind::DP8QAM: return {kind, 6, 2};
        case ModulationKind::DPQPSK: return {kind, 4, 2};
        case ModulationKind::SPQPSK: return {kind, 2, 1};
    }
    return {};
}

inline std::string_view format_name(ModulationKind kind) {
    switch (kind) {
        case ModulationKind::DP16QAM: return "dp16qam";
        case ModulationKind::DP8QAM: return "dp8qam";
        case ModulationKind::DPQPSK: return "dpqpsk";
        case ModulationKind::SPQPSK: return "spqpsk";
    }
    return "?";
}

inline std::optional<ModulationKind> parse_format(std::string_view name) {
    if (name == "dp16qam") return ModulationKind::DP16QAM;
    if (name == "dp8qam") return ModulationKind::DP8QAM;
    if (name == "dpqpsk") return ModulationKind::DPQPSK;
    if (name == "spqpsk") return ModulationKind::SPQPSK;
    return std::nullopt;
}

enum class ChannelRole { Loading, CutEven, CutOdd, SpQpskRef };
enum class CutSelector { Even, Odd };

inline std::string_view role_name(ChannelRole role) {
    switch (role) {
        case ChannelRole::Loading: return "loading";
        case ChannelRole::CutEven: return "cut_even";
        case ChannelRole::CutOdd: return "cut_odd";
        case ChannelRole::SpQpskRef: return "sp_qpsk_ref";
    }
    return "?";
}

constexpr std::int64_t kGridSpacingGhz = 50;
constexpr int kChannelCount = 54;

struct Channel {
    int slot{};
    std::int64_t center_freq_ghz{};
    ChannelRole role{ChannelRole::Loading};
    ModulationFormat format{};
    double symbol_rate_gbd{};
    std::int64_t gross_rate_mbps{};
    std::optional<std::int64_t> net_rate_mbps{};
    double fec_overhead{};
    double tx_osnr_db{};

    double center_freq_thz() const { return static_cast<double>(center_freq_ghz) / 1000.0; }
    double gross_rate_gbps() const { return static_cast<double>(gross_rate_mbps) / 1000.0; }
    std::optional<double> net_rate_gbps() const {
        if (!net_rate_mbps) return std::nullopt;
        return static_cast<double>(*net_rate_mbps) / 1000.0;
    }
};

struct ChannelPlan {
    std::int64_t base_freq_ghz{};
    std::vector<Channel> channels;  // sorted by slot

    const Channel& at_slot(int slot) const {
        for (const auto& ch : channels)
            if (ch.slot == slot) return ch;
        throw std::invalid_argument("no channel at slot " + std::to_string(slot));
    }

    const Channel& find_role(ChannelRole role) const {
        for (const auto& ch : channels)
            if (ch.role == role) return ch;
        throw std::invalid_argument("plan has no channel with role " + std::string(role_name(role)));
    }

    const Channel& cut(CutSelector which) const {
        return find_role(which == CutSelector::Even ? ChannelRole::CutEven : ChannelRole::CutOdd);
    }

    int sp_qpsk_slot() const { return find_role(ChannelRole::SpQpskRef).slot; }

    std::int64_t freq_of_slot(int slot) const { return base_freq_ghz + slot * kGridSpacingGhz; }

    void validate() const;
};

inline void ChannelPlan::validate() const {
    if (channels.size() != kChannelCount)
        throw std::invalid_argument("plan must have 54 channels, has " + std::to_string(channels.size()));
    int n_ref = 0, n_even = 0, n_odd = 0;
    std::vector<bool> seen(kChannelCount, false);
    for (const auto& ch : channels) {
        if (ch.slot < 0 || ch.slot >= kChannelCount)
            throw std::invalid_argument("slot out of range: " + std::to_string(ch.slot));
        if (seen[ch.slot]) throw std::invalid_argument("duplicate slot " + std::to_string(ch.slot));
        seen[ch.slot] = true;
        if (ch.center_freq_ghz != freq_of_slot(ch.slot))
            throw std::invalid_argument("channel frequency off grid at slot " + std::to_string(ch.slot));
        if (ch.gross_rate_mbps <= 0) throw std::invalid_argument("gross rate must be positive");
        if (ch.net_rate_mbps && *ch.net_rate_mbps > ch.gross_rate_mbps)
            throw std::invalid_argument("net rate exceeds gross rate at slot " + std::to_string(ch.slot));
        const auto canon = modulation(ch.format.kind);
        if (ch.format.bits_per_symbol != canon.bits_per_symbol || ch.format.polarizations != canon.polarizations)
            throw std::invalid_argument("modulation fields inconsistent at slot " + std::to_string(ch.slot));
        switch (ch.role) {
            case ChannelRole::SpQpskRef:
                ++n_ref;
                if (ch.format.kind != ModulationKind::SPQPSK || ch.gross_rate_mbps != 100000)
                    throw std::invalid_argument("SP-QPSK reference must be SPQPSK at 100 Gbit/s");
                break;
            case ChannelRole::CutEven:
                ++n_even;
                if (ch.slot % 2 != 0) throw std::invalid_argument("even CUT on odd slot");
                break;
            case ChannelRole::CutOdd:
                ++n_odd;
                if (ch.slot % 2 != 1) throw std::invalid_argument("odd CUT on even slot");
                break;
            case ChannelRole::Loading:
                break;
        }
    }
    if (n_ref != 1 || n_even != 1 || n_odd != 1)
        throw std::invalid_argument("plan needs exactly one SP-QPSK reference and one CUT per grid parity");
}

struct PlanOptions {
    double base_freq_thz{192.10};  // slot 53 then sits at 194.75 THz
    int cut_even_slot{30};         // 193.60 THz
    int cut_odd_slot{29};          // 193.55 THz
    double loading_tx_osnr_db{11.5};
    double cut_tx_osnr_db{35.0};
};

// CUT rate table: the transponder keeps its ~34.475 GBd symbol rate in every
// format; net rate is 200 Gbit/s for DP-16QAM and halves for DP-QPSK.
struct CutRates {
    std::int64_t gross_mbps;
    std::int64_t net_mbps;
};

inline CutRates cut_rates(ModulationKind kind) {
    switch (kind) {
        case ModulationKind::DP16QAM: return {275800, 200000};
        case ModulationKind::DP8QAM: return {206850, 150000};
        case ModulationKind::DPQPSK: return {137900, 100000};
        default: throw std::invalid_argument("unsupported CUT format " + std::string(format_name(kind)));
    }
}

constexpr double kCutSymbolRateGbd = 34.475;

inline ChannelPlan build_default_plan(const PlanOptions& opt = {}) {
    ChannelPlan plan;
    plan.base_freq_ghz = static_cast<std::int64_t>(std::llround(opt.base_freq_thz * 1000.0));
    const int ref_slot = static_cast<int>((193400 - plan.base_freq_ghz) / kGridSpacingGhz);
    if (plan.base_freq_ghz + ref_slot * kGridSpacingGhz != 193400 || ref_slot < 0 || ref_slot >= kChannelCount)
        throw std::invalid_argument("base frequency puts 193.40 THz off the 54-slot grid");
    if (opt.cut_even_slot % 2 != 0 || opt.cut_odd_slot % 2 != 1)
        throw std::invalid_argument("CUT slot parity mismatch in plan options");
    if (opt.cut_even_slot == ref_slot)
        throw std::invalid_argument("even CUT collides with the SP-QPSK reference slot");

    for (int slot = 0; slot < kChannelCount; ++slot) {
        Channel ch;
        ch.slot = slot;
        ch.center_freq_ghz = plan.freq_of_slot(slot);
        if (slot == ref_slot) {
            ch.role = ChannelRole::SpQpskRef;
            ch.format = modulation(ModulationKind::SPQPSK);
            ch.symbol_rate_gbd = 32.0;
            ch.gross_rate_mbps = 100000;
            ch.fec_overhead = 0.0;
            ch.tx_osnr_db = opt.cut_tx_osnr_db;
        } else if (slot == opt.cut_even_slot || slot == opt.cut_odd_slot) {
            ch.role = slot == opt.cut_even_slot ? ChannelRole::CutEven : ChannelRole::CutOdd;
            ch.format = modulation(ModulationKind::DP16QAM);
            ch.symbol_rate_gbd = kCutSymbolRateGbd;
            const auto rates = cut_rates(ModulationKind::DP16QAM);
            ch.gross_rate_mbps = rates.gross_mbps;
            ch.net_rate_mbps = rates.net_mbps;
            ch.fec_overhead = 0.25;
            ch.tx_osnr_db = opt.cut_tx_osnr_db;
        } else {
            ch.role = ChannelRole::Loading;
            ch.format = modulation(ModulationKind::DP16QAM);
            ch.symbol_rate_gbd = 245.3 / 8.0;
            ch.gross_rate_mbps = 245300;
            ch.fec_overhead = 0.15;
            ch.tx_osnr_db = opt.loading_tx_osnr_db;
        }
        plan.channels.push_back(ch);
    }
    plan.validate();
    return plan;
}

// Moves a CUT to target_slot. The loading channel that held target_slot takes
// over the CUT's previous slot, so the plan stays at 54 channels.
inline ChannelPlan tune_cut(const ChannelPlan& plan, CutSelector which, int target_slot) {
    const int want_parity = which == CutSelector::Even ? 0 : 1;
    if (target_slot < 0 || target_slot >= kChannelCount)
        throw std::invalid_argument("target slot " + std::to_string(target_slot) + " outside 0..53");
    if (target_slot % 2 != want_parity)
        throw std::invalid_argument(std::string("slot ") + std::to_string(target_slot) + " is not on the " +
                                    (which == CutSelector::Even ? "even" : "odd") + " grid");
    if (target_slot == plan.sp_qpsk_slot())
        throw std::invalid_argument("cannot tune a CUT onto the SP-QPSK reference slot");

    ChannelPlan out = plan;
    const ChannelRole role = which == CutSelector::Even ? ChannelRole::CutEven : ChannelRole::CutOdd;
    Channel* cut = nullptr;
    Channel* displaced = nullptr;
    for (auto& ch : out.channels) {
        if (ch.role == role) cut = &ch;
        if (ch.slot == target_slot) displaced = &ch;
    }
    if (!cut) throw std::invalid_argument("plan has no CUT for the requested grid");
    if (!displaced) throw std::invalid_argument("no channel at slot " + std::to_string(target_slot));
    if (displaced == cut) return out;  // already there
    if (displaced->role != ChannelRole::Loading)
        throw std::invalid_argument("target slot is not a loading channel");

    displaced->slot = cut->slot;
    displaced->center_freq_ghz = out.freq_of_slot(displaced->slot);
    cut->slot = target_slot;
    cut->center_freq_ghz = out.freq_of_slot(target_slot);
    std::sort(out.channels.begin(), out.channels.end(),
              [](const Channel& a, const Channel& b) { return a.slot < b.slot; });
    out.validate();
    return out;
}

// Switches a CUT's modulation format, updating the rate bookkeeping.
inline ChannelPlan set_cut_format(const ChannelPlan& plan, CutSelector which, ModulationKind kind) {
    const auto rates = cut_rates(kind);
    ChannelPlan out = plan;
    const ChannelRole role = which == CutSelector::Even ? ChannelRole::CutEven : ChannelRole::CutOdd;
    for (auto& ch : out.channels) {
        if (ch.role != role) continue;
        ch.format = modulation(kind);
        ch.gross_rate_mbps = rates.gross_mbps;
        ch.net_rate_mbps = rates.net_mbps;
        out.validate();
        return out;
    }
    throw std::invalid_argument("plan has no CUT for the requested grid");
}

struct AggregateRates {
    double gross_total_gbps{};
    double net_total_known_gbps{};
};

inline AggregateRates aggregate_rates(const ChannelPlan& plan) {
    std::int64_t gross = 0, net = 0;
    for (const auto& ch : plan.channels) {
        gross += ch.gross_rate_mbps;
        if (ch.net_rate_mbps) net += *ch.net_rate_mbps;
    }
    return {static_cast<double>(gross) / 1000.0, static_cast<double>(net) / 1000.0};
}

inline std::string plan_to_csv(const ChannelPlan& plan) {
    std::ostringstream os;
    os << "slot,freq_ghz,role,format,symbol_rate_gbd,gross_gbps,net_gbps,fec_oh,tx_osnr_db\n";
    for (const auto& ch : plan.channels) {
        os << ch.slot << ',' << ch.center_freq_ghz << ',' << role_name(ch.role) << ',' << format_name(ch.format.kind)
           << ',' << format_double(ch.symbol_rate_gbd) << ',' << format_double(ch.gross_rate_gbps()) << ',';
        if (ch.net_rate_mbps) os << format_double(*ch.net_rate_gbps());
        os << ',' << format_double(ch.fec_overhead) << ',' << format_double(ch.tx_osnr_db) << '\n';
    }
    return os.str();
}

}  // namespace fsosim
