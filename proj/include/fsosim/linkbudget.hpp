#pragma once

// Per-channel mean RX OSNR (spectral tilt plus back-to-back calibration
// anchor) and instantaneous OSNR under a fading sample. The RX pre-amplifier
// sets the noise floor, so the instantaneous OSNR tracks received power
// dB-for-dB until the receiver loses lock.

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "fsosim/csv.hpp"
#include "fsosim/plan.hpp"

namespace fsosim {

struct LinkConfig {
    double tx_power_total_dbm{32.0};
    double center_osnr_db{20.89};     // SP-QPSK reference channel, 12.5 GHz bandwidth
    double tilt_db_per_thz{-1.0};     // higher frequencies see lower OSNR
    double link_length_km{10.45};     // informational

    void validate() const {
        if (!std::isfinite(tx_power_total_dbm) || !std::isfinite(center_osnr_db) ||
            !std::isfinite(tilt_db_per_thz))
            throw std::invalid_argument("link config values must be finite");
    }
};

struct OsnrProfile {
    std::map<int, double> osnr_db;  // slot -> mean OSNR
    int ref_slot{};                 // SP-QPSK reference, the calibration anchor
    double reference_bandwidth_ghz{12.5};

    double at(int slot) const {
        auto it = osnr_db.find(slot);
        if (it == osnr_db.end()) throw std::invalid_argument("no OSNR entry for slot " + std::to_string(slot));
        return it->second;
    }
};

// OSNR(slot) = center + tilt * (f_slot - f_ref), plus optional per-slot
// offsets from a measured calibration file.
inline OsnrProfile mean_osnr_profile(const LinkConfig& config, const ChannelPlan& plan,
                                     const std::map<int, double>& offsets = {}) {
    config.validate();
    plan.validate();
    OsnrProfile profile;
    profile.ref_slot = plan.sp_qpsk_slot();
    const double f_ref_thz = plan.find_role(ChannelRole::SpQpskRef).center_freq_thz();
    for (const auto& ch : plan.channels) {
        double osnr = config.center_osnr_db + config.tilt_db_per_thz * (ch.center_freq_thz() - f_ref_thz);
        if (auto it = offsets.find(ch.slot); it != offsets.end()) osnr += it->second;
        profile.osnr_db[ch.slot] = osnr;
    }
    return profile;
}

// Uniform dB shift so the reference slot reads target_center; the relative
// shape is untouched, mirroring the attenuator-based back-to-back calibration.
inline OsnrProfile calibrate_back_to_back(OsnrProfile profile, double target_center_db) {
    if (profile.osnr_db.empty()) throw std::invalid_argument("cannot calibrate an empty profile");
    const double shift = target_center_db - profile.at(profile.ref_slot);
    for (auto& [slot, osnr] : profile.osnr_db) osnr += shift;
    return profile;
}

// CSV `slot,osnr_offset_db`, applied additively after the tilt.
inline std::map<int, double> load_osnr_offsets(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "slot,osnr_offset_db")
        throw std::invalid_argument("offset CSV must start with header 'slot,osnr_offset_db'");
    std::map<int, double> offsets;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2)
            throw std::invalid_argument("offset CSV line " + std::to_string(lineno) + ": expected 2 fields");
        offsets[static_cast<int>(parse_int(fields[0]))] = parse_double(fields[1]);
    }
    return offsets;
}

inline double fade_depth_db(double intensity) {
    if (!(intensity >= 0.0)) throw std::invalid_argument("intensity must be >= 0");
    if (intensity == 0.0) return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(intensity);
}

// Instantaneous OSNR under a fading sample; nullopt means the receiver is
// unlocked (fade depth at or beyond the lock-loss threshold).
inline std::optional<double> instantaneous_osnr(double mean_osnr_db, double intensity,
                                                double lock_loss_threshold_db) {
    const double fade = fade_depth_db(intensity);
    if (fade >= lock_loss_threshold_db) return std::nullopt;
    return mean_osnr_db - fade;
}

}  // namespace fsosim
