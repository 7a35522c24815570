#pragma once

// Telemetry analysis and report rendering: interval percentages, pre-FEC BER
// histograms, OSNR estimates and the file outputs (CSV + standalone SVG).
//
// Normative telemetry CSV:
//   time_s,slot,freq_ghz,format,prefec_ber,uncorrected_blocks,postfec_errors,locked
// prefec_ber is a decimal float, the literal `nan` for lost intervals, or the
// literal `<1e-8` for valid intervals with zero detected errors. `locked` is
// 0/1. UTF-8, LF line endings.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsosim/campaign.hpp"
#include "fsosim/csv.hpp"
#include "fsosim/fec_intervals.hpp"
#include "fsosim/linkbudget.hpp"
#include "fsosim/svg.hpp"

namespace fsosim {

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class LogSource { Simulated, Ingested };

struct TelemetryLog {
    std::vector<IntervalRecord> records;
    LogSource source{LogSource::Simulated};
};

inline constexpr std::string_view kTelemetryHeader =
    "time_s,slot,freq_ghz,format,prefec_ber,uncorrected_blocks,postfec_errors,locked";

inline std::string ber_literal(const IntervalRecord& rec) {
    if (std::isnan(rec.prefec_ber)) return "nan";
    if (rec.below_floor) return "<1e-8";
    return format_double(rec.prefec_ber);
}

inline void write_telemetry_csv(const std::vector<IntervalRecord>& records, std::ostream& os) {
    os << kTelemetryHeader << '\n';
    for (const auto& rec : records) {
        os << format_double(rec.t_start_s) << ',' << rec.channel_slot << ',' << rec.freq_ghz << ','
           << format_name(rec.format) << ',' << ber_literal(rec) << ',' << rec.uncorrected_blocks << ','
           << rec.postfec_errors << ',' << (rec.locked ? '1' : '0') << '\n';
    }
}

struct IngestResult {
    TelemetryLog log;
    std::vector<std::string> row_errors;  // "line N: message"
};

inline IngestResult ingest_log(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kTelemetryHeader)
        throw IngestError("telemetry header mismatch, expected '" + std::string(kTelemetryHeader) + "'");

    IngestResult result;
    result.log.source = LogSource::Ingested;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            const auto f = split_csv(line);
            if (f.size() != 8) throw std::invalid_argument("expected 8 fields, got " + std::to_string(f.size()));
            IntervalRecord rec;
            rec.t_start_s = parse_double(f[0]);
            rec.channel_slot = static_cast<int>(parse_int(f[1]));
            if (rec.channel_slot < 0 || rec.channel_slot >= kChannelCount)
                throw std::invalid_argument("slot outside 0..53");
            rec.freq_ghz = parse_int(f[2]);
            const auto fmt = parse_format(trim(f[3]));
            if (!fmt) throw std::invalid_argument("unknown format '" + std::string(trim(f[3])) + "'");
            rec.format = *fmt;
            const auto ber_field = trim(f[4]);
            if (ber_field == "<1e-8") {
                rec.prefec_ber = kBelowFloorBer;
                rec.below_floor = true;
            } else {
                rec.prefec_ber = parse_double(ber_field);  // "nan" parses to NaN = lost
                if (!std::isnan(rec.prefec_ber) && rec.prefec_ber < 0.0)
                    throw std::invalid_argument("negative pre-FEC BER");
            }
            rec.uncorrected_blocks = parse_int(f[5]);
            if (rec.uncorrected_blocks < 0) throw std::invalid_argument("negative uncorrected_blocks");
            rec.postfec_errors = parse_int(f[6]);
            if (rec.postfec_errors < 0) throw std::invalid_argument("negative postfec_errors");
            const auto locked = trim(f[7]);
            if (locked != "0" && locked != "1") throw std::invalid_argument("locked must be 0 or 1");
            rec.locked = locked == "1";
            rec.cls = classify(rec);
            result.log.records.push_back(rec);
        } catch (const std::exception& e) {
            result.row_errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return result;
}

struct Percentages {
    double valid_pct{};
    double uncorrected_pct{};
    double lost_pct{};
    std::int64_t total{};
};

inline Percentages interval_percentages(const TelemetryLog& log, int slot) {
    std::int64_t n = 0, valid = 0, uncorrected = 0, lost = 0;
    for (const auto& rec : log.records) {
        if (rec.channel_slot != slot) continue;
        ++n;
        switch (rec.cls) {
            case IntervalClass::Valid: ++valid; break;
            case IntervalClass::Uncorrected: ++uncorrected; break;
            case IntervalClass::Lost: ++lost; break;
        }
    }
    if (n == 0) throw std::invalid_argument("no records for slot " + std::to_string(slot));
    const double scale = 100.0 / static_cast<double>(n);
    return {static_cast<double>(valid) * scale, static_cast<double>(uncorrected) * scale,
            static_cast<double>(lost) * scale, n};
}

// log10(BER) bins from -8 to -1, 0.1 decade wide, plus the "<1e-8" floor bin.
// Only Valid records are counted; out-of-range values clamp into the edge
// bins so that counts always conserve.
struct Histogram {
    static constexpr double kLogMin = -8.0;
    static constexpr double kLogMax = -1.0;
    static constexpr double kBinWidth = 0.1;
    static constexpr int kBins = 70;

    std::array<std::int64_t, kBins> counts{};
    std::int64_t below_floor_count{};
    std::int64_t total{};  // number of Valid records included

    static double bin_lo(int i) { return kLogMin + i * kBinWidth; }
    static double bin_hi(int i) { return kLogMin + (i + 1) * kBinWidth; }
};

inline Histogram ber_histogram(const TelemetryLog& log, int slot) {
    Histogram h;
    for (const auto& rec : log.records) {
        if (rec.channel_slot != slot || rec.cls != IntervalClass::Valid) continue;
        ++h.total;
        if (rec.below_floor) {
            ++h.below_floor_count;
            continue;
        }
        const double l = std::log10(rec.prefec_ber);
        const int bin = static_cast<int>(std::floor((l - Histogram::kLogMin) / Histogram::kBinWidth));
        if (bin < 0)
            ++h.below_floor_count;
        else
            ++h.counts[static_cast<std::size_t>(std::min(bin, Histogram::kBins - 1))];
    }
    return h;
}

// Linear-domain average over spectral sweeps (what an OSA's power averaging
// does), reported in dB. Values are sorted before summation so the estimate
// is exactly invariant under sweep reordering.
inline std::map<int, double> mean_osnr_estimate(const std::vector<std::map<int, double>>& sweeps) {
    if (sweeps.empty()) throw std::invalid_argument("need at least one sweep");
    std::map<int, std::vector<double>> linear;
    for (const auto& sweep : sweeps) {
        if (sweep.size() != sweeps.front().size())
            throw std::invalid_argument("sweeps must cover the same channels");
        for (const auto& [slot, db] : sweep) linear[slot].push_back(std::pow(10.0, db / 10.0));
    }
    std::map<int, double> out;
    for (auto& [slot, values] : linear) {
        if (values.size() != sweeps.size()) throw std::invalid_argument("sweeps must cover the same channels");
        std::sort(values.begin(), values.end());
        double sum = 0.0;
        for (double v : values) sum += v;
        out[slot] = 10.0 * std::log10(sum / static_cast<double>(values.size()));
    }
    return out;
}

struct ReportStatus {
    std::vector<std::filesystem::path> files;
    std::vector<int> omitted_slots;  // slots with no valid records (no histogram)
    bool partial() const { return !omitted_slots.empty(); }
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content,
                       std::vector<std::filesystem::path>& files) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os << content;
    if (!os) throw IoError("write failed for " + path.string());
    files.push_back(path);
}

inline const char* class_color(IntervalClass cls) {
    switch (cls) {
        case IntervalClass::Valid: return "#4caf50";
        case IntervalClass::Uncorrected: return "#ff9800";
        case IntervalClass::Lost: return "#d32f2f";
    }
    return "#000000";
}

inline const char* trace_color(std::size_t idx) {
    static constexpr const char* palette[] = {"#1565c0", "#c62828", "#2e7d32", "#6a1b9a", "#ef6c00", "#00838f"};
    return palette[idx % 6];
}

}  // namespace detail

// Emits the report file set under out_dir:
//   percentages.csv/.svg    per-channel interval shares (stacked bars)
//   histograms.csv/.svg     per-channel pre-FEC BER histograms (valid only)
//   osnr_profile.csv/.svg   mean OSNR per channel (when a profile is given)
//   time_evolution.csv/.svg pre-FEC BER traces over time
//   summary.txt             per-channel counts and omissions
inline ReportStatus render_report(const TelemetryLog& log, const OsnrProfile* profile, const ChannelPlan* plan,
                                  const std::filesystem::path& out_dir) {
    if (log.records.empty()) throw std::invalid_argument("cannot render a report from an empty log");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    ReportStatus status;

    std::map<int, std::vector<const IntervalRecord*>> by_slot;
    for (const auto& rec : log.records) by_slot[rec.channel_slot].push_back(&rec);

    // --- percentages ---
    {
        std::ostringstream csv;
        csv << "slot,freq_ghz,format,records,valid_pct,uncorrected_pct,lost_pct\n";
        for (const auto& [slot, recs] : by_slot) {
            const auto pct = interval_percentages(log, slot);
            csv << slot << ',' << recs.front()->freq_ghz << ',' << format_name(recs.front()->format) << ','
                << pct.total << ',' << format_double(pct.valid_pct) << ',' << format_double(pct.uncorrected_pct)
                << ',' << format_double(pct.lost_pct) << '\n';
        }
        detail::write_file(out_dir / "percentages.csv", csv.str(), status.files);

        const double w = 640, h = 360, left = 60, bottom = 40, top = 30;
        SvgWriter svg(w, h);
        svg.text(left, 18, "Interval shares per channel [%]", 12);
        const double plot_h = h - bottom - top;
        const double bar_w = (w - left - 20) / static_cast<double>(by_slot.size());
        std::size_t i = 0;
        for (const auto& [slot, recs] : by_slot) {
            const auto pct = interval_percentages(log, slot);
            const double x = left + static_cast<double>(i) * bar_w;
            double y = top + plot_h;
            for (auto [share, color] : {std::pair{pct.valid_pct, "#4caf50"}, {pct.uncorrected_pct, "#ff9800"},
                                        {pct.lost_pct, "#d32f2f"}}) {
                const double hh = plot_h * share / 100.0;
                y -= hh;
                svg.rect(x + 1, y, bar_w - 2, hh, color);
            }
            svg.text(x + bar_w / 2, h - bottom + 14, std::to_string(slot), 9, "middle");
            ++i;
        }
        svg.text(w / 2, h - 8, "channel slot", 10, "middle");
        detail::write_file(out_dir / "percentages.svg", svg.str(), status.files);
    }

    // --- histograms ---
    {
        std::ostringstream csv;
        csv << "slot,bin_lo_log10,bin_hi_log10,count\n";
        std::map<int, Histogram> hists;
        for (const auto& [slot, recs] : by_slot) {
            auto h = ber_histogram(log, slot);
            csv << slot << ",-inf,-8," << h.below_floor_count << '\n';
            for (int b = 0; b < Histogram::kBins; ++b)
                csv << slot << ',' << format_double(Histogram::bin_lo(b)) << ','
                    << format_double(Histogram::bin_hi(b)) << ',' << h.counts[static_cast<std::size_t>(b)] << '\n';
            if (h.total == 0) status.omitted_slots.push_back(slot);
            hists[slot] = h;
        }
        detail::write_file(out_dir / "histograms.csv", csv.str(), status.files);

        // one column per channel, shade = per-channel density
        const double w = 640, h = 360, left = 60, bottom = 40, top = 30;
        SvgWriter svg(w, h);
        svg.text(left, 18, "Pre-FEC BER density per channel (valid intervals, log10 bins)", 12);
        const double plot_h = h - bottom - top;
        const double col_w = (w - left - 20) / static_cast<double>(hists.size());
        const double row_h = plot_h / (Histogram::kBins + 1);
        std::size_t i = 0;
        for (const auto& [slot, hist] : hists) {
            if (hist.total > 0) {
                std::int64_t peak = hist.below_floor_count;
                for (auto cnt : hist.counts) peak = std::max(peak, cnt);
                const double x = left + static_cast<double>(i) * col_w;
                for (int b = 0; b < Histogram::kBins; ++b) {
                    const auto cnt = hist.counts[static_cast<std::size_t>(b)];
                    if (cnt == 0) continue;
                    // bin -8 at the bottom
                    const double y = top + plot_h - static_cast<double>(b + 2) * row_h;
                    svg.rect(x, y, col_w, row_h, "#1565c0",
                             static_cast<double>(cnt) / static_cast<double>(peak));
                }
                if (hist.below_floor_count > 0)
                    svg.rect(x, top + plot_h - row_h, col_w, row_h, "#4caf50",
                             static_cast<double>(hist.below_floor_count) / static_cast<double>(peak));
            }
            svg.text(left + (static_cast<double>(i) + 0.5) * col_w, h - bottom + 14, std::to_string(slot), 9,
                     "middle");
            ++i;
        }
        svg.text(w / 2, h - 8, "channel slot", 10, "middle");
        svg.text(14, top + 12, "-1", 9);
        svg.text(14, top + plot_h - row_h - 2, "-8", 9);
        svg.text(14, top + plot_h - 2, "<1e-8", 8);
        detail::write_file(out_dir / "histograms.svg", svg.str(), status.files);
    }

    // --- OSNR profile ---
    if (profile && plan) {
        std::ostringstream csv;
        csv << "slot,freq_ghz,mean_osnr_db\n";
        for (const auto& [slot, osnr] : profile->osnr_db)
            csv << slot << ',' << plan->freq_of_slot(slot) << ',' << format_double(osnr) << '\n';
        detail::write_file(out_dir / "osnr_profile.csv", csv.str(), status.files);

        const double w = 640, h = 280, left = 60, bottom = 40, top = 30;
        SvgWriter svg(w, h);
        svg.text(left, 18, "Mean RX OSNR per channel [dB]", 12);
        double lo = 1e9, hi = -1e9;
        for (const auto& [slot, osnr] : profile->osnr_db) {
            lo = std::min(lo, osnr);
            hi = std::max(hi, osnr);
        }
        const double pad = std::max(0.5, (hi - lo) * 0.1);
        lo -= pad;
        hi += pad;
        const double plot_h = h - bottom - top, plot_w = w - left - 20;
        std::string points;
        const double dx = plot_w / static_cast<double>(profile->osnr_db.size() - 1 ? profile->osnr_db.size() - 1 : 1);
        std::size_t i = 0;
        for (const auto& [slot, osnr] : profile->osnr_db) {
            const double x = left + static_cast<double>(i) * dx;
            const double y = top + plot_h * (hi - osnr) / (hi - lo);
            points += SvgWriter::c(x) + "," + SvgWriter::c(y) + " ";
            ++i;
        }
        svg.polyline(points, "#1565c0", 1.5);
        svg.text(left - 4, top + 12, format_fixed(hi, 1), 9, "end");
        svg.text(left - 4, top + plot_h, format_fixed(lo, 1), 9, "end");
        svg.text(w / 2, h - 8, "channel slot (ascending frequency)", 10, "middle");
        detail::write_file(out_dir / "osnr_profile.svg", svg.str(), status.files);
    }

    // --- time evolution ---
    {
        std::ostringstream csv;
        csv << "time_s,slot,format,prefec_ber,class\n";
        for (const auto& rec : log.records)
            csv << format_double(rec.t_start_s) << ',' << rec.channel_slot << ',' << format_name(rec.format) << ','
                << ber_literal(rec) << ',' << class_name(rec.cls) << '\n';
        detail::write_file(out_dir / "time_evolution.csv", csv.str(), status.files);

        const double w = 800, h = 360, left = 60, bottom = 40, top = 40;
        SvgWriter svg(w, h);
        svg.text(left, 18, "Pre-FEC BER over time (band on top: uncorrected blocks / lost)", 12);
        double t0 = log.records.front().t_start_s, t1 = t0;
        for (const auto& rec : log.records) {
            t0 = std::min(t0, rec.t_start_s);
            t1 = std::max(t1, rec.t_start_s);
        }
        if (t1 == t0) t1 = t0 + 1.0;
        const double plot_h = h - bottom - top, plot_w = w - left - 20;
        auto xpos = [&](double t) { return left + plot_w * (t - t0) / (t1 - t0); };
        // log10 BER from -8 (bottom) to -1 (top)
        auto ypos = [&](double ber) {
            const double l = std::clamp(std::log10(std::max(ber, kBelowFloorBer)), -8.0, -1.0);
            return top + plot_h * (-1.0 - l) / 7.0;
        };
        std::size_t idx = 0;
        for (const auto& [slot, recs] : by_slot) {
            std::string points;
            for (const auto* rec : recs) {
                if (rec->cls == IntervalClass::Valid)
                    points += SvgWriter::c(xpos(rec->t_start_s)) + "," + SvgWriter::c(ypos(rec->prefec_ber)) + " ";
            }
            if (!points.empty()) svg.polyline(points, detail::trace_color(idx), 1.0);
            for (const auto* rec : recs)
                if (rec->cls != IntervalClass::Valid)
                    svg.circle(xpos(rec->t_start_s),
                               top - (rec->cls == IntervalClass::Lost ? 16.0 : 9.0), 1.5,
                               detail::class_color(rec->cls));
            if (by_slot.size() <= 6) {  // per-trace legend only where it stays readable
                svg.text(w - 80, top + 14 + 12 * static_cast<double>(idx),
                         "slot " + std::to_string(slot) + " (" +
                             std::string(format_name(recs.front()->format)) + ")",
                         9);
                svg.line(w - 88, top + 10 + 12 * static_cast<double>(idx), w - 82,
                         top + 10 + 12 * static_cast<double>(idx), detail::trace_color(idx), 2.0);
            }
            ++idx;
        }
        svg.text(left - 4, ypos(1e-1) + 4, "-1", 9, "end");
        svg.text(left - 4, ypos(1e-8) + 4, "<1e-8", 8, "end");
        svg.text(w / 2, h - 8, "time [s]", 10, "middle");
        detail::write_file(out_dir / "time_evolution.svg", svg.str(), status.files);
    }

    // --- summary ---
    {
        std::ostringstream txt;
        for (const auto& [slot, recs] : by_slot) {
            const auto pct = interval_percentages(log, slot);
            const auto hist = ber_histogram(log, slot);
            txt << "slot " << slot << ": records " << pct.total << ", valid " << format_double(pct.valid_pct)
                << "%, uncorrected " << format_double(pct.uncorrected_pct) << "%, lost "
                << format_double(pct.lost_pct) << "%, below_floor " << hist.below_floor_count << '\n';
        }
        for (int slot : status.omitted_slots)
            txt << "slot " << slot << ": no valid intervals; histogram omitted\n";
        detail::write_file(out_dir / "summary.txt", txt.str(), status.files);
    }

    return status;
}

}  // namespace fsosim
