#pragma once

// Temporally correlated scintillation fading. Intensity is log-normal: the
// log-intensity follows a stationary first-order Gauss-Markov process with
// autocorrelation exp(-dt/tau_c), variance ln(1+sigma_I^2) and mean chosen so
// that E[I] = 1. Generation is a pure function of (params, duration, seed).

#include <cmath>
#include <cstdint>
#include <istream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsosim/csv.hpp"

namespace fsosim {

struct TurbulenceParams {
    double scintillation_index{0.0};  // sigma_I^2
    double coherence_time_ms{2.0};
    double sample_interval_ms{0.1};
    double lock_loss_threshold_db{12.0};  // fade depth below mean that unlocks the RX
    double relock_time_ms{2.0};

    void validate() const {
        if (!std::isfinite(scintillation_index) || scintillation_index < 0.0)
            throw std::invalid_argument("scintillation index must be finite and >= 0");
        if (!std::isfinite(coherence_time_ms) || coherence_time_ms <= 0.0)
            throw std::invalid_argument("coherence time must be positive");
        if (!std::isfinite(sample_interval_ms) || sample_interval_ms <= 0.0)
            throw std::invalid_argument("sample interval must be positive");
        if (sample_interval_ms > coherence_time_ms / 5.0)
            throw std::invalid_argument("sample interval must be <= coherence_time/5 to resolve fades");
        if (!std::isfinite(lock_loss_threshold_db) || lock_loss_threshold_db <= 0.0)
            throw std::invalid_argument("lock loss threshold must be positive");
        if (!std::isfinite(relock_time_ms) || relock_time_ms < 0.0)
            throw std::invalid_argument("relock time must be >= 0");
    }
};

struct FadingSeries {
    std::vector<double> samples;  // normalized intensity, mean-1 by construction
    double sample_interval_ms{};
    TurbulenceParams params{};
    std::uint64_t seed{};

    double duration_ms() const { return static_cast<double>(samples.size()) * sample_interval_ms; }
};

// Gaussian sampler with a fully spelled-out algorithm (Box-Muller over raw
// mt19937_64 words), so a seed pins the sequence independent of the standard
// library's distribution internals.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform01() {  // in (0, 1]
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double phi = 2.0 * M_PI * uniform01();
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_{false};
    double spare_{};
};

inline FadingSeries generate_fading(const TurbulenceParams& params, double duration_ms, std::uint64_t seed) {
    params.validate();
    if (!std::isfinite(duration_ms) || duration_ms < params.sample_interval_ms)
        throw std::invalid_argument("duration must cover at least one sample interval");

    const auto n = static_cast<std::size_t>(std::llround(duration_ms / params.sample_interval_ms));
    FadingSeries series;
    series.sample_interval_ms = params.sample_interval_ms;
    series.params = params;
    series.seed = seed;
    series.samples.resize(n);

    if (params.scintillation_index == 0.0) {
        std::fill(series.samples.begin(), series.samples.end(), 1.0);
        return series;
    }

    const double var_x = std::log1p(params.scintillation_index);
    const double sigma_x = std::sqrt(var_x);
    const double mean_x = -0.5 * var_x;
    const double rho = std::exp(-params.sample_interval_ms / params.coherence_time_ms);
    const double innovation = sigma_x * std::sqrt(1.0 - rho * rho);

    NormalSampler normal(seed);
    double x = mean_x + sigma_x * normal();
    series.samples[0] = std::exp(x);
    for (std::size_t i = 1; i < n; ++i) {
        x = mean_x + rho * (x - mean_x) + innovation * normal();
        series.samples[i] = std::exp(x);
    }
    return series;
}

// <I^2>/<I>^2 - 1
inline double scintillation_index(const FadingSeries& series) {
    if (series.samples.size() < 2) throw std::invalid_argument("need at least 2 samples");
    double sum = 0.0, sum2 = 0.0;
    for (double v : series.samples) {
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(series.samples.size());
    const double mean = sum / n;
    return (sum2 / n) / (mean * mean) - 1.0;
}

// Lag at which the autocorrelation of ln(I) first drops below 1/e of its
// lag-0 value, linearly interpolated between lags. For the Gauss-Markov
// process this estimates the coherence time.
inline double autocorrelation_efold_ms(const FadingSeries& series) {
    const double tau = series.params.coherence_time_ms;
    const double dt = series.sample_interval_ms;
    if (series.duration_ms() < 20.0 * tau)
        throw std::invalid_argument("series must span at least 20 coherence times");

    const std::size_t n = series.samples.size();
    std::vector<double> y(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(series.samples[i] > 0.0)) throw std::invalid_argument("non-positive intensity sample");
        y[i] = std::log(series.samples[i]);
        mean += y[i];
    }
    mean /= static_cast<double>(n);
    for (auto& v : y) v -= mean;

    double c0 = 0.0;
    for (double v : y) c0 += v * v;
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) throw std::invalid_argument("zero-variance series has no e-fold time");

    const double target = c0 / M_E;
    const auto max_lag = std::min(n - 1, static_cast<std::size_t>(std::ceil(10.0 * tau / dt)));
    double prev = c0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) ck += y[i] * y[i + k];
        ck /= static_cast<double>(n - k);
        if (ck < target) {
            const double frac = (prev - target) / (prev - ck);
            return (static_cast<double>(k - 1) + frac) * dt;
        }
        prev = ck;
    }
    throw std::runtime_error("autocorrelation did not reach 1/e within 10 coherence times");
}

inline std::string fading_to_csv(const FadingSeries& series) {
    std::ostringstream os;
    os << "t_ms,intensity\n";
    for (std::size_t i = 0; i < series.samples.size(); ++i)
        os << format_double(static_cast<double>(i) * series.sample_interval_ms) << ','
           << format_double(series.samples[i]) << '\n';
    return os.str();
}

// Reads a measured power vector for replay in place of a synthetic series.
inline FadingSeries fading_from_csv(std::istream& in, const TurbulenceParams& params) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "t_ms,intensity")
        throw std::invalid_argument("fading CSV must start with header 't_ms,intensity'");
    FadingSeries series;
    series.params = params;
    series.sample_interval_ms = params.sample_interval_ms;
    series.seed = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2)
            throw std::invalid_argument("fading CSV line " + std::to_string(lineno) + ": expected 2 fields");
        const double intensity = parse_double(fields[1]);
        if (!(intensity >= 0.0))
            throw std::invalid_argument("fading CSV line " + std::to_string(lineno) + ": negative intensity");
        series.samples.push_back(intensity);
    }
    return series;
}

}  // namespace fsosim
