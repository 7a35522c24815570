#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fsosim/turbulence.hpp"

using namespace fsosim;

namespace {
TurbulenceParams params(double sigma2, double tau_ms) {
    TurbulenceParams p;
    p.scintillation_index = sigma2;
    p.coherence_time_ms = tau_ms;
    p.sample_interval_ms = 0.1;
    return p;
}
}  // namespace

TEST_CASE("zero scintillation gives a constant unit series", "[turbulence]") {
    const auto series = generate_fading(params(0.0, 2.0), 10.0, 123);
    REQUIRE(series.samples.size() == 100);
    for (double v : series.samples) REQUIRE(v == 1.0);
    CHECK(scintillation_index(series) == 0.0);
}

TEST_CASE("fading generation is deterministic in the seed", "[turbulence]") {
    const auto a = generate_fading(params(0.25, 2.0), 1000.0, 42);
    const auto b = generate_fading(params(0.25, 2.0), 1000.0, 42);
    REQUIRE(a.samples == b.samples);

    const auto c = generate_fading(params(0.25, 2.0), 1000.0, 43);
    REQUIRE(a.samples != c.samples);
}

TEST_CASE("series from different seeds are effectively uncorrelated", "[turbulence]") {
    const auto a = generate_fading(params(0.25, 1.0), 200000.0, 1001);
    const auto b = generate_fading(params(0.25, 1.0), 200000.0, 2002);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        ma += a.samples[i];
        mb += b.samples[i];
    }
    ma /= static_cast<double>(a.samples.size());
    mb /= static_cast<double>(b.samples.size());
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        cov += (a.samples[i] - ma) * (b.samples[i] - mb);
        va += (a.samples[i] - ma) * (a.samples[i] - ma);
        vb += (b.samples[i] - mb) * (b.samples[i] - mb);
    }
    CHECK(std::abs(cov / std::sqrt(va * vb)) < 0.01);
}

TEST_CASE("mean intensity and scintillation index match the configuration", "[turbulence]") {
    std::uint64_t seed = 7;
    for (double sigma2 : {0.05, 0.1, 0.25, 1.0}) {
        INFO("sigma_I^2 = " << sigma2);
        const auto series = generate_fading(params(sigma2, 1.0), 100000.0, seed += 3);  // 1e6 samples
        double mean = 0;
        for (double v : series.samples) mean += v;
        mean /= static_cast<double>(series.samples.size());
        CHECK(mean > 0.99);
        CHECK(mean < 1.01);

        const double est = scintillation_index(series);
        CHECK(est > sigma2 * 0.95);
        CHECK(est < sigma2 * 1.05);
    }
}

TEST_CASE("scintillation index estimator on tiny hand series", "[turbulence]") {
    FadingSeries series;
    series.sample_interval_ms = 1.0;
    series.samples = {0.5, 1.5};
    CHECK(scintillation_index(series) == Catch::Approx(0.25));  // 1.25/1 - 1

    series.samples = {1.0};
    CHECK_THROWS_AS(scintillation_index(series), std::invalid_argument);
}

TEST_CASE("autocorrelation e-fold recovers the coherence time", "[turbulence]") {
    for (double tau : {2.0, 5.0}) {
        const auto series = generate_fading(params(0.25, tau), 200000.0, 11);
        const double efold = autocorrelation_efold_ms(series);
        CHECK(efold > 0.9 * tau);
        CHECK(efold < 1.1 * tau);
    }
}

TEST_CASE("autocorrelation e-fold rejects degenerate input", "[turbulence]") {
    const auto constant = generate_fading(params(0.0, 2.0), 1000.0, 5);
    CHECK_THROWS(autocorrelation_efold_ms(constant));

    const auto series = generate_fading(params(0.1, 2.0), 30.0, 5);  // only 15 coherence times
    CHECK_THROWS_AS(autocorrelation_efold_ms(series), std::invalid_argument);
}

TEST_CASE("log-intensity is close to Gaussian", "[turbulence]") {
    const auto series = generate_fading(params(0.5, 1.0), 100000.0, 99);
    double m = 0;
    for (double v : series.samples) m += std::log(v);
    m /= static_cast<double>(series.samples.size());
    double m2 = 0, m3 = 0;
    for (double v : series.samples) {
        const double d = std::log(v) - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(series.samples.size());
    m3 /= static_cast<double>(series.samples.size());
    const double skewness = m3 / std::pow(m2, 1.5);
    CHECK(std::abs(skewness) < 0.05);
}

TEST_CASE("parameter validation", "[turbulence]") {
    CHECK_THROWS_AS(generate_fading(params(-0.1, 2.0), 100.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_fading(params(0.1, 0.0), 100.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_fading(params(std::nan(""), 2.0), 100.0, 1), std::invalid_argument);

    TurbulenceParams coarse = params(0.1, 2.0);
    coarse.sample_interval_ms = 0.5;  // > tau/5
    CHECK_THROWS_AS(generate_fading(coarse, 100.0, 1), std::invalid_argument);

    CHECK_THROWS_AS(generate_fading(params(0.1, 2.0), 0.05, 1), std::invalid_argument);
}

TEST_CASE("fading series round-trips through CSV", "[turbulence]") {
    const auto series = generate_fading(params(0.3, 2.0), 50.0, 31);
    const auto csv = fading_to_csv(series);
    std::istringstream in(csv);
    const auto back = fading_from_csv(in, series.params);
    REQUIRE(back.samples == series.samples);

    std::istringstream bad("intensity\n1.0\n");
    CHECK_THROWS_AS(fading_from_csv(bad, series.params), std::invalid_argument);
}
