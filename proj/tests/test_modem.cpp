#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fsosim/modem.hpp"

using namespace fsosim;

namespace {
ModemModel cut_model(ModulationKind kind) {
    return {modulation(kind), kCutSymbolRateGbd, kDefaultImplPenaltyDb, kDefaultFecLimit};
}
}  // namespace

TEST_CASE("AWGN formulas against frozen erfc evaluations", "[modem]") {
    // frozen independently from a high-precision erfc oracle
    struct Point {
        ModulationKind kind;
        double snr_db, ber;
    };
    const Point points[] = {
        {ModulationKind::DPQPSK, 6.0, 2.30071389e-02},  {ModulationKind::DPQPSK, 10.0, 7.82701129e-04},
        {ModulationKind::DPQPSK, 14.0, 2.69514812e-07}, {ModulationKind::DP16QAM, 6.0, 1.39585363e-01},
        {ModulationKind::DP16QAM, 10.0, 5.89872026e-02}, {ModulationKind::DP16QAM, 14.0, 9.37561353e-03},
    };
    for (const auto& p : points)
        CHECK(awgn_ber(p.kind, p.snr_db) == Catch::Approx(p.ber).epsilon(1e-7));

    // spec anchor: QPSK at an equivalent SNR of 12.6 dB sits near 1e-5
    CHECK(awgn_ber(ModulationKind::DPQPSK, 12.6) == Catch::Approx(1.0e-5).margin(1.0e-6));
}

TEST_CASE("calibrated DP-16QAM crosses the FEC limit around 19 dB OSNR", "[modem]") {
    const auto model = cut_model(ModulationKind::DP16QAM);
    const double ber_at_19 = ber_from_osnr(model, 19.0);
    CHECK(ber_at_19 >= 2e-2);
    CHECK(ber_at_19 <= 3e-2);

    const double req = required_osnr(model, 2.5e-2);
    CHECK(req == Catch::Approx(19.0).margin(0.3));
}

TEST_CASE("required OSNR ordering and inverse consistency", "[modem]") {
    const auto qam16 = cut_model(ModulationKind::DP16QAM);
    const auto qpsk = cut_model(ModulationKind::DPQPSK);

    CHECK(required_osnr(qpsk, 2.5e-2) < required_osnr(qam16, 2.5e-2));

    for (double target : {1e-4, 1e-3, 1e-2, 2.5e-2}) {
        const double osnr = required_osnr(qam16, target);
        CHECK(ber_from_osnr(qam16, osnr) == Catch::Approx(target).epsilon(0.01));
    }

    // strictly monotone in the target
    CHECK(required_osnr(qam16, 1e-3) > required_osnr(qam16, 1e-2));

    CHECK_THROWS_AS(required_osnr(qam16, 0.49), std::invalid_argument);
    CHECK_THROWS_AS(required_osnr(qam16, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(required_osnr(qam16, 1.0), std::invalid_argument);
}

TEST_CASE("margin against the trial numbers", "[modem]") {
    const auto qam16 = cut_model(ModulationKind::DP16QAM);
    const double m = margin_db(qam16, 20.89);
    CHECK(m > 0.0);
    CHECK(m < 2.0);  // "less than 2 dB margin"
    CHECK(m == Catch::Approx(1.89).margin(0.05));

    const auto at_limit = required_osnr(qam16, qam16.fec_limit);
    CHECK(margin_db(qam16, at_limit) == Catch::Approx(0.0).margin(1e-9));

    CHECK(margin_db(cut_model(ModulationKind::DPQPSK), 20.89) > m);
}

TEST_CASE("BER is strictly decreasing in OSNR", "[modem]") {
    for (auto kind : {ModulationKind::DPQPSK, ModulationKind::DP16QAM, ModulationKind::DP8QAM}) {
        const auto model = cut_model(kind);
        double prev = 1.0;
        for (double osnr = 0.0; osnr <= 26.0; osnr += 0.25) {
            const double ber = ber_from_osnr(model, osnr);
            REQUIRE(ber < prev);
            REQUIRE(ber > 0.0);
            prev = ber;
        }
    }
}

TEST_CASE("denser constellations are strictly worse at equal OSNR", "[modem]") {
    for (double osnr = 10.0; osnr <= 25.0; osnr += 1.0) {
        CHECK(ber_from_osnr(cut_model(ModulationKind::DP16QAM), osnr) >
              ber_from_osnr(cut_model(ModulationKind::DP8QAM), osnr));
        CHECK(ber_from_osnr(cut_model(ModulationKind::DP8QAM), osnr) >
              ber_from_osnr(cut_model(ModulationKind::DPQPSK), osnr));
    }
}

TEST_CASE("extreme OSNR saturates instead of throwing", "[modem]") {
    const auto model = cut_model(ModulationKind::DPQPSK);
    CHECK(ber_from_osnr(model, 60.0) == 0.0);          // underflows to zero
    CHECK(ber_from_osnr(model, -40.0) < 0.5);          // saturates toward 1/2
    CHECK(ber_from_osnr(model, -40.0) > 0.49);
    CHECK_THROWS_AS(ber_from_osnr(model, std::nan("")), std::invalid_argument);
}

TEST_CASE("implementation penalty shifts the required OSNR exactly", "[modem]") {
    for (auto kind : {ModulationKind::DPQPSK, ModulationKind::DP16QAM}) {
        auto zero = cut_model(kind);
        zero.impl_penalty_db = 0.0;
        auto shifted = cut_model(kind);
        shifted.impl_penalty_db = 3.7;
        CHECK(required_osnr(shifted, 1e-2) - required_osnr(zero, 1e-2) == Catch::Approx(3.7).margin(1e-9));
    }
}

TEST_CASE("dual-polarization OSNR-to-SNR conversion uses both ASE polarizations", "[modem]") {
    const auto dp = cut_model(ModulationKind::DPQPSK);
    ModemModel sp{modulation(ModulationKind::SPQPSK), kCutSymbolRateGbd, kDefaultImplPenaltyDb, kDefaultFecLimit};
    // at the same OSNR the DP signal sees 3 dB more per-symbol SNR
    CHECK(osnr_to_snr_db(dp, 20.0) - osnr_to_snr_db(sp, 20.0) == Catch::Approx(10.0 * std::log10(2.0)));
}

TEST_CASE("model validation", "[modem]") {
    auto model = cut_model(ModulationKind::DP16QAM);
    model.fec_limit = 1e-2;
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
    model = cut_model(ModulationKind::DP16QAM);
    model.impl_penalty_db = -1.0;
    CHECK_THROWS_AS(model.validate(), std::invalid_argument);
}
