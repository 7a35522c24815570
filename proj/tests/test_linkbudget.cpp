#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fsosim/linkbudget.hpp"

using namespace fsosim;

TEST_CASE("flat profile anchors every channel at the center OSNR", "[linkbudget]") {
    LinkConfig link;
    link.tilt_db_per_thz = 0.0;
    const auto profile = mean_osnr_profile(link, build_default_plan());
    REQUIRE(profile.osnr_db.size() == 54);
    for (const auto& [slot, osnr] : profile.osnr_db) CHECK(osnr == Catch::Approx(20.89));
    CHECK(profile.ref_slot == 26);
    CHECK(profile.reference_bandwidth_ghz == 12.5);
}

TEST_CASE("tilt arithmetic against a hand-computed channel", "[linkbudget]") {
    LinkConfig link;  // tilt -1 dB/THz
    const auto profile = mean_osnr_profile(link, build_default_plan());
    // 194.75 THz sits 1.35 THz above the 193.40 THz reference
    CHECK(profile.at(53) == Catch::Approx(20.89 - 1.35));
    CHECK(profile.at(26) == Catch::Approx(20.89));
    // negative tilt: high-frequency edge below low-frequency edge
    CHECK(profile.at(53) < profile.at(0));
}

TEST_CASE("per-slot calibration offsets apply after the tilt", "[linkbudget]") {
    std::istringstream csv("slot,osnr_offset_db\n10,-0.7\n53,0.3\n");
    const auto offsets = load_osnr_offsets(csv);
    LinkConfig link;
    const auto base = mean_osnr_profile(link, build_default_plan());
    const auto adjusted = mean_osnr_profile(link, build_default_plan(), offsets);
    CHECK(adjusted.at(10) == Catch::Approx(base.at(10) - 0.7));
    CHECK(adjusted.at(53) == Catch::Approx(base.at(53) + 0.3));
    CHECK(adjusted.at(20) == base.at(20));
}

TEST_CASE("back-to-back calibration shifts uniformly and idempotently", "[linkbudget]") {
    LinkConfig link;
    link.center_osnr_db = 25.0;
    const auto profile = mean_osnr_profile(link, build_default_plan());

    const auto calibrated = calibrate_back_to_back(profile, 20.89);
    CHECK(calibrated.at(calibrated.ref_slot) == Catch::Approx(20.89));

    // pairwise differences unchanged
    for (const auto& [slot, osnr] : profile.osnr_db)
        CHECK(calibrated.at(slot) - calibrated.at(0) == Catch::Approx(osnr - profile.at(0)));

    const auto again = calibrate_back_to_back(calibrated, 20.89);
    for (const auto& [slot, osnr] : calibrated.osnr_db) CHECK(again.at(slot) == Catch::Approx(osnr));
}

TEST_CASE("instantaneous OSNR follows received power dB-for-dB", "[linkbudget]") {
    CHECK(instantaneous_osnr(20.89, 1.0, 12.0) == 20.89);
    CHECK(*instantaneous_osnr(20.89, 0.1, 12.0) == Catch::Approx(10.89));
    // a 20 dB fade exceeds the 12 dB lock threshold
    CHECK_FALSE(instantaneous_osnr(20.89, 0.01, 12.0).has_value());
    // intensity above the mean raises the OSNR
    CHECK(*instantaneous_osnr(20.0, 2.0, 12.0) > 20.0);
    CHECK_THROWS_AS(instantaneous_osnr(20.0, -0.5, 12.0), std::invalid_argument);
    CHECK_FALSE(instantaneous_osnr(20.0, 0.0, 12.0).has_value());
}

TEST_CASE("instantaneous OSNR is monotone in intensity on the locked domain", "[linkbudget]") {
    double prev = -1e9;
    for (double intensity = 0.07; intensity < 3.0; intensity += 0.01) {
        const auto osnr = instantaneous_osnr(20.89, intensity, 12.0);
        REQUIRE(osnr.has_value());
        REQUIRE(*osnr > prev);
        prev = *osnr;
    }
}

TEST_CASE("offset file validation", "[linkbudget]") {
    std::istringstream bad_header("slot,offset\n1,0.5\n");
    CHECK_THROWS_AS(load_osnr_offsets(bad_header), std::invalid_argument);
    std::istringstream bad_row("slot,osnr_offset_db\n1\n");
    CHECK_THROWS_AS(load_osnr_offsets(bad_row), std::invalid_argument);
}
