#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fsosim/config.hpp"

using namespace fsosim;

TEST_CASE("an empty config yields the documented defaults", "[config]") {
    std::istringstream in("");
    const auto cfg = parse_config(in);
    CHECK(cfg.plan.base_freq_thz == 192.10);
    CHECK(cfg.plan.cut_even_slot == 30);
    CHECK(cfg.plan.cut_odd_slot == 29);
    CHECK(cfg.link.center_osnr_db == 20.89);
    CHECK(cfg.link.tx_power_total_dbm == 32.0);
    CHECK(cfg.link.tilt_db_per_thz == -1.0);
    CHECK(cfg.modems.fec_limit == 2.5e-2);
    CHECK(cfg.modems.penalty_dp16qam_db == kDefaultImplPenaltyDb);
    CHECK(cfg.turb.coherence_time_ms == 2.0);
    CHECK(cfg.turb.sample_interval_ms == 0.1);
    CHECK(cfg.turb.lock_loss_threshold_db == 12.0);
    CHECK(cfg.lock.lost_duration_ms == 5.0);
    CHECK(cfg.schedule_kind == ScheduleKind::Fixed);
    CHECK(cfg.mode == RunMode::Dual);
    CHECK(cfg.dwell_s == 120.0);
    CHECK(cfg.readout_per_s == 16);
    CHECK(cfg.retune_gap_s == 300.0);
    CHECK(cfg.dual_slots.even_slot == 30);
    CHECK(cfg.dual_slots.odd_slot == 29);
    CHECK(cfg.dual_formats.even == ModulationKind::DP16QAM);
    CHECK(cfg.dual_formats.odd == ModulationKind::DPQPSK);
    CHECK(cfg.seed == kDefaultSeed);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("values parse into the right fields", "[config]") {
    std::istringstream in(
        "# comment\n"
        "[link]\n"
        "center_osnr_db = 22.5\n"
        "tilt_db_per_thz = -0.4\n"
        "\n"
        "[turbulence]\n"
        "scintillation_index = 0.125\n"
        "schedule = walk\n"
        "walk_step_sigma = 0.2\n"
        "\n"
        "[campaign]\n"
        "mode = scan\n"
        "scan_steps = even:30,odd:29,even:0\n"
        "dwell_s = 10\n"
        "seed = 42\n"
        "dual_odd_format = dpqpsk\n"
        "\n"
        "[output]\n"
        "dir = results\n");
    const auto cfg = parse_config(in);
    CHECK(cfg.link.center_osnr_db == 22.5);
    CHECK(cfg.link.tilt_db_per_thz == -0.4);
    CHECK(cfg.turb.scintillation_index == 0.125);
    CHECK(cfg.schedule_kind == ScheduleKind::RandomWalk);
    CHECK(cfg.walk_step_sigma == 0.2);
    CHECK(cfg.mode == RunMode::Scan);
    REQUIRE(cfg.scan_steps.size() == 3);
    CHECK(cfg.scan_steps[0].cut == CutSelector::Even);
    CHECK(cfg.scan_steps[0].slot == 30);
    CHECK(cfg.scan_steps[1].cut == CutSelector::Odd);
    CHECK(cfg.scan_steps[2].slot == 0);
    CHECK(cfg.dwell_s == 10.0);
    CHECK(cfg.seed == 42);
    CHECK(cfg.out_dir == "results");
}

TEST_CASE("unknown keys are hard errors that name the key", "[config]") {
    std::istringstream in("[link]\ncenter_osnr = 20\n");
    try {
        parse_config(in, "test.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("link.center_osnr") != std::string::npos);
        CHECK(msg.find("test.cfg:2") != std::string::npos);
    }
}

TEST_CASE("structural errors are rejected", "[config]") {
    std::istringstream unknown_section("[links]\ncenter_osnr_db = 20\n");
    CHECK_THROWS_AS(parse_config(unknown_section), ConfigError);

    std::istringstream no_section("center_osnr_db = 20\n");
    CHECK_THROWS_AS(parse_config(no_section), ConfigError);

    std::istringstream no_equals("[link]\ncenter_osnr_db 20\n");
    CHECK_THROWS_AS(parse_config(no_equals), ConfigError);

    std::istringstream duplicate("[link]\ncenter_osnr_db = 20\ncenter_osnr_db = 21\n");
    CHECK_THROWS_AS(parse_config(duplicate), ConfigError);

    std::istringstream bad_value("[link]\ncenter_osnr_db = abc\n");
    CHECK_THROWS_AS(parse_config(bad_value), ConfigError);

    std::istringstream bad_schedule("[turbulence]\nschedule = sometimes\n");
    CHECK_THROWS_AS(parse_config(bad_schedule), ConfigError);

    std::istringstream bad_step("[campaign]\nscan_steps = mid:30\n");
    CHECK_THROWS_AS(parse_config(bad_step), ConfigError);

    std::istringstream bad_format("[campaign]\ndual_even_format = qam1024\n");
    CHECK_THROWS_AS(parse_config(bad_format), ConfigError);
}

TEST_CASE("serialize and parse round-trip the configuration", "[config]") {
    std::istringstream in(
        "[turbulence]\n"
        "scintillation_index = 0.0625\n"
        "lock_loss_threshold_db = 9\n"
        "lost_duration_ms = 3\n"
        "[campaign]\n"
        "mode = scan\n"
        "scan_steps = even:30,odd:29\n"
        "seed = 777\n");
    const auto cfg = parse_config(in);
    std::istringstream round(serialize_config(cfg));
    const auto back = parse_config(round);
    CHECK(back.turb.scintillation_index == 0.0625);
    CHECK(back.turb.lock_loss_threshold_db == 9.0);
    CHECK(back.lock.lost_duration_ms == 3.0);
    CHECK(back.mode == RunMode::Scan);
    REQUIRE(back.scan_steps.size() == 2);
    CHECK(back.scan_steps[1].slot == 29);
    CHECK(back.seed == 777);
    CHECK(serialize_config(back) == serialize_config(cfg));
}
