#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "ges/ge.hpp"
#include "ges/sbox.hpp"
#include "ges/sim.hpp"

using namespace ges;

TEST_CASE("zero signal and zero noise produce exactly uniform predictions") {
    const auto schedule = flat_schedule(2, 0.0, 0.0, 9);
    const auto batch = generate_epoch(schedule, 0, 5, 256, 0);
    for (std::size_t i = 0; i < 5; ++i)
        for (int l = 0; l < 256; ++l) CHECK(batch.attack.predictions(i, l) == 1.0f / 256);
    CHECK_NOTHROW(batch.attack.validate());
}

TEST_CASE("a dominant signal yields GE zero from the first checkpoint") {
    const auto schedule = flat_schedule(1, 50.0, 0.0, 3);
    const auto batch = generate_epoch(schedule, 0, 30, 256, 0x5A);
    const GECurve curve = ge_curve_optimized(batch.attack, {2, 30, 10, 1});
    for (double v : curve.values) CHECK(v == 0.0);
    const int true_label = hypothesis_label(batch.attack.plaintexts[0], 0x5A, 256);
    CHECK(batch.attack.predictions(0, true_label) > 0.999f);
}

TEST_CASE("epoch generation is bit-deterministic and epoch-sensitive") {
    const auto schedule = ramp_schedule(4, 2.0, 1.0, 77);
    const auto a = generate_epoch(schedule, 2, 40, 16, 3);
    const auto b = generate_epoch(schedule, 2, 40, 16, 3);
    CHECK(a.attack.predictions == b.attack.predictions);
    CHECK(a.attack.plaintexts == b.attack.plaintexts);

    const auto c = generate_epoch(schedule, 3, 40, 16, 3);
    CHECK(a.attack.predictions != c.attack.predictions);
    // Plaintexts belong to the run, not the epoch.
    CHECK(a.attack.plaintexts == c.attack.plaintexts);
}

TEST_CASE("noisy epochs still produce valid prediction distributions") {
    const auto schedule = flat_schedule(1, 0.7, 2.5, 5);
    const auto batch = generate_epoch(schedule, 0, 100, 256, 17);
    CHECK_NOTHROW(batch.attack.validate());
}

TEST_CASE("generate_epoch rejects bad arguments") {
    const auto schedule = flat_schedule(2, 1.0, 1.0, 0);
    CHECK_THROWS_AS(generate_epoch(schedule, 2, 10, 16, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_epoch(schedule, 0, 10, 100, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_epoch(schedule, 0, 10, 16, 16), std::invalid_argument);
    CHECK_THROWS_AS(generate_epoch(schedule, 0, 0, 16, 0), std::invalid_argument);
}

TEST_CASE("larger signal gives lower or equal median GE") {
    const int n_seeds = 20;
    auto median_ge = [&](double theta) {
        std::vector<double> finals;
        for (int s = 0; s < n_seeds; ++s) {
            const auto schedule = flat_schedule(1, theta, 1.0, 1000 + s);
            const auto batch = generate_epoch(schedule, 0, 150, 16, 4);
            const GECurve curve = ge_curve_optimized(batch.attack, {3, 150, 50, std::uint64_t(2000 + s)});
            finals.push_back(curve.values.back());
        }
        std::sort(finals.begin(), finals.end());
        return finals[n_seeds / 2];
    };
    const double weak = median_ge(0.1);
    const double strong = median_ge(1.2);
    CHECK(strong <= weak);
}

TEST_CASE("overfit schedule ramps, holds, then decays") {
    const auto schedule = overfit_schedule(50, 10, 3.5, 10, 1.0, 0);
    REQUIRE(schedule.signal.size() == 50);
    CHECK(schedule.signal[0] == 0.0);
    for (int e = 10; e <= 20; ++e) CHECK(schedule.signal[e] == 3.5);
    CHECK(schedule.signal[9] < 3.5);
    CHECK(schedule.signal[21] < 3.5);
    CHECK(schedule.signal[49] == 0.0);

    // Unimodal: non-decreasing, then non-increasing.
    int direction_changes = 0;
    for (int e = 1; e < 50; ++e) {
        if (schedule.signal[e] < schedule.signal[e - 1]) {
            direction_changes = 1;
        } else if (schedule.signal[e] > schedule.signal[e - 1]) {
            CHECK(direction_changes == 0);
        }
    }
    CHECK_NOTHROW(schedule.validate());
}

TEST_CASE("overfit schedule with the plateau reaching the end never decays") {
    const auto schedule = overfit_schedule(12, 4, 2.0, 20, 0.5, 0);
    for (int e = 4; e < 12; ++e) CHECK(schedule.signal[e] == 2.0);
}

TEST_CASE("overfit schedule validates its shape parameters") {
    CHECK_THROWS_AS(overfit_schedule(10, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(overfit_schedule(10, 10, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(overfit_schedule(10, 5, -1.0), std::invalid_argument);
}

TEST_CASE("ramp and flat schedules have the advertised ends") {
    const auto ramp = ramp_schedule(5, 2.0, 1.0, 0);
    CHECK(ramp.signal.front() == 0.0);
    CHECK(ramp.signal.back() == 2.0);
    const auto flat = flat_schedule(3, 0.7, 1.0, 0);
    CHECK(flat.signal == std::vector<double>{0.7, 0.7, 0.7});
}

TEST_CASE("presets exist and unknown names are rejected") {
    CHECK(preset_schedule("overfit", 1).n_epochs == 50);
    CHECK(preset_schedule("ramp", 1).n_epochs == 40);
    CHECK(preset_schedule("flat", 1).n_epochs == 20);
    CHECK_THROWS_AS(preset_schedule("bogus", 1), std::invalid_argument);
}

TEST_CASE("moderate 256-way signal converges into single digits by 2000 traces") {
    // Frozen from a one-off sweep: theta 0.4 under unit noise is enough for
    // the median final GE to drop to 5 or below at 2000 traces.
    std::vector<double> finals;
    for (int s = 0; s < 10; ++s) {
        const auto schedule = flat_schedule(1, 0.4, 1.0, 4000 + s);
        const auto batch = generate_epoch(schedule, 0, 2000, 256, 111);
        const GECurve curve = ge_curve_optimized(batch.attack, {2, 2000, 500, std::uint64_t(6000 + s)});
        CHECK(curve.values.back() <= curve.values.front());
        finals.push_back(curve.values.back());
    }
    std::sort(finals.begin(), finals.end());
    CHECK(finals[5] <= 5.0);
}

TEST_CASE("schedules round-trip through their JSON file format") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "ges_sched_test.json";
    const auto schedule = overfit_schedule(12, 3, 1.5, 2, 0.8, 99);
    save_schedule(path.string(), schedule);
    const auto loaded = load_schedule(path.string());
    CHECK(loaded.n_epochs == schedule.n_epochs);
    CHECK(loaded.signal == schedule.signal);
    CHECK(loaded.noise_sigma == schedule.noise_sigma);
    CHECK(loaded.seed == schedule.seed);
    fs::remove(path);

    CHECK_THROWS_AS(load_schedule("/nonexistent/schedule.json"), std::runtime_error);
}

TEST_CASE("epoch source maps monitor epochs onto schedule entries") {
    const auto schedule = flat_schedule(3, 1.0, 0.5, 8);
    const auto source = make_epoch_source(schedule, 20, 16, 2);
    const auto first = source(1);
    REQUIRE(first.has_value());
    const auto direct = generate_epoch(schedule, 0, 20, 16, 2);
    CHECK(first->predictions == direct.attack.predictions);
    CHECK(source(3).has_value());
    CHECK(!source(4).has_value());
    CHECK(!source(0).has_value());
}
