#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ges/attack_io.hpp"
#include "ges/early_stop.hpp"
#include "ges/rng.hpp"
#include "ges/sim.hpp"

using namespace ges;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("attack sets round-trip bit-exactly through the binary format") {
    TempDir dir("ges_io_roundtrip");
    const auto batch = generate_epoch(flat_schedule(1, 0.8, 1.3, 6), 0, 25, 16, 11);
    save_attack_set(dir.path.string(), batch.attack);

    CHECK(fs::exists(dir.path / "attack.json"));
    CHECK(fs::exists(dir.path / "predictions.f32"));
    CHECK(fs::exists(dir.path / "plaintexts.u8"));
    CHECK(fs::file_size(dir.path / "predictions.f32") == 25 * 16 * 4);
    CHECK(fs::file_size(dir.path / "plaintexts.u8") == 25);

    for (const std::string path : {dir.path.string(), (dir.path / "attack.json").string()}) {
        const AttackSet loaded = load_attack_set(path);
        CHECK(loaded.predictions == batch.attack.predictions);
        CHECK(loaded.plaintexts == batch.attack.plaintexts);
        CHECK(loaded.true_key == batch.attack.true_key);
        CHECK(loaded.keyspace == batch.attack.keyspace);
    }
}

TEST_CASE("loader failures name the offending path") {
    TempDir dir("ges_io_errors");
    CHECK_THROWS_WITH_AS(load_attack_set((dir.path / "missing").string()),
                         doctest::Contains("missing"), std::runtime_error);

    const auto batch = generate_epoch(flat_schedule(1, 0.5, 1.0, 2), 0, 10, 16, 0);
    save_attack_set(dir.path.string(), batch.attack);

    SUBCASE("truncated predictions") {
        fs::resize_file(dir.path / "predictions.f32", 10 * 16 * 4 - 4);
        CHECK_THROWS_WITH_AS(load_attack_set(dir.path.string()),
                             doctest::Contains("predictions.f32"), std::runtime_error);
    }
    SUBCASE("oversized plaintexts") {
        std::ofstream(dir.path / "plaintexts.u8", std::ios::binary | std::ios::app) << "zz";
        CHECK_THROWS_WITH_AS(load_attack_set(dir.path.string()),
                             doctest::Contains("plaintexts.u8"), std::runtime_error);
    }
    SUBCASE("corrupt header") {
        std::ofstream(dir.path / "attack.json") << "{not json";
        CHECK_THROWS_WITH_AS(load_attack_set(dir.path.string()),
                             doctest::Contains("attack.json"), std::runtime_error);
    }
    SUBCASE("missing header fields") {
        std::ofstream(dir.path / "attack.json") << R"({"n_traces": 10})";
        CHECK_THROWS_AS(load_attack_set(dir.path.string()), std::runtime_error);
    }
}

TEST_CASE("saving rejects invalid attack sets") {
    TempDir dir("ges_io_invalid");
    AttackSet attack;
    attack.keyspace = 16;
    attack.predictions = Matrix<float>(2, 16, 0.0f); // rows do not sum to 1
    attack.plaintexts = {0, 1};
    CHECK_THROWS_AS(save_attack_set(dir.path.string(), attack), std::invalid_argument);
}

TEST_CASE("monitor run directory layout and CSV content") {
    TempDir dir("ges_io_monitor");
    const auto source = make_epoch_source(flat_schedule(6, 40.0, 0.0, 1), 40, 16, 2);
    const GEConfig ge_cfg{2, 40, 20, 3};
    const AreaOfHit area{0.0, {}, 40};
    const PersistenceConfig cfg{PersistenceMode::Full, 1.0, StopCase::Soft};
    const MonitorReport report = monitor_training(source, ge_cfg, area, cfg, 3);
    REQUIRE(report.stopped_at == 3);

    const fs::path run = dir.path / "run";
    write_monitor_run(run.string(), report);
    CHECK(fs::exists(run / "monitor.csv"));
    CHECK(fs::exists(run / "1" / "ge.csv"));
    CHECK(fs::exists(run / "2" / "ge.csv"));
    CHECK(fs::exists(run / "3" / "ge.csv"));
    CHECK(!fs::exists(run / "4"));

    std::ifstream csv(run / "monitor.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "epoch,hit,v,consecutive_hits,stopped");
    std::getline(csv, line);
    CHECK(line == "1,1,20,1,0");
    std::getline(csv, line);
    CHECK(line == "2,1,20,2,0");
    std::getline(csv, line);
    CHECK(line == "3,1,20,3,1");

    std::ifstream ge(run / "1" / "ge.csv");
    std::getline(ge, line);
    CHECK(line == "n_traces,ge");
    std::getline(ge, line);
    CHECK(line == "20,0");
}
