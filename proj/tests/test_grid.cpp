#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ges/grid_search.hpp"
#include "ges/sim.hpp"

using namespace ges;

namespace {

HyperSpace two_by_two() {
    return HyperSpace{{{"a", {1, 2}}, {"b", {"x", "y"}}}};
}

/// Trainer whose hit behaviour is driven by a "theta" axis: strong signal
/// epochs hit the zero-GE area, zero signal never does.
Trainer theta_trainer(int n_epochs) {
    return [n_epochs](const GridPoint& point) -> EpochSource {
        const auto theta = point.param("theta");
        if (!theta) throw std::invalid_argument("no theta axis");
        const auto schedule =
            flat_schedule(n_epochs, theta->get<double>(), 0.5, 40 + point.index);
        return make_epoch_source(schedule, 60, 16, 7);
    };
}

const GEConfig kGeConfig{2, 60, 20, 9};
const AreaOfHit kArea{0.0, 20, 60};
const PersistenceConfig kGreedyFull{PersistenceMode::Full, 1.0, StopCase::Greedy};

} // namespace

TEST_CASE("four axes of two values enumerate sixteen points") {
    const HyperSpace space{{{"a", {1, 2}}, {"b", {1, 2}}, {"c", {1, 2}}, {"d", {1, 2}}}};
    CHECK(space.size() == 16);
    CHECK(enumerate_grid(space).size() == 16);
}

TEST_CASE("a single one-value axis enumerates one point") {
    const HyperSpace space{{{"only", {42}}}};
    const auto points = enumerate_grid(space);
    REQUIRE(points.size() == 1);
    CHECK(points[0].to_string() == "only=42");
}

TEST_CASE("enumeration is lexicographic with the last axis fastest") {
    const auto points = enumerate_grid(two_by_two());
    REQUIRE(points.size() == 4);
    CHECK(points[0].to_string() == "a=1;b=x");
    CHECK(points[1].to_string() == "a=1;b=y");
    CHECK(points[2].to_string() == "a=2;b=x");
    CHECK(points[3].to_string() == "a=2;b=y");
    for (std::size_t i = 0; i < 4; ++i) CHECK(points[i].index == i);
}

TEST_CASE("spaces validate axes") {
    CHECK_THROWS_AS((HyperSpace{}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((HyperSpace{{{"a", {}}}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((HyperSpace{{{"", {1}}}}).validate(), std::invalid_argument);
}

TEST_CASE("spaces load from the axes JSON format") {
    const auto doc = nlohmann::json::parse(R"({"axes": [
        {"name": "theta", "values": [0.5, 2.0]},
        {"name": "label", "values": ["p", "q"]}]})");
    const HyperSpace space = HyperSpace::from_json(doc);
    REQUIRE(space.axes.size() == 2);
    CHECK(space.axes[0].name == "theta");
    CHECK(space.size() == 4);
    CHECK_THROWS_AS(HyperSpace::from_json(nlohmann::json::parse("{}")), std::invalid_argument);
    CHECK_THROWS_AS(HyperSpace::load("/nonexistent/space.json"), std::runtime_error);
}

TEST_CASE("search stops at the first winning point") {
    const HyperSpace space{{{"theta", {9.0, 9.0, 9.0, 9.0}}}};
    const auto outcome = search(space, theta_trainer(5), kGeConfig, kArea, kGreedyFull, 2);
    CHECK(outcome.stop_reason == StopReason::FoundWinner);
    REQUIRE(outcome.evaluated.size() == 1);
    REQUIRE(outcome.winner.has_value());
    CHECK(outcome.winner->index == 0);
    REQUIRE(outcome.evaluated[0].report.has_value());
    CHECK(outcome.evaluated[0].report->stopped_at == 2);
}

TEST_CASE("search exhausts a space with no winner") {
    const HyperSpace space{{{"theta", {0.0, 0.0}}, {"ignored", {1, 2}}}};
    const auto outcome = search(space, theta_trainer(3), kGeConfig, kArea, kGreedyFull, 2);
    CHECK(outcome.stop_reason == StopReason::Exhausted);
    CHECK(!outcome.winner.has_value());
    CHECK(outcome.evaluated.size() == 4);
    for (const auto& ev : outcome.evaluated) {
        REQUIRE(ev.report.has_value());
        CHECK(!ev.report->stopped_at.has_value());
    }
}

TEST_CASE("search evaluates exactly up to the first winner") {
    const HyperSpace space{{{"theta", {0.0, 0.0, 0.0, 9.0, 9.0}}}};
    const auto outcome = search(space, theta_trainer(4), kGeConfig, kArea, kGreedyFull, 2);
    CHECK(outcome.stop_reason == StopReason::FoundWinner);
    CHECK(outcome.evaluated.size() == 4);
    REQUIRE(outcome.winner.has_value());
    CHECK(outcome.winner->index == 3);
    CHECK(outcome.evaluated.back().report->stopped_at.has_value());
}

TEST_CASE("evaluated points form a prefix of the enumeration") {
    const HyperSpace space{{{"theta", {0.0, 9.0}}, {"tag", {"u", "v"}}}};
    const auto points = enumerate_grid(space);
    const auto outcome = search(space, theta_trainer(4), kGeConfig, kArea, kGreedyFull, 2);
    REQUIRE(outcome.evaluated.size() <= points.size());
    for (std::size_t i = 0; i < outcome.evaluated.size(); ++i)
        CHECK(outcome.evaluated[i].point.to_string() == points[i].to_string());
}

TEST_CASE("a failing trainer is recorded and the search continues") {
    const HyperSpace space{{{"theta", {-1.0, 9.0}}}};
    const Trainer trainer = [](const GridPoint& point) -> EpochSource {
        const double theta = point.param("theta")->get<double>();
        if (theta < 0) throw std::runtime_error("negative signal");
        return make_epoch_source(flat_schedule(4, theta, 0.5, 1), 60, 16, 7);
    };
    const auto outcome = search(space, trainer, kGeConfig, kArea, kGreedyFull, 2);
    CHECK(outcome.stop_reason == StopReason::FoundWinner);
    REQUIRE(outcome.evaluated.size() == 2);
    CHECK(!outcome.evaluated[0].report.has_value());
    CHECK(outcome.evaluated[0].error == "negative signal");
    CHECK(outcome.winner->index == 1);
}

TEST_CASE("searches with equal seeds are identical") {
    const HyperSpace space{{{"theta", {0.0, 6.0, 9.0}}}};
    const auto a = search(space, theta_trainer(4), kGeConfig, kArea, kGreedyFull, 2);
    const auto b = search(space, theta_trainer(4), kGeConfig, kArea, kGreedyFull, 2);
    CHECK(a.stop_reason == b.stop_reason);
    CHECK(a.evaluated.size() == b.evaluated.size());
    for (std::size_t i = 0; i < a.evaluated.size(); ++i) {
        CHECK(a.evaluated[i].report.has_value() == b.evaluated[i].report.has_value());
        if (a.evaluated[i].report)
            CHECK(a.evaluated[i].report->stopped_at == b.evaluated[i].report->stopped_at);
    }
}

TEST_CASE("search run directory holds search.csv and per-point runs") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ges_search_test";
    fs::remove_all(dir);

    const HyperSpace space{{{"theta", {0.0, 9.0}}}};
    const auto outcome = search(space, theta_trainer(3), kGeConfig, kArea, kGreedyFull, 2);
    write_search_run(dir.string(), outcome);

    CHECK(fs::exists(dir / "search.csv"));
    CHECK(fs::exists(dir / "point_1" / "monitor.csv"));
    CHECK(fs::exists(dir / "point_2" / "monitor.csv"));
    CHECK(fs::exists(dir / "point_2" / "1" / "ge.csv"));

    std::ifstream csv(dir / "search.csv");
    std::string header, row1, row2;
    std::getline(csv, header);
    std::getline(csv, row1);
    std::getline(csv, row2);
    CHECK(header == "point_index,params,stopped_at,hit_epochs");
    CHECK(row1 == "1,theta=0.0,,");
    CHECK(row2 == "2,theta=9.0,2,1;2");
    fs::remove_all(dir);
}
