#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ges/early_stop.hpp"

namespace ges {

struct HyperAxis {
    std::string name;
    std::vector<nlohmann::json> values;
};

/// Hyper-parameter space: the grid is the cartesian product of the axes,
/// enumerated lexicographically with the last axis varying fastest.
struct HyperSpace {
    std::vector<HyperAxis> axes;

    std::size_t size() const;
    void validate() const;

    /// File format: {"axes": [{"name": ..., "values": [...]}, ...]}.
    static HyperSpace from_json(const nlohmann::json& doc);
    static HyperSpace load(const std::string& path);
};

struct GridPoint {
    std::size_t index = 0; // 0-based enumeration position
    std::vector<std::pair<std::string, nlohmann::json>> params;

    std::optional<nlohmann::json> param(const std::string& name) const;
    std::string to_string() const; // "a=1;b=x"
};

std::vector<GridPoint> enumerate_grid(const HyperSpace& space);

/// Builds the per-epoch feed for one grid point. May throw; the failure is
/// recorded against the point and the search proceeds.
using Trainer = std::function<EpochSource(const GridPoint&)>;

enum class StopReason { FoundWinner, Exhausted };

struct EvaluatedPoint {
    GridPoint point;
    std::optional<MonitorReport> report; // empty when the trainer failed
    std::string error;
};

struct SearchOutcome {
    std::vector<EvaluatedPoint> evaluated; // always a prefix of the enumeration
    std::optional<GridPoint> winner;
    StopReason stop_reason = StopReason::Exhausted;
};

/// Evaluates grid points in enumeration order under the early-stopping
/// monitor and ceases as soon as one point's training stops; remaining
/// points are never started.
SearchOutcome search(const HyperSpace& space, const Trainer& trainer, const GEConfig& ge_cfg,
                     const AreaOfHit& area, const PersistenceConfig& cfg, int patience);

/// Writes `search.csv` plus one `point_<n>/` monitor run directory per
/// evaluated point under `run_dir`.
void write_search_run(const std::string& run_dir, const SearchOutcome& outcome);

} // namespace ges
