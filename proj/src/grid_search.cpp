#include "ges/grid_search.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ges {

std::size_t HyperSpace::size() const {
    std::size_t n = 1;
    for (const auto& axis : axes) n *= axis.values.size();
    return axes.empty() ? 0 : n;
}

void HyperSpace::validate() const {
    if (axes.empty())
        throw std::invalid_argument("hyper space: no axes");
    for (const auto& axis : axes) {
        if (axis.name.empty())
            throw std::invalid_argument("hyper space: axis with empty name");
        if (axis.values.empty())
            throw std::invalid_argument("hyper space: axis '" + axis.name + "' has no values");
    }
}

HyperSpace HyperSpace::from_json(const nlohmann::json& doc) {
    HyperSpace space;
    try {
        for (const auto& axis : doc.at("axes")) {
            HyperAxis out;
            out.name = axis.at("name").get<std::string>();
            for (const auto& value : axis.at("values")) out.values.push_back(value);
            space.axes.push_back(std::move(out));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("hyper space: malformed JSON: ") + e.what());
    }
    space.validate();
    return space;
}

HyperSpace HyperSpace::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("hyper space: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("hyper space: " + path + " is not valid JSON: " + e.what());
    }
    return from_json(doc);
}

std::optional<nlohmann::json> GridPoint::param(const std::string& name) const {
    for (const auto& [key, value] : params)
        if (key == name) return value;
    return std::nullopt;
}

std::string GridPoint::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out << ';';
        out << params[i].first << '=';
        const nlohmann::json& v = params[i].second;
        if (v.is_string())
            out << v.get<std::string>();
        else
            out << v.dump();
    }
    return out.str();
}

std::vector<GridPoint> enumerate_grid(const HyperSpace& space) {
    space.validate();
    std::vector<GridPoint> points;
    points.reserve(space.size());
    std::vector<std::size_t> odometer(space.axes.size(), 0);
    for (std::size_t index = 0; index < space.size(); ++index) {
        GridPoint point{index, {}};
        for (std::size_t a = 0; a < space.axes.size(); ++a)
            point.params.emplace_back(space.axes[a].name, space.axes[a].values[odometer[a]]);
        points.push_back(std::move(point));
        for (std::size_t a = space.axes.size(); a-- > 0;) { // last axis fastest
            if (++odometer[a] < space.axes[a].values.size()) break;
            odometer[a] = 0;
        }
    }
    return points;
}

SearchOutcome search(const HyperSpace& space, const Trainer& trainer, const GEConfig& ge_cfg,
                     const AreaOfHit& area, const PersistenceConfig& cfg, int patience) {
    SearchOutcome outcome;
    for (const GridPoint& point : enumerate_grid(space)) {
        EvaluatedPoint evaluated{point, std::nullopt, {}};
        try {
            EpochSource source = trainer(point);
            evaluated.report = monitor_training(source, ge_cfg, area, cfg, patience);
        } catch (const std::exception& e) {
            evaluated.error = e.what();
        }
        const bool stopped = evaluated.report && evaluated.report->stopped_at.has_value();
        outcome.evaluated.push_back(std::move(evaluated));
        if (stopped) {
            outcome.winner = point;
            outcome.stop_reason = StopReason::FoundWinner;
            return outcome;
        }
    }
    outcome.stop_reason = StopReason::Exhausted;
    return outcome;
}

void write_search_run(const std::string& run_dir, const SearchOutcome& outcome) {
    namespace fs = std::filesystem;
    fs::create_directories(run_dir);
    std::ofstream csv(fs::path(run_dir) / "search.csv");
    if (!csv)
        throw std::runtime_error("search: cannot write " + (fs::path(run_dir) / "search.csv").string());
    csv << "point_index,params,stopped_at,hit_epochs\n";
    for (const EvaluatedPoint& ev : outcome.evaluated) {
        csv << (ev.point.index + 1) << ',' << ev.point.to_string() << ',';
        if (ev.report && ev.report->stopped_at) csv << *ev.report->stopped_at;
        csv << ',';
        if (ev.report) {
            bool first = true;
            for (const EpochRecord& rec : ev.report->state.epoch_log) {
                if (!rec.hit) continue;
                if (!first) csv << ';';
                csv << rec.epoch;
                first = false;
            }
        }
        csv << '\n';

        const fs::path point_dir = fs::path(run_dir) / ("point_" + std::to_string(ev.point.index + 1));
        if (ev.report) {
            write_monitor_run(point_dir.string(), *ev.report);
        } else {
            fs::create_directories(point_dir);
            std::ofstream err(point_dir / "error.txt");
            err << ev.error << '\n';
        }
    }
}

} // namespace ges
