#include "ges/early_stop.hpp"

#include "ges/rng.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ges {

namespace {

/// Integer hit counts are compared against fraction * window with this slack
/// so an exact boundary like 19/20 vs 0.95 is not lost to binary rounding of
/// the fraction.
constexpr double kFractionSlack = 1e-9;

bool window_persists(const GECurve& curve, std::size_t lo, std::size_t hi, double max_ge,
                     PersistenceMode mode, double fraction) {
    const std::size_t total = hi - lo;
    std::size_t inside = 0;
    for (std::size_t i = lo; i < hi; ++i)
        if (curve.values[i] <= max_ge) ++inside;
    if (mode == PersistenceMode::Full) return inside == total;
    return static_cast<double>(inside) + kFractionSlack >= fraction * static_cast<double>(total);
}

/// Smallest checkpoint index in [lo, hi) from which the suffix persists;
/// Binary mode additionally demands the entry checkpoint itself sit inside.
std::optional<std::size_t> entry_index(const GECurve& curve, std::size_t lo, std::size_t hi,
                                       double max_ge, PersistenceMode mode, double fraction) {
    std::size_t inside_suffix = 0;
    std::optional<std::size_t> best;
    for (std::size_t i = hi; i-- > lo;) {
        const bool in_area = curve.values[i] <= max_ge;
        if (in_area) ++inside_suffix;
        const std::size_t total = hi - i;
        bool ok;
        if (mode == PersistenceMode::Full)
            ok = inside_suffix == total;
        else
            ok = in_area &&
                 static_cast<double>(inside_suffix) + kFractionSlack >= fraction * static_cast<double>(total);
        if (ok) best = i;
        if (mode == PersistenceMode::Full && !ok) break; // suffix can only get worse leftwards
    }
    return best;
}

void check_curve(const GECurve& curve) {
    if (curve.checkpoints.empty())
        throw std::invalid_argument("persistence: empty GE curve");
    if (curve.checkpoints.size() != curve.values.size())
        throw std::invalid_argument("persistence: curve checkpoint/value length mismatch");
}

} // namespace

void AreaOfHit::validate() const {
    if (max_ge < 0.0)
        throw std::invalid_argument("area of hit: max_ge must be >= 0");
    if (max_traces < 1)
        throw std::invalid_argument("area of hit: max_traces must be >= 1");
    if (min_traces && (*min_traces <= 0 || *min_traces > max_traces))
        throw std::invalid_argument("area of hit: min_traces must lie in (0, max_traces]");
}

void PersistenceConfig::validate() const {
    if (mode == PersistenceMode::Binary && !(binary_fraction > 0.0 && binary_fraction <= 1.0))
        throw std::invalid_argument("persistence: binary fraction must lie in (0, 1]");
}

std::optional<int> compute_v_soft(const GECurve& curve, double max_ge, PersistenceMode mode,
                                  double binary_fraction) {
    check_curve(curve);
    const auto idx = entry_index(curve, 0, curve.checkpoints.size(), max_ge, mode, binary_fraction);
    if (!idx) return std::nullopt;
    return curve.checkpoints[*idx];
}

HitResult persistence_hit(const GECurve& curve, const AreaOfHit& area, const PersistenceConfig& cfg) {
    check_curve(curve);
    area.validate();
    cfg.validate();
    if (area.max_traces > curve.checkpoints.back())
        throw std::invalid_argument("persistence: area extends to " + std::to_string(area.max_traces) +
                                    " traces but the curve ends at " +
                                    std::to_string(curve.checkpoints.back()));

    // Checkpoint window covered by the area.
    std::size_t hi = 0;
    while (hi < curve.checkpoints.size() && curve.checkpoints[hi] <= area.max_traces) ++hi;

    if (cfg.stop_case == StopCase::Greedy) {
        if (!area.min_traces)
            throw std::invalid_argument("persistence: greedy case needs a fixed min_traces bound");
        std::size_t lo = 0;
        while (lo < hi && curve.checkpoints[lo] < *area.min_traces) ++lo;
        if (lo >= hi)
            throw std::invalid_argument("persistence: no curve checkpoints inside [" +
                                        std::to_string(*area.min_traces) + ", " +
                                        std::to_string(area.max_traces) + "]");
        const bool hit = window_persists(curve, lo, hi, area.max_ge, cfg.mode, cfg.binary_fraction);
        return {hit, area.min_traces};
    }

    if (hi == 0)
        throw std::invalid_argument("persistence: area ends before the first curve checkpoint");
    const auto idx = entry_index(curve, 0, hi, area.max_ge, cfg.mode, cfg.binary_fraction);
    if (!idx) return {false, std::nullopt};
    return {true, curve.checkpoints[*idx]};
}

MonitorState::MonitorState(int patience_epochs) : patience(patience_epochs) {
    if (patience_epochs < 1)
        throw std::invalid_argument("monitor: patience must be >= 1");
}

EpochDecision observe_epoch(MonitorState& state, const GECurve& curve, const AreaOfHit& area,
                            const PersistenceConfig& cfg) {
    if (state.stopped_at)
        throw std::logic_error("monitor: observe_epoch called after the stop decision");
    const HitResult result = persistence_hit(curve, area, cfg);
    const int epoch = static_cast<int>(state.epoch_log.size()) + 1;
    state.consecutive_hits = result.hit ? state.consecutive_hits + 1 : 0;
    state.epoch_log.push_back({epoch, result.hit, result.v_used, state.consecutive_hits});
    if (state.consecutive_hits >= state.patience) {
        state.stopped_at = epoch;
        return {true, epoch};
    }
    return {false, epoch};
}

GEConfig monitor_epoch_config(const GEConfig& base, int epoch) {
    GEConfig cfg = base;
    cfg.seed = derive_seed(base.seed, "monitor.epoch", static_cast<std::uint64_t>(epoch));
    return cfg;
}

MonitorReport monitor_training(const EpochSource& source, const GEConfig& ge_cfg,
                               const AreaOfHit& area, const PersistenceConfig& cfg, int patience) {
    area.validate();
    cfg.validate();
    if (area.max_traces > ge_cfg.max_traces)
        throw std::invalid_argument("monitor: area of hit reaches " + std::to_string(area.max_traces) +
                                    " traces but curves stop at " + std::to_string(ge_cfg.max_traces));

    MonitorReport report{{}, MonitorState(patience), std::nullopt};
    for (int epoch = 1;; ++epoch) {
        std::optional<AttackSet> attack = source(epoch);
        if (!attack) break;
        report.curves.push_back(ge_curve_optimized(*attack, monitor_epoch_config(ge_cfg, epoch)));
        const EpochDecision decision = observe_epoch(report.state, report.curves.back(), area, cfg);
        if (decision.stop) {
            report.stopped_at = decision.epoch;
            break;
        }
    }
    return report;
}

void write_monitor_run(const std::string& run_dir, const MonitorReport& report) {
    namespace fs = std::filesystem;
    fs::create_directories(run_dir);
    std::ofstream monitor(fs::path(run_dir) / "monitor.csv");
    if (!monitor)
        throw std::runtime_error("monitor: cannot write " + (fs::path(run_dir) / "monitor.csv").string());
    monitor << "epoch,hit,v,consecutive_hits,stopped\n";
    for (const EpochRecord& rec : report.state.epoch_log) {
        monitor << rec.epoch << ',' << (rec.hit ? 1 : 0) << ',';
        if (rec.v_used) monitor << *rec.v_used;
        monitor << ',' << rec.consecutive_hits << ','
                << (report.stopped_at && *report.stopped_at == rec.epoch ? 1 : 0) << '\n';
    }
    for (std::size_t i = 0; i < report.curves.size(); ++i) {
        const fs::path epoch_dir = fs::path(run_dir) / std::to_string(i + 1);
        fs::create_directories(epoch_dir);
        std::ofstream ge(epoch_dir / "ge.csv");
        if (!ge)
            throw std::runtime_error("monitor: cannot write " + (epoch_dir / "ge.csv").string());
        write_curve_csv(ge, report.curves[i]);
    }
}

} // namespace ges
