#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ges/attack_set.hpp"
#include "ges/ge.hpp"

namespace ges {

/// Rectangle in (traces, GE) space the curve must persist inside:
/// [min_traces, max_traces] x [0, max_ge]. min_traces is fixed up front in
/// the greedy case and left empty in the soft case, where each epoch computes
/// its own entry point.
struct AreaOfHit {
    double max_ge = 0.0;           // the w line: highest acceptable GE value
    std::optional<int> min_traces; // the v bound: traces from which convergence is demanded
    int max_traces = 0;            // right edge of the area

    void validate() const;
};

enum class PersistenceMode {
    Full,  // every checkpoint in the window must sit inside the area
    Binary // a configured fraction of window checkpoints suffices
};

enum class StopCase {
    Soft,  // v is computed per epoch from where the curve enters the area
    Greedy // v is fixed in advance (area.min_traces)
};

struct PersistenceConfig {
    PersistenceMode mode = PersistenceMode::Full;
    double binary_fraction = 1.0; // required in-area share of window checkpoints, Binary mode
    StopCase stop_case = StopCase::Soft;

    void validate() const; // Binary fraction must lie in (0, 1]
};

/// Smallest checkpoint t such that the curve stays inside the area on
/// [t, last checkpoint]: in Full mode every value past t must be <= max_ge;
/// in Binary mode at least `binary_fraction` of them, and the value at t
/// itself, must be. Empty when no such checkpoint exists.
std::optional<int> compute_v_soft(const GECurve& curve, double max_ge, PersistenceMode mode,
                                  double binary_fraction = 1.0);

struct HitResult {
    bool hit = false;
    std::optional<int> v_used;
};

/// Per-epoch persistence check of a GE curve against the area of hit.
/// Soft case: a hit is any entry point found by compute_v_soft within
/// [first checkpoint, max_traces]. Greedy case: the persistence condition
/// must hold on the fixed window [min_traces, max_traces].
HitResult persistence_hit(const GECurve& curve, const AreaOfHit& area, const PersistenceConfig& cfg);

struct EpochRecord {
    int epoch = 0; // 1-based
    bool hit = false;
    std::optional<int> v_used;
    int consecutive_hits = 0;
};

/// Patience counter over epochs. Epochs are numbered from 1 in observation
/// order; a miss resets the consecutive-hit count.
struct MonitorState {
    int patience = 1;
    int consecutive_hits = 0;
    std::vector<EpochRecord> epoch_log;
    std::optional<int> stopped_at;

    explicit MonitorState(int patience_epochs);
};

struct EpochDecision {
    bool stop = false;
    int epoch = 0;
};

/// Feeds one epoch's curve into the state machine. Returns Stop at the first
/// epoch where the consecutive-hit count reaches the patience. Observing
/// after a stop is a usage error (std::logic_error).
EpochDecision observe_epoch(MonitorState& state, const GECurve& curve, const AreaOfHit& area,
                            const PersistenceConfig& cfg);

/// Yields the attack set for a (1-based) epoch, or nothing when the training
/// run is exhausted.
using EpochSource = std::function<std::optional<AttackSet>(int epoch)>;

struct MonitorReport {
    std::vector<GECurve> curves; // curves[i] belongs to epoch i+1
    MonitorState state;
    std::optional<int> stopped_at;
};

/// GE configuration the monitor uses for a given (1-based) epoch: the
/// permutation seed is re-derived per epoch, so every evaluation draws fresh
/// attack batches the way repeated GE estimation does.
GEConfig monitor_epoch_config(const GEConfig& base, int epoch);

/// Runs the monitor over a training run: computes the optimized GE curve per
/// epoch (under monitor_epoch_config), feeds the state machine, and stops
/// consuming epochs at the first Stop decision.
MonitorReport monitor_training(const EpochSource& source, const GEConfig& ge_cfg,
                               const AreaOfHit& area, const PersistenceConfig& cfg, int patience);

/// Writes `monitor.csv` plus one `<epoch>/ge.csv` per observed epoch under
/// `run_dir`, creating directories as needed.
void write_monitor_run(const std::string& run_dir, const MonitorReport& report);

} // namespace ges
