#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ges/attack_set.hpp"

namespace ges {

struct GEConfig {
    int n_attacks = 1;       // attack repetitions averaged per curve
    int max_traces = 0;      // traces consumed per repetition
    int step = 1;            // checkpoint spacing
    std::uint64_t seed = 0;  // root of the per-repetition shuffle seeds

    /// Throws std::invalid_argument when inconsistent with an attack set of
    /// `available_traces` traces.
    void validate(std::size_t available_traces) const;
};

/// Guessing-entropy curve: mean rank of the true key over attack repetitions,
/// sampled at trace-count checkpoints.
struct GECurve {
    std::vector<int> checkpoints;
    std::vector<double> values;
    int n_attacks = 0;

    bool operator==(const GECurve&) const = default;
};

/// Checkpoints are step, 2*step, ... plus max_traces itself when the step
/// does not divide it, so a curve always ends at max_traces.
std::vector<int> ge_checkpoints(const GEConfig& cfg);

/// Optimized curve computation: one reindexed log-likelihood table, then
/// per-repetition running row sums read at each checkpoint. Repetitions run
/// in parallel; results are independent of the schedule because per-key
/// accumulation chains stay sequential and rank sums are integers.
GECurve ge_curve_optimized(const AttackSet& attack, const GEConfig& cfg);

/// Reference implementation with the classical nested loops: repetition,
/// checkpoint, trace, key, recomputing scores from scratch at every
/// checkpoint with per-value XOR/S-box lookups and no reindex table. Uses the
/// same seeded permutations and the same per-key accumulation order as the
/// optimized path, so both produce bit-identical curves. Serial on purpose;
/// it exists to check the fast path and to benchmark against.
GECurve ge_curve_naive(const AttackSet& attack, const GEConfig& cfg);

struct BenchRow {
    std::string impl; // "optimized" or "naive"
    int n_traces = 0;
    double seconds = 0.0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

/// Times both implementations on the same attack set. Each trial runs one
/// full pass per implementation and records the cumulative wall-clock time
/// when each checkpoint completes; because both kernels do exactly the work
/// of a shorter run to reach a checkpoint, the reading at checkpoint c equals
/// the cost of a standalone run with max_traces = c. Rows hold the median
/// over trials, optimized block first.
BenchReport bench_ge(const AttackSet& attack, const GEConfig& cfg, int trials);

void write_curve_csv(std::ostream& out, const GECurve& curve);
void write_bench_csv(std::ostream& out, const BenchReport& report);

/// Caps the worker threads used by parallel kernels (no-op when built
/// without OpenMP). n <= 0 restores the hardware default.
void set_thread_count(int n);

} // namespace ges
