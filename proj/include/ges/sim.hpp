#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ges/attack_set.hpp"
#include "ges/early_stop.hpp"

namespace ges {

/// Stand-in for a training loop: per-epoch signal strengths drive how
/// concentrated the synthetic predictions are on the true label.
struct LeakageSchedule {
    int n_epochs = 0;
    std::vector<double> signal; // one boost value per epoch, >= 0
    double noise_sigma = 0.0;   // per-score Gaussian perturbation
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochBatch {
    int epoch = 0; // 0-based index into the schedule
    AttackSet attack;
};

/// Generates one epoch's attack set. Plaintexts are drawn once per run from
/// the schedule seed and are identical across epochs; per-trace scores are
/// signal[epoch] on the true label plus Gaussian noise, pushed through a
/// softmax. Bit-deterministic given (seed, epoch, trace).
EpochBatch generate_epoch(const LeakageSchedule& schedule, int epoch, int n_traces, int keyspace,
                          std::uint8_t true_key);

/// Signal ramps linearly from 0 to theta_max at peak_epoch, holds through
/// the plateau, then decays linearly toward 0 at the final epoch.
LeakageSchedule overfit_schedule(int n_epochs, int peak_epoch, double theta_max, int plateau = 10,
                                 double noise_sigma = 1.0, std::uint64_t seed = 0);

/// Signal ramps linearly from 0 at the first epoch to theta_max at the last.
LeakageSchedule ramp_schedule(int n_epochs, double theta_max, double noise_sigma = 1.0,
                              std::uint64_t seed = 0);

/// Constant signal.
LeakageSchedule flat_schedule(int n_epochs, double theta, double noise_sigma = 1.0,
                              std::uint64_t seed = 0);

/// Named preset used by the CLI: "ramp", "overfit", or "flat", with the
/// calibrated default shapes.
LeakageSchedule preset_schedule(const std::string& name, std::uint64_t seed);

/// Schedule file format: {"n_epochs", "signal": [...], "noise_sigma", "seed"}.
LeakageSchedule load_schedule(const std::string& path);
void save_schedule(const std::string& path, const LeakageSchedule& schedule);

/// Adapts a schedule to the monitor's epoch feed: 1-based monitor epoch e
/// maps to schedule entry e-1; the feed ends after n_epochs.
EpochSource make_epoch_source(LeakageSchedule schedule, int n_traces, int keyspace,
                              std::uint8_t true_key);

} // namespace ges
