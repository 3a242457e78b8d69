#include "ges/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ges/rng.hpp"
#include "ges/sbox.hpp"

namespace ges {

void LeakageSchedule::validate() const {
    if (n_epochs < 1)
        throw std::invalid_argument("schedule: n_epochs must be >= 1");
    if (signal.size() != static_cast<std::size_t>(n_epochs))
        throw std::invalid_argument("schedule: " + std::to_string(signal.size()) + " signal values for " +
                                    std::to_string(n_epochs) + " epochs");
    for (double s : signal)
        if (!(s >= 0.0))
            throw std::invalid_argument("schedule: signal strengths must be >= 0");
    if (!(noise_sigma >= 0.0))
        throw std::invalid_argument("schedule: noise_sigma must be >= 0");
}

EpochBatch generate_epoch(const LeakageSchedule& schedule, int epoch, int n_traces, int keyspace,
                          std::uint8_t true_key) {
    schedule.validate();
    if (epoch < 0 || epoch >= schedule.n_epochs)
        throw std::invalid_argument("sim: epoch " + std::to_string(epoch) + " outside schedule of " +
                                    std::to_string(schedule.n_epochs));
    if (keyspace < 2 || keyspace > 256 || !is_power_of_two(keyspace))
        throw std::invalid_argument("sim: keyspace must be a power of two in [2, 256]");
    if (true_key >= keyspace)
        throw std::invalid_argument("sim: true key outside keyspace");
    if (n_traces < 1)
        throw std::invalid_argument("sim: n_traces must be >= 1");

    // Plaintexts are a run-level property: same seed, same plaintexts in
    // every epoch, so GE changes across epochs isolate model quality.
    std::vector<std::uint8_t> plaintexts(n_traces);
    {
        Rng rng(derive_seed(schedule.seed, "sim.plaintext"));
        for (int i = 0; i < n_traces; ++i)
            plaintexts[i] = static_cast<std::uint8_t>(rng.next_below(keyspace));
    }

    const double theta = schedule.signal[epoch];
    Matrix<float> predictions(n_traces, keyspace);

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_traces; ++i) {
        Rng rng(derive_seed(schedule.seed, "sim.noise",
                            (static_cast<std::uint64_t>(epoch) << 32) | static_cast<std::uint32_t>(i)));
        const int true_label = hypothesis_label(plaintexts[i], true_key, keyspace);
        std::vector<double> scores(keyspace);
        for (int label = 0; label < keyspace; ++label) {
            double s = schedule.noise_sigma > 0.0 ? schedule.noise_sigma * rng.next_gaussian() : 0.0;
            if (label == true_label) s += theta;
            scores[label] = s;
        }
        const double peak = *std::max_element(scores.begin(), scores.end());
        double total = 0.0;
        for (double& s : scores) {
            s = std::exp(s - peak);
            total += s;
        }
        const auto row = predictions.row(i);
        for (int label = 0; label < keyspace; ++label)
            row[label] = static_cast<float>(scores[label] / total);
    }

    EpochBatch batch{epoch, AttackSet{std::move(predictions), std::move(plaintexts), true_key, keyspace}};
    return batch;
}

LeakageSchedule overfit_schedule(int n_epochs, int peak_epoch, double theta_max, int plateau,
                                 double noise_sigma, std::uint64_t seed) {
    if (peak_epoch <= 0 || peak_epoch >= n_epochs)
        throw std::invalid_argument("schedule: peak_epoch must lie in (0, n_epochs)");
    if (plateau < 0)
        throw std::invalid_argument("schedule: plateau must be >= 0");
    if (!(theta_max >= 0.0))
        throw std::invalid_argument("schedule: theta_max must be >= 0");

    LeakageSchedule schedule{n_epochs, std::vector<double>(n_epochs), noise_sigma, seed};
    const int hold_end = peak_epoch + plateau;       // signal[peak..hold_end] == theta_max
    const int decay_span = (n_epochs - 1) - hold_end; // epochs left for the decay
    for (int e = 0; e < n_epochs; ++e) {
        double s;
        if (e <= peak_epoch)
            s = theta_max * e / peak_epoch;
        else if (e <= hold_end || decay_span <= 0)
            s = theta_max;
        else
            s = theta_max * static_cast<double>(n_epochs - 1 - e) / decay_span;
        schedule.signal[e] = s;
    }
    return schedule;
}

LeakageSchedule ramp_schedule(int n_epochs, double theta_max, double noise_sigma, std::uint64_t seed) {
    if (n_epochs < 1)
        throw std::invalid_argument("schedule: n_epochs must be >= 1");
    LeakageSchedule schedule{n_epochs, std::vector<double>(n_epochs), noise_sigma, seed};
    for (int e = 0; e < n_epochs; ++e)
        schedule.signal[e] = n_epochs == 1 ? theta_max : theta_max * e / (n_epochs - 1);
    return schedule;
}

LeakageSchedule flat_schedule(int n_epochs, double theta, double noise_sigma, std::uint64_t seed) {
    if (n_epochs < 1)
        throw std::invalid_argument("schedule: n_epochs must be >= 1");
    return {n_epochs, std::vector<double>(n_epochs, theta), noise_sigma, seed};
}

// Preset strengths are calibrated against the default monitor setup (30
// attacks of 300 from 1200 traces, |K| = 256, unit noise): 0.33 is just past
// the signal level where an epoch reliably ranks the key first, so the
// overfit ramp's hits start near its top and the monitor stops inside the
// plateau.
LeakageSchedule preset_schedule(const std::string& name, std::uint64_t seed) {
    if (name == "overfit") return overfit_schedule(50, 10, 0.33, 10, 1.0, seed);
    if (name == "ramp") return ramp_schedule(40, 0.43, 1.0, seed);
    if (name == "flat") return flat_schedule(20, 0.0, 1.0, seed);
    throw std::invalid_argument("schedule: unknown preset '" + name + "'");
}

LeakageSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("schedule: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("schedule: " + path + " is not valid JSON: " + e.what());
    }
    try {
        LeakageSchedule schedule;
        schedule.n_epochs = doc.at("n_epochs").get<int>();
        schedule.signal = doc.at("signal").get<std::vector<double>>();
        schedule.noise_sigma = doc.at("noise_sigma").get<double>();
        schedule.seed = doc.at("seed").get<std::uint64_t>();
        schedule.validate();
        return schedule;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("schedule: " + path + " is missing fields: " + e.what());
    }
}

void save_schedule(const std::string& path, const LeakageSchedule& schedule) {
    nlohmann::json doc{{"n_epochs", schedule.n_epochs},
                       {"signal", schedule.signal},
                       {"noise_sigma", schedule.noise_sigma},
                       {"seed", schedule.seed}};
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("schedule: cannot write " + path);
    out << doc.dump(2) << '\n';
}

EpochSource make_epoch_source(LeakageSchedule schedule, int n_traces, int keyspace,
                              std::uint8_t true_key) {
    schedule.validate();
    return [schedule = std::move(schedule), n_traces, keyspace, true_key](
               int epoch) -> std::optional<AttackSet> {
        if (epoch < 1 || epoch > schedule.n_epochs) return std::nullopt;
        return generate_epoch(schedule, epoch - 1, n_traces, keyspace, true_key).attack;
    };
}

} // namespace ges
