#include "ges/ge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ges/key_table.hpp"
#include "ges/rng.hpp"
#include "ges/sbox.hpp"

namespace ges {

void GEConfig::validate(std::size_t available_traces) const {
    if (n_attacks < 1)
        throw std::invalid_argument("ge config: n_attacks must be >= 1");
    if (max_traces < 1)
        throw std::invalid_argument("ge config: max_traces must be >= 1");
    if (step < 1 || step > max_traces)
        throw std::invalid_argument("ge config: step must be in [1, max_traces]");
    if (static_cast<std::size_t>(max_traces) > available_traces)
        throw std::invalid_argument("ge config: max_traces " + std::to_string(max_traces) +
                                    " exceeds the " + std::to_string(available_traces) +
                                    " available traces");
}

std::vector<int> ge_checkpoints(const GEConfig& cfg) {
    std::vector<int> cps;
    for (int t = cfg.step; t <= cfg.max_traces; t += cfg.step) cps.push_back(t);
    if (cps.empty() || cps.back() != cfg.max_traces) cps.push_back(cfg.max_traces);
    return cps;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// One shuffled trace order per repetition, shared by both implementations.
std::vector<std::vector<std::uint32_t>> attack_permutations(std::size_t n_traces, const GEConfig& cfg) {
    std::vector<std::vector<std::uint32_t>> perms(cfg.n_attacks);
    for (int rep = 0; rep < cfg.n_attacks; ++rep)
        perms[rep] = shuffled_indices(n_traces, derive_seed(cfg.seed, "ge.attack", rep));
    return perms;
}

GECurve curve_from_rank_sums(const std::vector<int>& checkpoints,
                             const std::vector<std::int64_t>& rank_sums, int n_attacks) {
    GECurve curve{checkpoints, {}, n_attacks};
    curve.values.reserve(checkpoints.size());
    for (std::int64_t s : rank_sums)
        curve.values.push_back(static_cast<double>(s) / n_attacks);
    return curve;
}

/// `cumulative_seconds`, when non-null, receives the wall-clock time at which
/// each checkpoint's ranks were complete.
GECurve curve_optimized_impl(const AttackSet& attack, const GEConfig& cfg,
                             std::vector<double>* cumulative_seconds) {
    attack.validate();
    cfg.validate(attack.n_traces());
    const auto checkpoints = ge_checkpoints(cfg);
    const int n_reps = cfg.n_attacks;
    const int keyspace = attack.keyspace;

    const auto t0 = Clock::now();
    const KeyLogLikelihoodTable table = build_key_table(attack);
    const auto perms = attack_permutations(attack.n_traces(), cfg);

    Matrix<double> scores(n_reps, keyspace, 0.0);
    std::vector<std::int64_t> rank_sums(checkpoints.size(), 0);

    int segment_lo = 0;
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const int segment_hi = checkpoints[c];
#pragma omp parallel for schedule(static)
        for (int rep = 0; rep < n_reps; ++rep) {
            double* acc = scores.row(rep).data();
            const std::uint32_t* order = perms[rep].data();
            for (int t = segment_lo; t < segment_hi; ++t) {
                const double* row = table.rows.row(order[t]).data();
                for (int k = 0; k < keyspace; ++k) acc[k] += row[k];
            }
            const std::int64_t r = rank_of_key(scores.row(rep), attack.true_key);
#pragma omp atomic
            rank_sums[c] += r;
        }
        if (cumulative_seconds) (*cumulative_seconds)[c] = seconds_since(t0);
        segment_lo = segment_hi;
    }
    return curve_from_rank_sums(checkpoints, rank_sums, n_reps);
}

GECurve curve_naive_impl(const AttackSet& attack, const GEConfig& cfg,
                         std::vector<double>* cumulative_seconds) {
    attack.validate();
    cfg.validate(attack.n_traces());
    const auto checkpoints = ge_checkpoints(cfg);
    const int n_reps = cfg.n_attacks;
    const int keyspace = attack.keyspace;

    const auto t0 = Clock::now();
    const auto perms = attack_permutations(attack.n_traces(), cfg);

    std::vector<std::int64_t> rank_sums(checkpoints.size(), 0);
    GuessVector scores(keyspace);

    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const int n_used = checkpoints[c];
        for (int rep = 0; rep < n_reps; ++rep) {
            const auto& order = perms[rep];
            std::fill(scores.begin(), scores.end(), 0.0);
            for (int t = 0; t < n_used; ++t) {
                const std::uint32_t trace = order[t];
                const std::uint8_t plaintext = attack.plaintexts[trace];
                const auto pred = attack.predictions.row(trace);
                for (int k = 0; k < keyspace; ++k) {
                    const double p = pred[hypothesis_label(plaintext, k, keyspace)];
                    scores[k] += std::log(std::max(p, kDefaultProbabilityFloor));
                }
            }
            rank_sums[c] += rank_of_key(scores, attack.true_key);
        }
        if (cumulative_seconds) (*cumulative_seconds)[c] = seconds_since(t0);
    }
    return curve_from_rank_sums(checkpoints, rank_sums, n_reps);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

GECurve ge_curve_optimized(const AttackSet& attack, const GEConfig& cfg) {
    return curve_optimized_impl(attack, cfg, nullptr);
}

GECurve ge_curve_naive(const AttackSet& attack, const GEConfig& cfg) {
    return curve_naive_impl(attack, cfg, nullptr);
}

BenchReport bench_ge(const AttackSet& attack, const GEConfig& cfg, int trials) {
    if (trials < 1)
        throw std::invalid_argument("bench: trials must be >= 1");
    const auto checkpoints = ge_checkpoints(cfg);
    const std::size_t n_cps = checkpoints.size();

    Matrix<double> optimized_times(trials, n_cps);
    Matrix<double> naive_times(trials, n_cps);
    std::vector<double> stamps(n_cps);
    for (int trial = 0; trial < trials; ++trial) {
        curve_optimized_impl(attack, cfg, &stamps);
        std::copy(stamps.begin(), stamps.end(), optimized_times.row(trial).begin());
        curve_naive_impl(attack, cfg, &stamps);
        std::copy(stamps.begin(), stamps.end(), naive_times.row(trial).begin());
    }

    BenchReport report;
    auto emit = [&](const char* impl, const Matrix<double>& times) {
        for (std::size_t c = 0; c < n_cps; ++c) {
            std::vector<double> samples(trials);
            for (int trial = 0; trial < trials; ++trial) samples[trial] = times(trial, c);
            report.rows.push_back({impl, checkpoints[c], median(std::move(samples))});
        }
    };
    emit("optimized", optimized_times);
    emit("naive", naive_times);
    return report;
}

void write_curve_csv(std::ostream& out, const GECurve& curve) {
    out << "n_traces,ge\n";
    out.precision(17);
    for (std::size_t i = 0; i < curve.checkpoints.size(); ++i)
        out << curve.checkpoints[i] << ',' << curve.values[i] << '\n';
}

void write_bench_csv(std::ostream& out, const BenchReport& report) {
    out << "impl,n_traces,seconds\n";
    out.precision(9);
    out << std::fixed;
    for (const auto& row : report.rows)
        out << row.impl << ',' << row.n_traces << ',' << row.seconds << '\n';
}

void set_thread_count(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
#else
    (void)n;
#endif
}

} // namespace ges
