#pragma once

#include <span>
#include <vector>

#include "ges/attack_set.hpp"
#include "ges/matrix.hpp"

namespace ges {

/// Probabilities are clamped to this floor before the log so underflowed
/// softmax outputs cannot produce -inf scores.
inline constexpr double kDefaultProbabilityFloor = 1e-36;

/// Per-trace log-probabilities reindexed by key hypothesis:
/// rows(i, k) = log(max(predictions(i, label), floor)) with
/// label = Sbox(plaintext_i XOR k). Building it once turns the per-trace
/// XOR/S-box lookups of key scoring into plain row additions.
struct KeyLogLikelihoodTable {
    Matrix<double> rows; // n_traces x keyspace
    int keyspace = 0;
};

KeyLogLikelihoodTable build_key_table(const AttackSet& attack,
                                      double probability_floor = kDefaultProbabilityFloor);

/// Accumulated log-likelihood per key hypothesis.
using GuessVector = std::vector<double>;

/// Number of keys scoring strictly higher than `key`; rank 0 means best.
/// Ties do not penalize the key.
int rank_of_key(std::span<const double> scores, int key);

} // namespace ges
