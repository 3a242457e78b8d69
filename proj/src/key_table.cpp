#include "ges/key_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ges/sbox.hpp"

namespace ges {

KeyLogLikelihoodTable build_key_table(const AttackSet& attack, double probability_floor) {
    if (!(probability_floor > 0.0))
        throw std::invalid_argument("key table: probability floor must be positive");
    if (attack.plaintexts.size() != attack.predictions.rows())
        throw std::invalid_argument("key table: " + std::to_string(attack.plaintexts.size()) +
                                    " plaintexts for " + std::to_string(attack.predictions.rows()) +
                                    " prediction rows");

    const int keyspace = attack.keyspace;
    const std::int64_t n = static_cast<std::int64_t>(attack.n_traces());
    KeyLogLikelihoodTable table{Matrix<double>(n, keyspace), keyspace};

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const std::uint8_t plaintext = attack.plaintexts[i];
        const auto pred = attack.predictions.row(i);
        const auto out = table.rows.row(i);
        for (int k = 0; k < keyspace; ++k) {
            const double p = pred[hypothesis_label(plaintext, k, keyspace)];
            out[k] = std::log(std::max(p, probability_floor));
        }
    }
    return table;
}

int rank_of_key(std::span<const double> scores, int key) {
    if (key < 0 || static_cast<std::size_t>(key) >= scores.size())
        throw std::invalid_argument("rank: key " + std::to_string(key) + " outside keyspace of " +
                                    std::to_string(scores.size()));
    const double own = scores[key];
    int rank = 0;
    for (double s : scores)
        if (s > own) ++rank;
    return rank;
}

} // namespace ges
