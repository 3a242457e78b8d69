#pragma once

#include <cstdint>
#include <vector>

#include "ges/matrix.hpp"

namespace ges {

/// Attack traces reduced to what key scoring needs: one prediction
/// distribution per trace, the plaintext byte that was combined with the key,
/// and the true key the ranking is judged against.
struct AttackSet {
    Matrix<float> predictions;            // n_traces x keyspace, each row a distribution
    std::vector<std::uint8_t> plaintexts; // one byte per trace
    std::uint8_t true_key = 0;
    int keyspace = 256;

    std::size_t n_traces() const { return predictions.rows(); }

    /// Throws std::invalid_argument on any violated invariant: keyspace must
    /// be a power of two in [2, 256], rows must be distributions (sum 1
    /// within 1e-6, entries >= 0), shapes must agree, and plaintexts and the
    /// true key must lie inside the keyspace.
    void validate() const;
};

} // namespace ges
