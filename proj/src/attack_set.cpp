#include "ges/attack_set.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ges/sbox.hpp"

namespace ges {

void AttackSet::validate() const {
    if (keyspace < 2 || keyspace > 256 || !is_power_of_two(keyspace))
        throw std::invalid_argument("attack set: keyspace must be a power of two in [2, 256], got " +
                                    std::to_string(keyspace));
    if (predictions.cols() != static_cast<std::size_t>(keyspace))
        throw std::invalid_argument("attack set: prediction width " + std::to_string(predictions.cols()) +
                                    " does not match keyspace " + std::to_string(keyspace));
    if (plaintexts.size() != predictions.rows())
        throw std::invalid_argument("attack set: " + std::to_string(plaintexts.size()) + " plaintexts for " +
                                    std::to_string(predictions.rows()) + " prediction rows");
    if (true_key >= keyspace)
        throw std::invalid_argument("attack set: true key " + std::to_string(int(true_key)) +
                                    " outside keyspace " + std::to_string(keyspace));
    for (std::size_t i = 0; i < predictions.rows(); ++i) {
        if (plaintexts[i] >= keyspace)
            throw std::invalid_argument("attack set: plaintext " + std::to_string(int(plaintexts[i])) +
                                        " at trace " + std::to_string(i) + " outside keyspace");
        double sum = 0.0;
        for (float p : predictions.row(i)) {
            if (!(p >= 0.0f))
                throw std::invalid_argument("attack set: negative or NaN prediction at trace " + std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("attack set: prediction row " + std::to_string(i) +
                                        " sums to " + std::to_string(sum) + ", not 1");
    }
}

} // namespace ges
