#pragma once

#include <cstdint>

namespace ges {

/// Forward AES S-box (FIPS-197).
std::uint8_t aes_sbox(std::uint8_t x);

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Label of the attacked intermediate for a key hypothesis. Full byte
/// keyspaces go through the AES S-box; reduced (power-of-two) keyspaces use
/// the identity permutation so XOR stays closed and tiny instances remain
/// brute-forceable.
inline int hypothesis_label(std::uint8_t plaintext, int key, int keyspace) {
    const int x = plaintext ^ key;
    return keyspace == 256 ? aes_sbox(static_cast<std::uint8_t>(x)) : x;
}

} // namespace ges
