#pragma once

#include <string>

#include "ges/attack_set.hpp"

namespace ges {

/// On-disk attack-set layout inside one directory:
///   attack.json       {"n_traces": int, "keyspace": int, "true_key": int}
///   predictions.f32   little-endian 32-bit floats, row-major n_traces x keyspace
///   plaintexts.u8     raw bytes, length n_traces
/// The byte layout is normative; files written on any platform load on any
/// other bit-exactly.
void save_attack_set(const std::string& dir, const AttackSet& attack);

/// `path` may be the directory or the attack.json header itself.
AttackSet load_attack_set(const std::string& path);

} // namespace ges
