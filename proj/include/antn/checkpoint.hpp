#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "antn/common.hpp"

namespace antn {

/// Versioned binary snapshot with an explicit little-endian layout and a
/// magic header. Parameter payloads are raw f64 bit patterns, so a
/// round-trip restores the run bit-exactly.
struct Checkpoint {
  static constexpr char kMagic[8] = {'A', 'N', 'T', 'N', 'C', 'K', 'P', '1'};
  static constexpr std::uint32_t kVersion = 1;

  std::string config_text;
  std::uint8_t mode_tag = 0;  // 0 mps, 1 arnn, 2 elementwise, 3 blockwise
  std::uint64_t step = 0;
  std::uint64_t n_sites = 0;
  std::vector<std::uint64_t> bond_profile;  // n+1 entries; empty for arnn
  std::uint64_t depth = 0, h_dim = 0;
  std::uint8_t has_u1 = 0;
  std::int32_t u1_target = 0;
  std::uint8_t z2_flip = 0;
  std::uint8_t head_tag = 0;   // arnn: 0 logit-phase, 1 complex pair
  std::uint8_t canonical = 0;  // mps right-canonical flag
  std::vector<std::pair<std::string, std::vector<double>>> blocks;
  std::uint8_t has_adam = 0;
  std::uint64_t adam_t = 0;
  std::vector<double> adam_m, adam_v;
  std::uint64_t seed = 0;
  double reference_energy = 0.0;  // e.g. the DMRG energy for mps snapshots
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace antn
