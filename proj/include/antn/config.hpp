#pragma once

#include <optional>
#include <string>
#include <vector>

#include "antn/common.hpp"

namespace antn {

/// Flat typed run configuration. Parsed from `key = value` lines; unknown
/// keys are rejected. Command-line --set KEY=VALUE pairs override file
/// values.
struct RunConfig {
  std::size_t lx = 4, ly = 4;
  double j1 = 1.0, j2 = 0.5;

  std::string mode = "elementwise";  // mps | arnn | elementwise | blockwise
  std::size_t chi = 8;
  std::size_t depth = 3, h_dim = 32;
  std::optional<int> u1_target;
  bool z2_flip = false;
  bool marshall = false;
  double weight_scale = 1.0, head_scale = 1.0;

  std::size_t dmrg_chi = 8, dmrg_sweeps = 10;
  bool dmrg_init = true;

  std::size_t batch = 1024, steps = 2000;
  double lr = 0.01;
  std::vector<std::size_t> lr_milestones = {100,  500,  1000, 1800,
                                            2500, 4000, 6000, 8000};
  std::uint64_t seed = 1;
  std::size_t checkpoint_interval = 100;

  std::size_t evaluate_batch = 4096;
  std::size_t sample_count = 100;

  std::string compare_sizes = "2x2";
  std::size_t compare_steps = 200;
  std::size_t compare_chi_a = 8, compare_chi_b = 16;

  std::string out_dir = ".";
  int threads = 0;  // 0 = library default

  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// Canonical text form; parsing it back reproduces the config.
  std::string serialize() const;

  static RunConfig parse_text(const std::string& text);
  static RunConfig parse_file(const std::string& path);
};

}  // namespace antn
