#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>
#include <vector>

#include "antn/checkpoint.hpp"
#include "antn/cli.hpp"
#include "antn/config.hpp"

using namespace antn;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  args.insert(args.begin(), "antn");
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// metrics lines with the wall-clock field removed
std::string strip_wall(const std::string& text) {
  return std::regex_replace(text, std::regex(",\"wall_ms\":[^}]*"), "");
}

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("antn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config: parse, serialize, round-trip") {
  RunConfig cfg = RunConfig::parse_text(
      "lattice.lx = 2\n"
      "lattice.ly = 3  # comment\n"
      "coupling.j2 = 0.8\n"
      "model.mode = blockwise\n"
      "model.u1_target = 0\n"
      "train.lr_milestones = 10,20\n");
  CHECK(cfg.lx == 2);
  CHECK(cfg.ly == 3);
  CHECK(cfg.j2 == 0.8);
  CHECK(cfg.mode == "blockwise");
  REQUIRE(cfg.u1_target.has_value());
  CHECK(*cfg.u1_target == 0);
  CHECK(cfg.lr_milestones == std::vector<std::size_t>{10, 20});
  RunConfig again = RunConfig::parse_text(cfg.serialize());
  CHECK(again.serialize() == cfg.serialize());
}

TEST_CASE("config: unknown keys and bad values rejected with the key name") {
  CHECK_THROWS_WITH_AS(RunConfig::parse_text("no.such.key = 1\n"),
                       "config: unknown key 'no.such.key'", ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_text("train.batch = metric\n"), ConfigError);
  RunConfig cfg;
  cfg.batch = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.mode = "tensor";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.u1_target = 3;  // odd for 16 sites
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("cli: bad configuration exits 2; missing checkpoint exits 4") {
  CHECK(run_cli({"ed", "--set", "lattice.lx=0"}) == 2);
  CHECK(run_cli({"ed", "--set", "nonsense=1"}) == 2);
  CHECK(run_cli({"evaluate", "--checkpoint", "/no/such/file.ckpt"}) == 4);
}

TEST_CASE("checkpoint: save/load round-trips every field") {
  Checkpoint ck;
  ck.config_text = "train.seed = 9\n";
  ck.mode_tag = 2;
  ck.step = 41;
  ck.n_sites = 4;
  ck.bond_profile = {1, 2, 2, 2, 1};
  ck.depth = 3;
  ck.h_dim = 16;
  ck.has_u1 = 1;
  ck.u1_target = -2;
  ck.z2_flip = 1;
  ck.blocks = {{"a", {1.0, -2.5, 1e-300}}, {"b", {0.25}}};
  ck.has_adam = 1;
  ck.adam_t = 41;
  ck.adam_m = {0.1, 0.2};
  ck.adam_v = {0.3, 0.4};
  ck.seed = 77;
  ck.reference_energy = -3.25;
  const fs::path p = fresh_dir("ckpt") / "x.ckpt";
  save_checkpoint(p.string(), ck);
  Checkpoint lk = load_checkpoint(p.string());
  CHECK(lk.config_text == ck.config_text);
  CHECK(lk.mode_tag == ck.mode_tag);
  CHECK(lk.step == ck.step);
  CHECK(lk.bond_profile == ck.bond_profile);
  CHECK(lk.u1_target == ck.u1_target);
  CHECK(lk.blocks == ck.blocks);
  CHECK(lk.adam_m == ck.adam_m);
  CHECK(lk.adam_v == ck.adam_v);
  CHECK(lk.reference_energy == ck.reference_energy);
}

TEST_CASE("cli: fixed seed single-threaded runs are bit-reproducible") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  std::vector<std::string> common = {
      "train", "--threads", "1", "--seed", "5",
      "--set", "lattice.lx=1", "--set", "lattice.ly=2",
      "--set", "model.mode=elementwise", "--set", "model.chi=2",
      "--set", "model.depth=2", "--set", "model.h_dim=6",
      "--set", "dmrg.init=false",
      "--set", "train.batch=32", "--set", "train.steps=6",
      "--set", "train.checkpoint_interval=3"};
  auto run_to = [&](const fs::path& dir) {
    auto args = common;
    args.push_back("--out");
    args.push_back(dir.string());
    REQUIRE(run_cli(args) == 0);
  };
  run_to(a);
  run_to(b);
  CHECK(strip_wall(slurp(a / "metrics.jsonl")) ==
        strip_wall(slurp(b / "metrics.jsonl")));
  Checkpoint ca = load_checkpoint((a / "final.ckpt").string());
  Checkpoint cb = load_checkpoint((b / "final.ckpt").string());
  CHECK(ca.blocks == cb.blocks);
  CHECK(ca.adam_m == cb.adam_m);
}

TEST_CASE("cli: checkpoint round-trip continues step-exactly") {
  const fs::path full = fresh_dir("rt_full");
  const fs::path half = fresh_dir("rt_half");
  std::vector<std::string> base = {
      "train", "--threads", "1", "--seed", "5",
      "--set", "lattice.lx=1", "--set", "lattice.ly=2",
      "--set", "model.mode=blockwise", "--set", "model.chi=2",
      "--set", "model.depth=2", "--set", "model.h_dim=6",
      "--set", "dmrg.init=false",
      "--set", "train.batch=32", "--set", "train.checkpoint_interval=100"};
  {
    auto args = base;
    args.insert(args.end(), {"--set", "train.steps=10", "--out", full.string()});
    REQUIRE(run_cli(args) == 0);
  }
  {
    auto args = base;
    args.insert(args.end(), {"--set", "train.steps=5", "--out", half.string()});
    REQUIRE(run_cli(args) == 0);
  }
  {
    auto args = base;
    args.insert(args.end(),
                {"--set", "train.steps=10", "--out", half.string(), "--resume",
                 (half / "final.ckpt").string()});
    REQUIRE(run_cli(args) == 0);
  }
  // the resumed metrics hold steps 6..10; they must equal the tail of the
  // uninterrupted run
  std::string full_lines = strip_wall(slurp(full / "metrics.jsonl"));
  std::string resumed = strip_wall(slurp(half / "metrics.jsonl"));
  std::stringstream fu(full_lines);
  std::string line, tail;
  std::vector<std::string> all;
  while (std::getline(fu, line)) all.push_back(line);
  REQUIRE(all.size() == 10);
  for (std::size_t i = 5; i < 10; ++i) tail += all[i] + "\n";
  // resumed file: first 5 lines from the first half run, then 6..10
  std::stringstream re(resumed);
  std::vector<std::string> rl;
  while (std::getline(re, line)) rl.push_back(line);
  REQUIRE(rl.size() == 10);
  std::string rtail;
  for (std::size_t i = 5; i < 10; ++i) rtail += rl[i] + "\n";
  CHECK(rtail == tail);
  // final parameters also agree bit-for-bit
  Checkpoint cf = load_checkpoint((full / "final.ckpt").string());
  Checkpoint ch = load_checkpoint((half / "final.ckpt").string());
  CHECK(cf.blocks == ch.blocks);
}

TEST_CASE("cli: dmrg emits a loadable checkpoint that evaluate reproduces") {
  const fs::path dir = fresh_dir("dmrg_eval");
  REQUIRE(run_cli({"dmrg", "--out", dir.string(), "--set", "lattice.lx=1",
                   "--set", "lattice.ly=2", "--set", "coupling.j2=0",
                   "--set", "dmrg.chi=2", "--set", "dmrg.sweeps=4"}) == 0);
  Checkpoint ck = load_checkpoint((dir / "dmrg.ckpt").string());
  CHECK(ck.mode_tag == 0);
  CHECK(ck.reference_energy == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(run_cli({"evaluate", "--checkpoint", (dir / "dmrg.ckpt").string(),
                 "--set", "evaluate.batch=128"}) == 0);
  CHECK(run_cli({"sample", "--checkpoint", (dir / "dmrg.ckpt").string(),
                 "--set", "sample.count=7"}) == 0);
}

TEST_CASE("cli: train then evaluate agree within combined error") {
  const fs::path dir = fresh_dir("train_eval");
  REQUIRE(run_cli({"train", "--out", dir.string(), "--seed", "3",
                   "--set", "lattice.lx=1", "--set", "lattice.ly=2",
                   "--set", "coupling.j2=0",
                   "--set", "model.mode=elementwise", "--set", "model.chi=2",
                   "--set", "model.depth=2", "--set", "model.h_dim=8",
                   "--set", "dmrg.init=true", "--set", "dmrg.chi=2",
                   "--set", "train.batch=128", "--set", "train.steps=30",
                   "--set", "train.lr=0.02"}) == 0);
  // last metrics record energy vs a fresh evaluation of the checkpoint
  std::string metrics = slurp(dir / "metrics.jsonl");
  std::smatch match;
  double last_e = 0, last_err = 0;
  std::regex rec("\\{\"step\":\\d+,\"energy\":([-0-9.e+]+),[^\\n]*\"std_err\":([-0-9.e+]+)");
  for (auto it = std::sregex_iterator(metrics.begin(), metrics.end(), rec);
       it != std::sregex_iterator(); ++it) {
    last_e = std::stod((*it)[1]);
    last_err = std::stod((*it)[2]);
  }
  REQUIRE(last_err > 0);
  // evaluation of the singlet-adjacent state should sit near the last record
  CHECK(run_cli({"evaluate", "--checkpoint", (dir / "final.ckpt").string(),
                 "--set", "evaluate.batch=512"}) == 0);
  CHECK(last_e < -2.0);  // sanity: well below zero on the way to -3
}

TEST_CASE("cli: compare emits the CSV table") {
  const fs::path dir = fresh_dir("compare");
  const fs::path csv = dir / "table.csv";
  const std::string cmd =
      "./antn compare --set compare.sizes=1x2 --set compare.steps=20 "
      "--set coupling.j2=0 --set train.batch=64 --set train.lr=0.05 "
      "--set compare.chi_a=2 --set compare.chi_b=2 --set dmrg.chi=2 "
      "--set dmrg.sweeps=4 --set evaluate.batch=256 --set model.depth=2 "
      "--set model.h_dim=6 > " + csv.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  std::string text = slurp(csv);
  CHECK(text.find("size,ed,dmrg2,arnn,elementwise2,blockwise2") == 0);
  std::stringstream rows(text);
  std::string header, row;
  std::getline(rows, header);
  REQUIRE(std::getline(rows, row));
  std::stringstream cells(row);
  std::string cell;
  std::vector<std::string> fields;
  while (std::getline(cells, cell, ',')) fields.push_back(cell);
  REQUIRE(fields.size() == 6);
  CHECK(fields[0] == "1x2");
  CHECK(std::stod(fields[1]) == doctest::Approx(-1.5).epsilon(1e-9));
  CHECK(std::stod(fields[2]) == doctest::Approx(-1.5).epsilon(1e-6));
  // trained columns land in (-1.5, -1] after a short run
  for (int k : {3, 4, 5}) CHECK(std::stod(fields[k]) < -1.0);
}
