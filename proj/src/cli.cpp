#include "antn/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>

#include "antn/antn.hpp"
#include "antn/checkpoint.hpp"
#include "antn/config.hpp"
#include "antn/dmrg.hpp"
#include "antn/oracle.hpp"
#include "antn/vmc.hpp"

namespace antn::cli {

namespace {

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("ANTN_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "quiet") return LogLevel::kQuiet;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}

void info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) std::fprintf(stderr, "[antn] %s\n", msg.c_str());
}

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  std::string checkpoint_path;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_checkpoint) {
  cmd->add_option("--config", args.config_path, "configuration file path");
  cmd->add_option("--set", args.sets, "override KEY=VALUE (repeatable)");
  cmd->add_option("--seed", args.seed, "run seed override");
  cmd->add_option("--threads", args.threads, "worker thread count");
  cmd->add_option("--out", args.out_dir, "output directory");
  if (with_checkpoint)
    cmd->add_option("--checkpoint", args.checkpoint_path, "checkpoint path");
}

RunConfig make_config(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = RunConfig::parse_file(args.config_path);
  for (const std::string& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set wants KEY=VALUE, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed) cfg.seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;
  if (args.out_dir) cfg.out_dir = *args.out_dir;
  cfg.validate();
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  return cfg;
}

bool parallel_enabled(const RunConfig& cfg) { return cfg.threads != 1; }

SymmetryFlags flags_of(const RunConfig& cfg) {
  SymmetryFlags flags;
  flags.u1_target = cfg.u1_target;
  flags.z2_flip = cfg.z2_flip;
  return flags;
}

std::string json_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint8_t mode_tag_of(const std::string& mode) {
  if (mode == "mps") return 0;
  if (mode == "arnn") return 1;
  if (mode == "elementwise") return 2;
  return 3;
}

// ---- checkpoint capture / restore ----------------------------------------

void capture_params(const ParamStore& ps, Checkpoint& ck) {
  for (std::size_t b = 0; b < ps.n_blocks(); ++b) {
    auto vals = ps.block_values(b);
    ck.blocks.emplace_back(ps.block_name(b),
                           std::vector<double>(vals.begin(), vals.end()));
  }
}

void restore_params(ParamStore& ps, const Checkpoint& ck) {
  for (const auto& [name, values] : ck.blocks) {
    const BlockId b = ps.find_block(name);
    auto dst = ps.block_values(b);
    if (dst.size() != values.size())
      throw IoError("checkpoint: block '" + name + "' has size " +
                    std::to_string(values.size()) + ", expected " +
                    std::to_string(dst.size()));
    std::copy(values.begin(), values.end(), dst.begin());
  }
}

Checkpoint capture_model(const TrainableWavefunction& model,
                         const RunConfig& cfg, std::size_t step,
                         const AdamState& adam) {
  Checkpoint ck;
  ck.config_text = cfg.serialize();
  ck.mode_tag = mode_tag_of(cfg.mode);
  ck.step = step;
  ck.n_sites = model.n_sites();
  ck.depth = cfg.depth;
  ck.h_dim = cfg.h_dim;
  ck.has_u1 = cfg.u1_target.has_value();
  ck.u1_target = cfg.u1_target.value_or(0);
  ck.z2_flip = cfg.z2_flip;
  ck.seed = cfg.seed;
  if (const auto* antn = dynamic_cast<const AntnModel*>(&model)) {
    for (std::size_t c = 0; c <= antn->n_sites(); ++c)
      ck.bond_profile.push_back(antn->bond(c));
  }
  capture_params(model.params(), ck);
  ck.has_adam = !adam.m.empty();
  ck.adam_t = adam.t;
  ck.adam_m = adam.m;
  ck.adam_v = adam.v;
  return ck;
}

Mps mps_from_checkpoint(const Checkpoint& ck) {
  Mps mps;
  for (std::size_t i = 0; i + 1 < ck.bond_profile.size(); ++i) {
    Tensor3 t(ck.bond_profile[i], ck.bond_profile[i + 1]);
    mps.tensors.push_back(std::move(t));
  }
  // fill from blocks
  for (std::size_t i = 0; i < mps.tensors.size(); ++i) {
    const std::string tag = "t" + std::to_string(i);
    const std::string alt = "mps.t" + std::to_string(i);
    for (const auto& [name, values] : ck.blocks) {
      Tensor3& t = mps.tensors[i];
      auto fill = [&](bool real_part) {
        for (std::size_t k = 0; k < values.size(); ++k) {
          Complex& z = t.entries[k];
          z = real_part ? Complex(values[k], z.imag())
                        : Complex(z.real(), values[k]);
        }
      };
      if (name == tag + ".re" || name == alt + ".re") fill(true);
      if (name == tag + ".im" || name == alt + ".im") fill(false);
    }
  }
  mps.canonical = ck.canonical ? CanonicalForm::kRight : CanonicalForm::kNone;
  return mps;
}

std::unique_ptr<TrainableWavefunction> rebuild_model(const Checkpoint& ck) {
  SymmetryFlags flags;
  if (ck.has_u1) flags.u1_target = ck.u1_target;
  flags.z2_flip = ck.z2_flip;
  Rng rng(1);
  std::unique_ptr<TrainableWavefunction> model;
  switch (ck.mode_tag) {
    case 0:
      return std::make_unique<MpsWavefunction>(mps_from_checkpoint(ck));
    case 1:
      model = std::make_unique<ArnnWavefunction>(
          ck.n_sites, ck.depth, ck.h_dim, flags, rng,
          ck.head_tag ? ArnnHead::kComplexPair : ArnnHead::kLogitPhase);
      break;
    case 2:
    case 3: {
      Mps shape = mps_from_checkpoint(ck);
      model = std::make_unique<AntnModel>(
          ck.mode_tag == 2 ? AntnMode::kElementwise : AntnMode::kBlockwise,
          shape, ck.depth, ck.h_dim, flags, rng, /*zero_net_output=*/true);
      break;
    }
    default:
      throw IoError("checkpoint: unknown mode tag");
  }
  restore_params(model->params(), ck);
  return model;
}

// ---- model construction for training --------------------------------------

std::unique_ptr<TrainableWavefunction> build_fresh_model(
    const RunConfig& cfg, const HamiltonianTerms& terms, double* dmrg_energy) {
  const std::size_t n = cfg.lx * cfg.ly;
  Rng rng(cfg.seed);
  if (cfg.mode == "arnn") {
    return std::make_unique<ArnnWavefunction>(n, cfg.depth, cfg.h_dim,
                                              flags_of(cfg), rng,
                                              ArnnHead::kLogitPhase,
                                              cfg.weight_scale, cfg.head_scale);
  }
  const AntnMode mode = cfg.mode == "elementwise" ? AntnMode::kElementwise
                                                  : AntnMode::kBlockwise;
  if (cfg.dmrg_init) {
    info("running DMRG initialization (chi=" + std::to_string(cfg.chi) + ")");
    DmrgOptions dopt;
    dopt.chi_max = cfg.chi;
    dopt.n_sweeps = cfg.dmrg_sweeps;
    dopt.seed = cfg.seed;
    DmrgResult dr = dmrg_ground_state(build_mpo(terms), dopt);
    if (dmrg_energy) *dmrg_energy = dr.energy;
    info("DMRG energy " + json_num(dr.energy));
    return std::make_unique<AntnModel>(mode, dr.mps, cfg.depth, cfg.h_dim,
                                       flags_of(cfg), rng,
                                       /*zero_net_output=*/true,
                                       cfg.weight_scale, cfg.head_scale);
  }
  auto model = std::make_unique<AntnModel>(AntnModel::random(
      mode, n, cfg.chi, cfg.depth, cfg.h_dim, flags_of(cfg), rng,
      cfg.weight_scale, cfg.head_scale));
  return model;
}

void write_metrics_line(std::FILE* f, const StepRecord& r) {
  std::fprintf(f,
               "{\"step\":%zu,\"energy\":%s,\"energy_per_site\":%s,"
               "\"std_err\":%s,\"im_energy\":%s,\"lr\":%s,\"wall_ms\":%s}\n",
               r.step, json_num(r.energy).c_str(),
               json_num(r.energy_per_site).c_str(), json_num(r.std_err).c_str(),
               json_num(r.im_energy).c_str(), json_num(r.lr).c_str(),
               json_num(r.wall_ms).c_str());
}

// ---- commands --------------------------------------------------------------

int cmd_ed(const RunConfig& cfg) {
  auto lat = build_lattice(cfg.lx, cfg.ly);
  auto terms = heisenberg_terms(lat, cfg.j1, cfg.j2, cfg.marshall);
  EdResult r = exact_ground_state(terms, lat);
  std::printf("{\"n\":%zu,\"energy\":%s,\"energy_per_site\":%s,\"path\":\"%s\","
              "\"residual\":%s}\n",
              lat.n_sites(), json_num(r.energy).c_str(),
              json_num(r.energy / static_cast<double>(lat.n_sites())).c_str(),
              r.path.c_str(), json_num(r.residual).c_str());
  return 0;
}

int cmd_dmrg(const RunConfig& cfg) {
  auto lat = build_lattice(cfg.lx, cfg.ly);
  auto terms = heisenberg_terms(lat, cfg.j1, cfg.j2, cfg.marshall);
  DmrgOptions opt;
  opt.chi_max = cfg.dmrg_chi;
  opt.n_sweeps = cfg.dmrg_sweeps;
  opt.seed = cfg.seed;
  DmrgResult r = dmrg_ground_state(build_mpo(terms), opt);
  for (std::size_t s = 0; s < r.sweep_energies.size(); ++s) {
    std::printf("{\"sweep\":%zu,\"energy\":%s,\"energy_per_site\":%s}\n", s + 1,
                json_num(r.sweep_energies[s]).c_str(),
                json_num(r.sweep_energies[s] / double(terms.n)).c_str());
  }
  double max_dw = 0;
  for (double dw : r.discarded_weights) max_dw = std::max(max_dw, dw);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/dmrg.ckpt";
  MpsWavefunction wf(r.mps);
  Checkpoint ck;
  ck.config_text = cfg.serialize();
  ck.mode_tag = 0;
  ck.n_sites = terms.n;
  for (std::size_t i = 0; i < r.mps.n_sites(); ++i)
    ck.bond_profile.push_back(r.mps.tensors[i].chi_l);
  ck.bond_profile.push_back(1);
  ck.canonical = 1;
  ck.seed = cfg.seed;
  ck.reference_energy = r.energy;
  capture_params(wf.params(), ck);
  save_checkpoint(path, ck);
  std::printf("{\"energy\":%s,\"energy_per_site\":%s,\"max_bond\":%zu,"
              "\"max_discarded\":%s,\"checkpoint\":\"%s\"}\n",
              json_num(r.energy).c_str(),
              json_num(r.energy / double(terms.n)).c_str(), r.mps.max_bond(),
              json_num(max_dw).c_str(), path.c_str());
  return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& resume_path) {
  auto lat = build_lattice(cfg.lx, cfg.ly);
  auto terms = heisenberg_terms(lat, cfg.j1, cfg.j2, cfg.marshall);
  std::filesystem::create_directories(cfg.out_dir);

  std::unique_ptr<TrainableWavefunction> model;
  AdamState adam;
  TrainOptions opt;
  opt.batch = cfg.batch;
  opt.steps = cfg.steps;
  opt.seed = cfg.seed;
  opt.parallel = parallel_enabled(cfg);
  opt.schedule.initial = cfg.lr;
  opt.schedule.milestones = cfg.lr_milestones;
  opt.checkpoint_interval = cfg.checkpoint_interval;

  double dmrg_energy = 0;
  if (!resume_path.empty()) {
    Checkpoint ck = load_checkpoint(resume_path);
    model = rebuild_model(ck);
    adam.t = ck.adam_t;
    adam.m = ck.adam_m;
    adam.v = ck.adam_v;
    opt.start_step = ck.step;
    info("resuming from step " + std::to_string(ck.step));
  } else {
    if (cfg.mode == "mps")
      throw ConfigError("train: model.mode mps is trained by the dmrg command");
    model = build_fresh_model(cfg, terms, &dmrg_energy);
  }

  const std::string metrics_path = cfg.out_dir + "/metrics.jsonl";
  std::FILE* metrics = std::fopen(
      metrics_path.c_str(), opt.start_step == 0 ? "w" : "a");
  if (!metrics) throw IoError("train: cannot write " + metrics_path);

  TrainCallbacks cb;
  cb.on_step = [&](const StepRecord& r) {
    write_metrics_line(metrics, r);
    std::fflush(metrics);
    if (log_level() >= LogLevel::kDebug || (log_level() >= LogLevel::kInfo && r.step % 50 == 0))
      info("step " + std::to_string(r.step) + " energy " + json_num(r.energy) +
           " +- " + json_num(r.std_err));
  };
  cb.on_checkpoint = [&](std::size_t completed) {
    Checkpoint ck = capture_model(*model, cfg, completed, adam);
    ck.reference_energy = dmrg_energy;
    save_checkpoint(cfg.out_dir + "/checkpoint.ckpt", ck);
  };

  try {
    TrainResult result = train(*model, terms, opt, adam, cb);
    std::fclose(metrics);
    Checkpoint ck = capture_model(*model, cfg, opt.steps, adam);
    ck.reference_energy = dmrg_energy;
    const std::string final_path = cfg.out_dir + "/final.ckpt";
    save_checkpoint(final_path, ck);
    std::printf("{\"final_energy\":%s,\"final_energy_per_site\":%s,"
                "\"steps\":%zu,\"checkpoint\":\"%s\"}\n",
                json_num(result.final_energy).c_str(),
                json_num(result.final_energy / double(terms.n)).c_str(),
                opt.steps, final_path.c_str());
  } catch (...) {
    std::fclose(metrics);
    throw;
  }
  return 0;
}

std::unique_ptr<TrainableWavefunction> load_model_for(
    const std::string& checkpoint_path, RunConfig& embedded) {
  if (checkpoint_path.empty())
    throw IoError("missing --checkpoint PATH");
  Checkpoint ck = load_checkpoint(checkpoint_path);
  embedded = RunConfig::parse_text(ck.config_text);
  return rebuild_model(ck);
}

int cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path) {
  RunConfig embedded;
  auto model = load_model_for(checkpoint_path, embedded);
  auto lat = build_lattice(embedded.lx, embedded.ly);
  auto terms = heisenberg_terms(lat, embedded.j1, embedded.j2, embedded.marshall);
  BatchEval batch = sample_and_measure(*model, terms, cfg.evaluate_batch,
                                       cfg.seed, /*step=*/1u << 20,
                                       parallel_enabled(cfg));
  std::printf("{\"n\":%zu,\"batch\":%zu,\"energy\":%s,\"energy_per_site\":%s,"
              "\"std_err\":%s,\"im_energy\":%s}\n",
              terms.n, cfg.evaluate_batch,
              json_num(batch.estimate.mean.real()).c_str(),
              json_num(batch.estimate.mean.real() / double(terms.n)).c_str(),
              json_num(batch.estimate.std_error).c_str(),
              json_num(batch.estimate.mean.imag()).c_str());
  return 0;
}

int cmd_sample(const RunConfig& cfg, const std::string& checkpoint_path) {
  RunConfig embedded;
  auto model = load_model_for(checkpoint_path, embedded);
  Rng rng(cfg.seed);
  for (std::size_t k = 0; k < cfg.sample_count; ++k) {
    SpinConfig x = model->sample(rng);
    std::string line(x.size(), '0');
    for (std::size_t i = 0; i < x.size(); ++i) line[i] = x[i] ? '1' : '0';
    std::printf("%s\n", line.c_str());
  }
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  std::printf("size,ed,dmrg%zu,arnn,elementwise%zu,blockwise%zu\n",
              cfg.compare_chi_a, cfg.compare_chi_a, cfg.compare_chi_b);
  std::stringstream sizes(cfg.compare_sizes);
  std::string token;
  while (std::getline(sizes, token, ',')) {
    const auto x = token.find('x');
    if (x == std::string::npos)
      throw ConfigError("compare.sizes wants entries like 4x4");
    const std::size_t lx = std::stoul(token.substr(0, x));
    const std::size_t ly = std::stoul(token.substr(x + 1));
    const std::size_t n = lx * ly;
    auto lat = build_lattice(lx, ly);
    auto terms = heisenberg_terms(lat, cfg.j1, cfg.j2, cfg.marshall);

    std::string ed = "";
    if (n <= 20) {
      EdResult r = exact_ground_state(terms, lat);
      ed = json_num(r.energy / double(n));
    }
    DmrgOptions dopt;
    dopt.chi_max = cfg.compare_chi_a;
    dopt.n_sweeps = cfg.dmrg_sweeps;
    dopt.seed = cfg.seed;
    DmrgResult dmrg = dmrg_ground_state(build_mpo(terms), dopt);

    auto train_variant = [&](const std::string& mode, std::size_t chi) {
      RunConfig vc = cfg;
      vc.lx = lx;
      vc.ly = ly;
      vc.mode = mode;
      vc.chi = chi;
      vc.steps = cfg.compare_steps;
      double ref = 0;
      auto model = build_fresh_model(vc, terms, &ref);
      TrainOptions opt;
      opt.batch = vc.batch;
      opt.steps = vc.steps;
      opt.seed = vc.seed;
      opt.parallel = parallel_enabled(cfg);
      opt.schedule.initial = vc.lr;
      opt.schedule.milestones = vc.lr_milestones;
      opt.checkpoint_interval = 0;
      AdamState adam;
      train(*model, terms, opt, adam);
      BatchEval fin = sample_and_measure(*model, terms, cfg.evaluate_batch,
                                         cfg.seed + 1, 1u << 20,
                                         parallel_enabled(cfg));
      return fin.estimate.mean.real() / double(n);
    };
    const double arnn = train_variant("arnn", 1);
    const double elem = train_variant("elementwise", cfg.compare_chi_a);
    const double block = train_variant("blockwise", cfg.compare_chi_b);
    std::printf("%zux%zu,%s,%s,%s,%s,%s\n", lx, ly, ed.c_str(),
                json_num(dmrg.energy / double(n)).c_str(),
                json_num(arnn).c_str(), json_num(elem).c_str(),
                json_num(block).c_str());
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"ground-state solver for 2D quantum spin systems"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string resume_path;
  CLI::App* ed = app.add_subcommand("ed", "exact diagonalization");
  CLI::App* dmrg = app.add_subcommand("dmrg", "DMRG ground-state search");
  CLI::App* train_cmd = app.add_subcommand("train", "variational training");
  CLI::App* evaluate = app.add_subcommand("evaluate", "energy of a checkpoint");
  CLI::App* sample = app.add_subcommand("sample", "draw configurations");
  CLI::App* compare = app.add_subcommand("compare", "method comparison table");
  for (CLI::App* cmd : {ed, dmrg, train_cmd, compare}) add_common(cmd, args, false);
  for (CLI::App* cmd : {evaluate, sample}) add_common(cmd, args, true);
  train_cmd->add_option("--resume", resume_path, "continue from a checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    const RunConfig cfg = make_config(args);
    if (ed->parsed()) return cmd_ed(cfg);
    if (dmrg->parsed()) return cmd_dmrg(cfg);
    if (train_cmd->parsed()) return cmd_train(cfg, resume_path);
    if (evaluate->parsed()) return cmd_evaluate(cfg, args.checkpoint_path);
    if (sample->parsed()) return cmd_sample(cfg, args.checkpoint_path);
    if (compare->parsed()) return cmd_compare(cfg);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return 4;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace antn::cli
