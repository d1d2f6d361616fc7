#include "antn/config.hpp"

#include <fstream>
#include <sstream>

namespace antn {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  try {
    const long long x = std::stoll(v);
    if (x < 0) throw std::invalid_argument("negative");
    return static_cast<std::size_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' wants a nonnegative integer, got '" + v + "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' wants a real number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' wants true/false, got '" + v + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "lattice.lx") lx = parse_count(key, v);
  else if (key == "lattice.ly") ly = parse_count(key, v);
  else if (key == "coupling.j1") j1 = parse_real(key, v);
  else if (key == "coupling.j2") j2 = parse_real(key, v);
  else if (key == "model.mode") mode = v;
  else if (key == "model.chi") chi = parse_count(key, v);
  else if (key == "model.depth") depth = parse_count(key, v);
  else if (key == "model.h_dim") h_dim = parse_count(key, v);
  else if (key == "model.u1_target") {
    if (v.empty() || v == "none") u1_target.reset();
    else u1_target = static_cast<int>(parse_real(key, v));
  } else if (key == "model.z2_flip") z2_flip = parse_bool(key, v);
  else if (key == "model.marshall") marshall = parse_bool(key, v);
  else if (key == "model.weight_scale") weight_scale = parse_real(key, v);
  else if (key == "model.head_scale") head_scale = parse_real(key, v);
  else if (key == "dmrg.chi") dmrg_chi = parse_count(key, v);
  else if (key == "dmrg.sweeps") dmrg_sweeps = parse_count(key, v);
  else if (key == "dmrg.init") dmrg_init = parse_bool(key, v);
  else if (key == "train.batch") batch = parse_count(key, v);
  else if (key == "train.steps") steps = parse_count(key, v);
  else if (key == "train.lr") lr = parse_real(key, v);
  else if (key == "train.lr_milestones") {
    lr_milestones.clear();
    if (!v.empty() && v != "none") {
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ','))
        lr_milestones.push_back(parse_count(key, trim(item)));
    }
  } else if (key == "train.seed") seed = parse_count(key, v);
  else if (key == "train.checkpoint_interval") checkpoint_interval = parse_count(key, v);
  else if (key == "evaluate.batch") evaluate_batch = parse_count(key, v);
  else if (key == "sample.count") sample_count = parse_count(key, v);
  else if (key == "compare.sizes") compare_sizes = v;
  else if (key == "compare.steps") compare_steps = parse_count(key, v);
  else if (key == "compare.chi_a") compare_chi_a = parse_count(key, v);
  else if (key == "compare.chi_b") compare_chi_b = parse_count(key, v);
  else if (key == "output.dir") out_dir = v;
  else if (key == "threads") threads = static_cast<int>(parse_count(key, v));
  else throw ConfigError("config: unknown key '" + key + "'");
}

void RunConfig::validate() const {
  if (lx < 1 || ly < 1)
    throw ConfigError("config: lattice.lx and lattice.ly must be >= 1");
  if (mode != "mps" && mode != "arnn" && mode != "elementwise" &&
      mode != "blockwise")
    throw ConfigError("config: model.mode must be one of mps | arnn | "
                      "elementwise | blockwise, got '" + mode + "'");
  if (chi < 1) throw ConfigError("config: model.chi must be >= 1");
  if (depth < 1) throw ConfigError("config: model.depth must be >= 1");
  if (h_dim < 1) throw ConfigError("config: model.h_dim must be >= 1");
  if (dmrg_chi < 1) throw ConfigError("config: dmrg.chi must be >= 1");
  if (dmrg_sweeps < 1) throw ConfigError("config: dmrg.sweeps must be >= 1");
  if (batch < 1) throw ConfigError("config: train.batch must be >= 1");
  if (steps < 1) throw ConfigError("config: train.steps must be >= 1");
  if (!(lr > 0)) throw ConfigError("config: train.lr must be > 0");
  if (evaluate_batch < 1)
    throw ConfigError("config: evaluate.batch must be >= 1");
  if (u1_target) {
    const std::size_t n = lx * ly;
    if (std::abs(*u1_target) > static_cast<int>(n) ||
        (static_cast<int>(n) - std::abs(*u1_target)) % 2 != 0)
      throw ConfigError("config: model.u1_target infeasible for this lattice");
    if (z2_flip && *u1_target != 0)
      throw ConfigError("config: model.z2_flip requires model.u1_target = 0");
  }
}

std::string RunConfig::serialize() const {
  std::ostringstream os;
  os.precision(17);
  os << "lattice.lx = " << lx << "\n";
  os << "lattice.ly = " << ly << "\n";
  os << "coupling.j1 = " << j1 << "\n";
  os << "coupling.j2 = " << j2 << "\n";
  os << "model.mode = " << mode << "\n";
  os << "model.chi = " << chi << "\n";
  os << "model.depth = " << depth << "\n";
  os << "model.h_dim = " << h_dim << "\n";
  os << "model.u1_target = "
     << (u1_target ? std::to_string(*u1_target) : "none") << "\n";
  os << "model.z2_flip = " << (z2_flip ? "true" : "false") << "\n";
  os << "model.marshall = " << (marshall ? "true" : "false") << "\n";
  os << "model.weight_scale = " << weight_scale << "\n";
  os << "model.head_scale = " << head_scale << "\n";
  os << "dmrg.chi = " << dmrg_chi << "\n";
  os << "dmrg.sweeps = " << dmrg_sweeps << "\n";
  os << "dmrg.init = " << (dmrg_init ? "true" : "false") << "\n";
  os << "train.batch = " << batch << "\n";
  os << "train.steps = " << steps << "\n";
  os << "train.lr = " << lr << "\n";
  os << "train.lr_milestones = ";
  for (std::size_t i = 0; i < lr_milestones.size(); ++i)
    os << (i ? "," : "") << lr_milestones[i];
  if (lr_milestones.empty()) os << "none";
  os << "\n";
  os << "train.seed = " << seed << "\n";
  os << "train.checkpoint_interval = " << checkpoint_interval << "\n";
  os << "evaluate.batch = " << evaluate_batch << "\n";
  os << "sample.count = " << sample_count << "\n";
  os << "compare.sizes = " << compare_sizes << "\n";
  os << "compare.steps = " << compare_steps << "\n";
  os << "compare.chi_a = " << compare_chi_a << "\n";
  os << "compare.chi_b = " << compare_chi_b << "\n";
  os << "output.dir = " << out_dir << "\n";
  os << "threads = " << threads << "\n";
  return os.str();
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " is not 'key = value'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace antn
