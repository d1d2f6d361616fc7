#include "antn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace antn {

namespace {

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("checkpoint: cannot write '" + path + "'");
  }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    for (double x : v) f64(x);
  }
  void check() {
    if (!out_) throw IoError("checkpoint: write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw IoError("checkpoint: cannot read '" + path + "'");
  }
  std::uint8_t u8() {
    const int c = in_.get();
    if (c == EOF) throw IoError("checkpoint: truncated file");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint64_t len = u64();
    std::string s(len, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(len));
    if (!in_) throw IoError("checkpoint: truncated string");
    return s;
  }
  std::vector<double> doubles() {
    const std::uint64_t len = u64();
    std::vector<double> v(len);
    for (auto& x : v) x = f64();
    return v;
  }

 private:
  std::ifstream in_;
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  Writer w(path);
  for (char c : Checkpoint::kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(Checkpoint::kVersion);
  w.str(ck.config_text);
  w.u8(ck.mode_tag);
  w.u64(ck.step);
  w.u64(ck.n_sites);
  w.u64(ck.bond_profile.size());
  for (std::uint64_t b : ck.bond_profile) w.u64(b);
  w.u64(ck.depth);
  w.u64(ck.h_dim);
  w.u8(ck.has_u1);
  w.i32(ck.u1_target);
  w.u8(ck.z2_flip);
  w.u8(ck.head_tag);
  w.u8(ck.canonical);
  w.u64(ck.blocks.size());
  for (const auto& [name, values] : ck.blocks) {
    w.str(name);
    w.doubles(values);
  }
  w.u8(ck.has_adam);
  w.u64(ck.adam_t);
  w.doubles(ck.adam_m);
  w.doubles(ck.adam_v);
  w.u64(ck.seed);
  w.f64(ck.reference_energy);
  w.check();
}

Checkpoint load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[8];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, Checkpoint::kMagic, 8) != 0)
    throw IoError("checkpoint: bad magic in '" + path + "'");
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion)
    throw IoError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ck;
  ck.config_text = r.str();
  ck.mode_tag = r.u8();
  ck.step = r.u64();
  ck.n_sites = r.u64();
  ck.bond_profile.resize(r.u64());
  for (auto& b : ck.bond_profile) b = r.u64();
  ck.depth = r.u64();
  ck.h_dim = r.u64();
  ck.has_u1 = r.u8();
  ck.u1_target = r.i32();
  ck.z2_flip = r.u8();
  ck.head_tag = r.u8();
  ck.canonical = r.u8();
  const std::uint64_t n_blocks = r.u64();
  for (std::uint64_t k = 0; k < n_blocks; ++k) {
    std::string name = r.str();
    ck.blocks.emplace_back(std::move(name), r.doubles());
  }
  ck.has_adam = r.u8();
  ck.adam_t = r.u64();
  ck.adam_m = r.doubles();
  ck.adam_v = r.doubles();
  ck.seed = r.u64();
  ck.reference_energy = r.f64();
  return ck;
}

}  // namespace antn
