#include "antn/mps.hpp"

#include <algorithm>
#include <cmath>

namespace antn {

namespace {

// Matricizations are free relabelings of the row-major (l, x, r) layout.
ComplexMatrix as_rows_lx(const Tensor3& t) {
  ComplexMatrix m(t.chi_l * Tensor3::d, t.chi_r);
  m.entries = t.entries;
  return m;
}

ComplexMatrix as_rows_l(const Tensor3& t) {
  ComplexMatrix m(t.chi_l, Tensor3::d * t.chi_r);
  m.entries = t.entries;
  return m;
}

Tensor3 tensor_from_rows_l(const ComplexMatrix& m, std::size_t chi_r) {
  Tensor3 t(m.rows, chi_r);
  t.entries = m.entries;
  return t;
}

Tensor3 tensor_from_rows_lx(const ComplexMatrix& m) {
  Tensor3 t(m.rows / Tensor3::d, m.cols);
  t.entries = m.entries;
  return t;
}

}  // namespace

std::size_t Mps::max_bond() const {
  std::size_t m = 1;
  for (const auto& t : tensors) m = std::max(m, t.chi_r);
  return m;
}

void Mps::check_bonds() const {
  if (tensors.empty()) throw Error("mps: empty chain");
  if (tensors.front().chi_l != 1 || tensors.back().chi_r != 1)
    throw Error("mps: boundary bonds must have dimension 1");
  for (std::size_t i = 0; i + 1 < tensors.size(); ++i) {
    if (tensors[i].chi_r != tensors[i + 1].chi_l)
      throw Error("mps: adjacent bond dimensions do not match");
  }
}

Mps random_mps(std::size_t n, std::size_t chi, Rng& rng) {
  if (n == 0) throw Error("random_mps: n must be >= 1");
  std::vector<std::size_t> bond(n + 1, 1);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t cap = chi;
    if (i < 60) cap = std::min<std::size_t>(cap, std::size_t(1) << i);
    if (n - i < 60) cap = std::min<std::size_t>(cap, std::size_t(1) << (n - i));
    bond[i] = cap;
  }
  Mps mps;
  mps.tensors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Tensor3 t(bond[i], bond[i + 1]);
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(bond[i]));
    for (auto& z : t.entries) z = Complex(rng.normal(), rng.normal()) * scale;
    mps.tensors.push_back(std::move(t));
  }
  return mps;
}

namespace {

// Left-to-right contraction with per-step rescaling; shared by the public
// evaluate wrappers and the trainable wrapper.
template <class TensorAt>
LogAmp contract_log(std::size_t n, const SpinConfig& x, TensorAt&& tensor_at) {
  std::vector<Complex> v{Complex(1, 0)};
  double log_mag = 0.0;
  std::vector<Complex> w;
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor3& t = tensor_at(i);
    const std::size_t x_i = x[i];
    w.assign(t.chi_r, Complex(0, 0));
    for (std::size_t l = 0; l < t.chi_l; ++l) {
      const Complex vl = v[l];
      if (vl == Complex(0, 0)) continue;
      for (std::size_t r = 0; r < t.chi_r; ++r) w[r] += vl * t(l, x_i, r);
    }
    double n2 = 0.0;
    for (const Complex& z : w) n2 += std::norm(z);
    if (n2 == 0.0) return LogAmp{kNegInf, 0.0};
    const double nrm = std::sqrt(n2);
    log_mag += std::log(nrm);
    v.resize(w.size());
    for (std::size_t r = 0; r < w.size(); ++r) v[r] = w[r] / nrm;
  }
  return LogAmp{log_mag, std::atan2(v[0].imag(), v[0].real())};
}

}  // namespace

LogAmp mps_log_evaluate(const Mps& mps, const SpinConfig& x) {
  if (x.size() != mps.n_sites())
    throw Error("mps_evaluate: config length mismatch");
  return contract_log(mps.n_sites(), x,
                      [&](std::size_t i) -> const Tensor3& { return mps.tensors[i]; });
}

Complex mps_evaluate(const Mps& mps, const SpinConfig& x) {
  return mps_log_evaluate(mps, x).amplitude();
}

Mps right_canonicalize(const Mps& mps) {
  mps.check_bonds();
  Mps out = mps;
  const std::size_t n = out.n_sites();
  for (std::size_t i = n; i-- > 1;) {
    // LQ of the (chi_l) x (2 chi_r) matricization via QR of its adjoint.
    QrResult f = qr(dagger(as_rows_l(out.tensors[i])));
    out.tensors[i] = tensor_from_rows_l(dagger(f.q), out.tensors[i].chi_r);
    const ComplexMatrix l_factor = dagger(f.r);  // (chi_l x k)
    out.tensors[i - 1] = tensor_from_rows_lx(
        matmul(as_rows_lx(out.tensors[i - 1]), l_factor));
  }
  // The site-0 LQ leaves a 1x1 positive factor: the global norm. Drop it.
  QrResult f = qr(dagger(as_rows_l(out.tensors[0])));
  const double norm = f.r(0, 0).real();
  if (!(norm > 1e-300))
    throw NumericalError("right_canonicalize: zero-norm state");
  out.tensors[0] = tensor_from_rows_l(dagger(f.q), out.tensors[0].chi_r);
  out.canonical = CanonicalForm::kRight;
  return out;
}

double mps_marginal(const Mps& mps, const SpinConfig& x,
                    std::size_t prefix_len) {
  if (mps.canonical != CanonicalForm::kRight)
    throw Error("mps_marginal: requires right canonical form");
  if (prefix_len > mps.n_sites() || x.size() < prefix_len)
    throw Error("mps_marginal: bad prefix length");
  std::vector<Complex> v{Complex(1, 0)};
  std::vector<Complex> w;
  for (std::size_t i = 0; i < prefix_len; ++i) {
    const Tensor3& t = mps.tensors[i];
    w.assign(t.chi_r, Complex(0, 0));
    for (std::size_t l = 0; l < t.chi_l; ++l)
      for (std::size_t r = 0; r < t.chi_r; ++r) w[r] += v[l] * t(l, x[i], r);
    v = w;
  }
  double q = 0.0;
  for (const Complex& z : v) q += std::norm(z);
  return q;
}

SpinConfig mps_sample(const Mps& mps, Rng& rng) {
  if (mps.canonical != CanonicalForm::kRight)
    throw Error("mps_sample: requires right canonical form");
  const std::size_t n = mps.n_sites();
  SpinConfig x(n);
  std::vector<Complex> v{Complex(1, 0)};
  std::vector<Complex> w0, w1;
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor3& t = mps.tensors[i];
    w0.assign(t.chi_r, Complex(0, 0));
    w1.assign(t.chi_r, Complex(0, 0));
    for (std::size_t l = 0; l < t.chi_l; ++l) {
      for (std::size_t r = 0; r < t.chi_r; ++r) {
        w0[r] += v[l] * t(l, 0, r);
        w1[r] += v[l] * t(l, 1, r);
      }
    }
    double q0 = 0.0, q1 = 0.0;
    for (const Complex& z : w0) q0 += std::norm(z);
    for (const Complex& z : w1) q1 += std::norm(z);
    const double p0 = q0 / (q0 + q1);
    const bool pick1 = rng.uniform() >= p0;
    x[i] = pick1 ? 1 : 0;
    std::vector<Complex>& w = pick1 ? w1 : w0;
    const double nrm = std::sqrt(pick1 ? q1 : q0);
    v.resize(w.size());
    for (std::size_t r = 0; r < w.size(); ++r) v[r] = w[r] / nrm;
  }
  return x;
}

MpsWavefunction::MpsWavefunction(const Mps& mps) : canonical_(mps.canonical) {
  mps.check_bonds();
  for (std::size_t i = 0; i < mps.n_sites(); ++i) {
    const Tensor3& t = mps.tensors[i];
    std::vector<double> re(t.entries.size()), im(t.entries.size());
    for (std::size_t k = 0; k < t.entries.size(); ++k) {
      re[k] = t.entries[k].real();
      im[k] = t.entries[k].imag();
    }
    const std::string tag = "t" + std::to_string(i);
    SiteShape s;
    s.chi_l = t.chi_l;
    s.chi_r = t.chi_r;
    s.re = params_.add_block(tag + ".re", re);
    s.im = params_.add_block(tag + ".im", im);
    shape_.push_back(s);
  }
}

Mps MpsWavefunction::to_mps() const {
  Mps mps;
  for (const auto& s : shape_) {
    Tensor3 t(s.chi_l, s.chi_r);
    auto re = params_.block_values(s.re);
    auto im = params_.block_values(s.im);
    for (std::size_t k = 0; k < t.entries.size(); ++k)
      t.entries[k] = Complex(re[k], im[k]);
    mps.tensors.push_back(std::move(t));
  }
  mps.canonical = canonical_;
  return mps;
}

LogAmp MpsWavefunction::log_amplitude(const SpinConfig& x) const {
  if (x.size() != shape_.size())
    throw Error("mps log_amplitude: config length mismatch");
  std::vector<Complex> v{Complex(1, 0)};
  double log_mag = 0.0;
  std::vector<Complex> w;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    const SiteShape& s = shape_[i];
    auto re = params_.block_values(s.re);
    auto im = params_.block_values(s.im);
    const std::size_t x_i = x[i];
    w.assign(s.chi_r, Complex(0, 0));
    for (std::size_t l = 0; l < s.chi_l; ++l) {
      const std::size_t base = (l * Tensor3::d + x_i) * s.chi_r;
      for (std::size_t r = 0; r < s.chi_r; ++r)
        w[r] += v[l] * Complex(re[base + r], im[base + r]);
    }
    double n2 = 0.0;
    for (const Complex& z : w) n2 += std::norm(z);
    if (n2 == 0.0) return LogAmp{kNegInf, 0.0};
    const double nrm = std::sqrt(n2);
    log_mag += std::log(nrm);
    v.resize(w.size());
    for (std::size_t r = 0; r < w.size(); ++r) v[r] = w[r] / nrm;
  }
  return LogAmp{log_mag, std::atan2(v[0].imag(), v[0].real())};
}

SpinConfig MpsWavefunction::sample(Rng& rng) const {
  return mps_sample(to_mps(), rng);
}

TapeLogAmp MpsWavefunction::log_amplitude_tape(Tape& tape,
                                               const SpinConfig& x) const {
  if (x.size() != shape_.size())
    throw Error("mps log_amplitude_tape: config length mismatch");
  std::vector<CNode> v{cconst(tape, Complex(1, 0))};
  Node log_mag = tape.constant(0.0);
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    const SiteShape& s = shape_[i];
    const std::size_t off_re = params_.block_offset(s.re);
    const std::size_t off_im = params_.block_offset(s.im);
    const std::size_t x_i = x[i];
    std::vector<CNode> w(s.chi_r);
    for (std::size_t r = 0; r < s.chi_r; ++r) {
      CNode acc = cconst(tape, Complex(0, 0));
      for (std::size_t l = 0; l < s.chi_l; ++l) {
        const std::size_t k = (l * Tensor3::d + x_i) * s.chi_r + r;
        CNode entry{tape.param(off_re + k), tape.param(off_im + k)};
        acc = cadd(tape, acc, cmul(tape, v[l], entry));
      }
      w[r] = acc;
    }
    Node n2 = cnorm2(tape, w[0]);
    for (std::size_t r = 1; r < w.size(); ++r)
      n2 = tape.add(n2, cnorm2(tape, w[r]));
    if (tape.value(n2) == 0.0) return TapeLogAmp{{}, {}, true};
    log_mag = tape.axpby(1.0, log_mag, 0.5, tape.log_(n2));
    const Node nrm = tape.sqrt_(n2);
    v.resize(w.size());
    for (std::size_t r = 0; r < w.size(); ++r)
      v[r] = CNode{tape.div(w[r].re, nrm), tape.div(w[r].im, nrm)};
  }
  return TapeLogAmp{log_mag, tape.atan2_(v[0].im, v[0].re), false};
}

}  // namespace antn
