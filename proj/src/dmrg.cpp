#include "antn/dmrg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "antn/lanczos.hpp"

namespace antn {

namespace {

// The J1-J2 MPO is real and its ground state can be taken real, so the
// whole sweep engine runs in real arithmetic; the result is converted to
// the complex Mps type at the end.

using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>;
using MapMat = Eigen::Map<RMat>;
using ConstMapMat = Eigen::Map<const RMat>;

// Real rank-3 site tensor (chi_l, 2, chi_r), row-major.
struct RTensor {
  std::size_t chi_l = 0, chi_r = 0;
  std::vector<double> entries;
  RTensor() = default;
  RTensor(std::size_t l, std::size_t r) : chi_l(l), chi_r(r), entries(l * 2 * r, 0.0) {}
};

// Left environment at site i: (chi_bra * D, chi_ket) over sites < i, rows
// grouped (alpha_bra, mpo_bond). Right environment at site i:
// (D * chi_ket, chi_bra) over sites > i, rows grouped (mpo_bond, alpha_ket).
struct Env {
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  MapMat map() { return MapMat(data.data(), rows, cols); }
  ConstMapMat map() const { return ConstMapMat(data.data(), rows, cols); }
  void resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    data.assign(r * c, 0.0);
  }
};

// out(P, R, Q) = sum_K m(R, K) * in(P, K, Q) for contiguous (P, K, Q).
void contract_middle(const std::vector<double>& in, std::size_t p,
                     std::size_t k, std::size_t q, const RMat& m,
                     std::vector<double>& out) {
  const std::size_t r = static_cast<std::size_t>(m.rows());
  out.assign(p * r * q, 0.0);
  for (std::size_t ip = 0; ip < p; ++ip) {
    ConstMapMat in_slice(in.data() + ip * k * q, k, q);
    MapMat(out.data() + ip * r * q, r, q).noalias() = m * in_slice;
  }
}

// W reshaped to (s_out * dr, dl * s_in), the form contract_middle wants.
RMat mpo_as_out_matrix(const MpoTensor& w) {
  RMat m(2 * w.dr, w.dl * 2);
  for (std::size_t l = 0; l < w.dl; ++l)
    for (std::size_t so = 0; so < 2; ++so)
      for (std::size_t si = 0; si < 2; ++si)
        for (std::size_t r = 0; r < w.dr; ++r)
          m(so * w.dr + r, l * 2 + si) = w.at(l, so, si, r);
  return m;
}

struct TwoSiteWorkspace {
  std::vector<double> x1, x2, x3;
};

void apply_heff(const Env& lenv, const RMat& w1m, const RMat& w2m,
                std::size_t d1, std::size_t d2, const Env& renv,
                std::size_t al, std::size_t ar, const std::vector<double>& theta,
                std::vector<double>& out, TwoSiteWorkspace& ws) {
  ws.x1.resize(lenv.rows * 4 * ar);
  MapMat(ws.x1.data(), lenv.rows, 4 * ar).noalias() =
      lenv.map() * ConstMapMat(theta.data(), al, 4 * ar);
  contract_middle(ws.x1, al, d1 * 2, 2 * ar, w1m, ws.x2);
  contract_middle(ws.x2, al * 2, d2 * 2, ar, w2m, ws.x3);
  out.resize(al * 4 * renv.cols);
  MapMat(out.data(), al * 4, renv.cols).noalias() =
      ConstMapMat(ws.x3.data(), al * 4, ws.x3.size() / (al * 4)) * renv.map();
}

Env advance_left(const Env& lenv, const RTensor& a, const MpoTensor& w) {
  const std::size_t cl = a.chi_l, cr = a.chi_r;
  std::vector<double> y(lenv.rows * 2 * cr);
  MapMat(y.data(), lenv.rows, 2 * cr).noalias() =
      lenv.map() * ConstMapMat(a.entries.data(), cl, 2 * cr);
  std::vector<double> z;
  contract_middle(y, cl, w.dl * 2, cr, mpo_as_out_matrix(w), z);
  Env out;
  out.resize(cr * w.dr, cr);
  MapMat(out.data.data(), cr, w.dr * cr).noalias() =
      ConstMapMat(a.entries.data(), cl * 2, cr).transpose() *
      ConstMapMat(z.data(), cl * 2, w.dr * cr);
  return out;
}

Env advance_right(const Env& renv, const RTensor& b, const MpoTensor& w) {
  const std::size_t cl = b.chi_l;
  const std::size_t brb = renv.cols;
  const std::size_t brk = renv.rows / w.dr;
  std::vector<double> t(w.dr * cl * 2 * brb);
  for (std::size_t d = 0; d < w.dr; ++d) {
    ConstMapMat rd(renv.data.data() + d * brk * brb, brk, brb);
    MapMat(t.data() + d * cl * 2 * brb, cl * 2, brb).noalias() =
        ConstMapMat(b.entries.data(), cl * 2, b.chi_r) * rd;
  }
  std::vector<double> t2(w.dr * 2 * cl * brb);
  for (std::size_t d = 0; d < w.dr; ++d)
    for (std::size_t l = 0; l < cl; ++l)
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t q = 0; q < brb; ++q)
          t2[((d * 2 + s) * cl + l) * brb + q] =
              t[((d * cl + l) * 2 + s) * brb + q];
  RMat wm(w.dl * 2, w.dr * 2);
  for (std::size_t l = 0; l < w.dl; ++l)
    for (std::size_t so = 0; so < 2; ++so)
      for (std::size_t si = 0; si < 2; ++si)
        for (std::size_t r = 0; r < w.dr; ++r)
          wm(l * 2 + so, r * 2 + si) = w.at(l, so, si, r);
  std::vector<double> x(w.dl * 2 * cl * brb);
  MapMat(x.data(), w.dl * 2, cl * brb).noalias() =
      wm * ConstMapMat(t2.data(), w.dr * 2, cl * brb);
  std::vector<double> x2(w.dl * cl * 2 * brb);
  for (std::size_t c = 0; c < w.dl; ++c)
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t l = 0; l < cl; ++l)
        for (std::size_t q = 0; q < brb; ++q)
          x2[((c * cl + l) * 2 + s) * brb + q] =
              x[((c * 2 + s) * cl + l) * brb + q];
  Env out;
  out.resize(w.dl * cl, cl);
  out.map().noalias() = ConstMapMat(x2.data(), w.dl * cl, 2 * brb) *
                        ConstMapMat(b.entries.data(), cl, 2 * brb).transpose();
  return out;
}

double real_expectation(const Mpo& mpo, const std::vector<RTensor>& tensors) {
  Env env;
  env.resize(1, 1);
  env.data[0] = 1.0;
  for (std::size_t i = 0; i < tensors.size(); ++i)
    env = advance_left(env, tensors[i], mpo.tensors[i]);
  return env.data[0];
}

// Right canonicalization of the real chain via LQ steps (QR of transposes);
// drops the global norm.
void right_canonicalize_real(std::vector<RTensor>& t) {
  const std::size_t n = t.size();
  for (std::size_t i = n; i-- > 1;) {
    ConstMapMat a(t[i].entries.data(), t[i].chi_l, 2 * t[i].chi_r);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a.transpose());
    const Eigen::Index k = std::min(a.rows(), a.cols());
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.cols(), k);
    Eigen::MatrixXd r =
        qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (Eigen::Index d = 0; d < k; ++d) {
      if (r(d, d) < 0) {
        r.row(d) *= -1;
        q.col(d) *= -1;
      }
    }
    RTensor nt(static_cast<std::size_t>(k), t[i].chi_r);
    MapMat(nt.entries.data(), k, 2 * t[i].chi_r) = q.transpose();
    // absorb L = r^T into the left neighbour
    RTensor prev(t[i - 1].chi_l, static_cast<std::size_t>(k));
    MapMat(prev.entries.data(), prev.chi_l * 2, k).noalias() =
        ConstMapMat(t[i - 1].entries.data(), t[i - 1].chi_l * 2, t[i - 1].chi_r) *
        r.transpose();
    t[i] = std::move(nt);
    t[i - 1] = std::move(prev);
  }
  double norm2 = 0;
  for (double v : t[0].entries) norm2 += v * v;
  if (!(norm2 > 1e-300))
    throw NumericalError("dmrg: zero-norm state during canonicalization");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : t[0].entries) v *= inv;
}

}  // namespace

double mpo_expectation(const Mpo& mpo, const Mps& mps) {
  // Complex-MPS variant used by tests and callers outside the sweep engine.
  const std::size_t n = mps.n_sites();
  std::vector<Complex> env{Complex(1, 0)};  // (chi_bra * D, chi_ket), D=1 cut 0
  std::size_t rows = 1, cols = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor3& a = mps.tensors[i];
    const MpoTensor& w = mpo.tensors[i];
    // y(al~ d, s br) = env * A
    std::vector<Complex> y(rows * 2 * a.chi_r, Complex(0, 0));
    for (std::size_t rr = 0; rr < rows; ++rr)
      for (std::size_t cc = 0; cc < cols; ++cc)
        for (std::size_t sb = 0; sb < 2 * a.chi_r; ++sb)
          y[rr * 2 * a.chi_r + sb] +=
              env[rr * cols + cc] * a.entries[cc * 2 * a.chi_r + sb];
    // z(al~, s~ b, br) via W
    const std::size_t cl = a.chi_l, cr = a.chi_r;
    std::vector<Complex> z(cl * 2 * w.dr * cr, Complex(0, 0));
    for (std::size_t p = 0; p < cl; ++p)
      for (std::size_t so = 0; so < 2; ++so)
        for (std::size_t b = 0; b < w.dr; ++b)
          for (std::size_t d = 0; d < w.dl; ++d)
            for (std::size_t si = 0; si < 2; ++si) {
              const double wv = w.at(d, so, si, b);
              if (wv == 0.0) continue;
              for (std::size_t q = 0; q < cr; ++q)
                z[((p * 2 + so) * w.dr + b) * cr + q] +=
                    wv * y[(p * w.dl + d) * 2 * cr + si * cr + q];
            }
    // env'(br~ b, br) = conj(A)^T * z
    std::vector<Complex> nenv(cr * w.dr * cr, Complex(0, 0));
    for (std::size_t ps = 0; ps < cl * 2; ++ps)
      for (std::size_t e = 0; e < cr; ++e) {
        const Complex av = std::conj(a.entries[ps * cr + e]);
        if (av == Complex(0, 0)) continue;
        for (std::size_t f = 0; f < w.dr * cr; ++f)
          nenv[e * w.dr * cr + f] += av * z[ps * w.dr * cr + f];
      }
    env = std::move(nenv);
    rows = cr * w.dr;
    cols = cr;
  }
  return env[0].real();
}

DmrgResult dmrg_ground_state(const Mpo& mpo, const DmrgOptions& opt) {
  const std::size_t n = mpo.n_sites();
  if (n < 2) throw Error("dmrg: need at least 2 sites");
  if (opt.chi_max < 1 || opt.n_sweeps < 1)
    throw ConfigError("dmrg: chi_max and n_sweeps must be >= 1");

  Rng rng(opt.seed);
  std::vector<RTensor> mps;
  for (std::size_t i = 0; i < n; ++i) {
    RTensor t(1, 1);
    t.entries[0] = rng.normal();
    t.entries[1] = rng.normal();
    mps.push_back(std::move(t));
  }
  right_canonicalize_real(mps);

  std::vector<Env> lenv(n), renv(n);
  lenv[0].resize(1, 1);
  lenv[0].data[0] = 1.0;
  renv[n - 1].resize(1, 1);
  renv[n - 1].data[0] = 1.0;
  for (std::size_t i = n - 1; i-- > 0;)
    renv[i] = advance_right(renv[i + 1], mps[i + 1], mpo.tensors[i + 1]);

  DmrgResult result;
  TwoSiteWorkspace ws;

  auto update_pair = [&](std::size_t i, bool moving_right, std::size_t sweep,
                         std::size_t chi_cap) {
    const std::size_t al = mps[i].chi_l, ar = mps[i + 1].chi_r;

    std::vector<double> theta(al * 4 * ar);
    MapMat(theta.data(), al * 2, 2 * ar).noalias() =
        ConstMapMat(mps[i].entries.data(), al * 2, mps[i].chi_r) *
        ConstMapMat(mps[i + 1].entries.data(), mps[i + 1].chi_l, 2 * ar);

    const RMat w1m = mpo_as_out_matrix(mpo.tensors[i]);
    const RMat w2m = mpo_as_out_matrix(mpo.tensors[i + 1]);
    auto matvec = [&](const std::vector<double>& v, std::vector<double>& out) {
      apply_heff(lenv[i], w1m, w2m, mpo.tensors[i].dl, mpo.tensors[i].dr,
                 renv[i + 1], al, ar, v, out, ws);
    };
    auto eig = lanczos_lowest<double>(al * 4 * ar, matvec, theta,
                                      opt.lanczos_max_iter, opt.lanczos_tol);
    if (!eig.converged) {
      throw NumericalError("dmrg: eigensolver did not converge at sweep " +
                           std::to_string(sweep) + ", sites (" +
                           std::to_string(i) + "," + std::to_string(i + 1) +
                           ")");
    }

    // Decaying rank-injection noise; off for the final two sweeps. Plain
    // two-site updates stall in local minima on these frustrated chains.
    double amp = 0.0;
    if (opt.noise_initial > 0 && sweep + 2 < opt.n_sweeps && sweep < 4)
      amp = opt.noise_initial * std::pow(10.0, -static_cast<double>(sweep));
    if (amp > 0) {
      const double scale = amp / std::sqrt(static_cast<double>(eig.vector.size()));
      for (double& v : eig.vector) v += scale * rng.normal();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        ConstMapMat(eig.vector.data(), al * 2, 2 * ar),
        Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    std::size_t keep = std::min<std::size_t>(chi_cap, sv.size());
    while (keep > 1 && sv(keep - 1) < opt.svd_cutoff * sv(0)) --keep;
    double dw = 0.0, kept2 = 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (static_cast<std::size_t>(k) < keep) kept2 += sv(k) * sv(k);
      else dw += sv(k) * sv(k);
    }
    result.discarded_weights.push_back(dw);
    const double s_scale = 1.0 / std::sqrt(kept2);

    RTensor a(al, keep), b(keep, ar);
    if (moving_right) {
      MapMat(a.entries.data(), al * 2, keep) = svd.matrixU().leftCols(keep);
      MapMat(b.entries.data(), keep, 2 * ar) =
          (sv.head(keep) * s_scale).asDiagonal() *
          svd.matrixV().leftCols(keep).transpose();
    } else {
      MapMat(a.entries.data(), al * 2, keep) =
          svd.matrixU().leftCols(keep) * (sv.head(keep) * s_scale).asDiagonal();
      MapMat(b.entries.data(), keep, 2 * ar) =
          svd.matrixV().leftCols(keep).transpose();
    }
    mps[i] = std::move(a);
    mps[i + 1] = std::move(b);

    if (moving_right) {
      lenv[i + 1] = advance_left(lenv[i], mps[i], mpo.tensors[i]);
    } else {
      renv[i] = advance_right(renv[i + 1], mps[i + 1], mpo.tensors[i + 1]);
    }
  };

  for (std::size_t sweep = 0; sweep < opt.n_sweeps; ++sweep) {
    // Bond growth schedule: cheap early sweeps, full chi afterwards.
    const std::size_t chi_cap =
        std::min<std::size_t>(opt.chi_max, std::size_t(8) << sweep);
    for (std::size_t i = 0; i + 1 < n; ++i)
      update_pair(i, true, sweep, chi_cap);
    for (std::size_t i = n - 1; i-- > 0;)
      update_pair(i, false, sweep, chi_cap);
    // Energy of the actual (truncated, renormalized) state after the sweep;
    // this keeps the record an honest variational value.
    result.sweep_energies.push_back(real_expectation(mpo, mps));
    const std::size_t m = result.sweep_energies.size();
    if (m >= 2 && chi_cap == opt.chi_max) {
      const double delta =
          std::abs(result.sweep_energies[m - 1] - result.sweep_energies[m - 2]);
      if (delta < opt.sweep_tol *
                      std::max(1.0, std::abs(result.sweep_energies.back())))
        break;
    }
  }

  // Convert to the complex chain type and gauge it.
  Mps out;
  for (const RTensor& t : mps) {
    Tensor3 c(t.chi_l, t.chi_r);
    for (std::size_t k = 0; k < t.entries.size(); ++k)
      c.entries[k] = Complex(t.entries[k], 0.0);
    out.tensors.push_back(std::move(c));
  }
  result.mps = right_canonicalize(out);
  result.energy = mpo_expectation(mpo, result.mps);
  return result;
}

}  // namespace antn
