#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "antn/mps.hpp"

using namespace antn;

namespace {

// chi=1 product state |00...0>: T_i(0)=1, T_i(1)=0.
Mps product_state_zeros(std::size_t n) {
  Mps mps;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor3 t(1, 1);
    t(0, 0, 0) = Complex(1, 0);
    mps.tensors.push_back(t);
  }
  return mps;
}

// Unnormalized GHZ: amplitude 1 on all-zeros and all-ones, 0 elsewhere.
Mps ghz(std::size_t n) {
  Mps mps;
  Tensor3 first(1, 2);
  first(0, 0, 0) = Complex(1, 0);
  first(0, 1, 1) = Complex(1, 0);
  mps.tensors.push_back(first);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    Tensor3 mid(2, 2);
    mid(0, 0, 0) = Complex(1, 0);
    mid(1, 1, 1) = Complex(1, 0);
    mps.tensors.push_back(mid);
  }
  Tensor3 last(2, 1);
  last(0, 0, 0) = Complex(1, 0);
  last(1, 1, 0) = Complex(1, 0);
  mps.tensors.push_back(last);
  return mps;
}

// Brute-force amplitude: explicit sum over all bond index paths.
Complex brute_force_amplitude(const Mps& mps, const SpinConfig& x) {
  const std::size_t n = mps.n_sites();
  Complex total(0, 0);
  std::vector<std::size_t> alpha(n + 1, 0);  // alpha[0] = alpha[n] = 0
  std::function<void(std::size_t, Complex)> walk = [&](std::size_t i,
                                                       Complex acc) {
    if (i == n) {
      total += acc;
      return;
    }
    const Tensor3& t = mps.tensors[i];
    for (std::size_t r = 0; r < t.chi_r; ++r) {
      const Complex v = t(alpha[i], x[i], r);
      if (v == Complex(0, 0)) continue;
      alpha[i + 1] = r;
      walk(i + 1, acc * v);
    }
  };
  walk(0, Complex(1, 0));
  return total;
}

double enumeration_norm2(const Mps& mps) {
  const std::size_t n = mps.n_sites();
  double sum = 0.0;
  for (std::uint64_t v = 0; v < (1ull << n); ++v)
    sum += std::norm(mps_evaluate(mps, SpinConfig::from_index(v, n)));
  return sum;
}

}  // namespace

TEST_CASE("evaluate: product state hits all-zeros only") {
  Mps mps = product_state_zeros(5);
  CHECK(mps_evaluate(mps, SpinConfig::from_index(0, 5)) == Complex(1, 0));
  CHECK(mps_evaluate(mps, SpinConfig::from_index(3, 5)) == Complex(0, 0));
  CHECK(mps_log_evaluate(mps, SpinConfig::from_index(3, 5)).is_zero());
}

TEST_CASE("evaluate: GHZ amplitudes, canonicalized to 1/sqrt(2)") {
  const std::size_t n = 4;
  Mps raw = ghz(n);
  for (std::uint64_t v = 0; v < (1ull << n); ++v) {
    const Complex a = mps_evaluate(raw, SpinConfig::from_index(v, n));
    const bool edge = (v == 0) || (v == (1ull << n) - 1);
    CHECK(std::abs(a - (edge ? Complex(1, 0) : Complex(0, 0))) < 1e-14);
  }
  Mps canon = right_canonicalize(raw);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(mps_evaluate(canon, SpinConfig::from_index(0, n)) - r) < 1e-12);
  CHECK(std::abs(mps_evaluate(canon, SpinConfig::from_index(15, n)) - r) < 1e-12);
}

TEST_CASE("evaluate: random chi=3 n=6 matches brute-force path sum") {
  Rng rng(5);
  Mps mps = random_mps(6, 3, rng);
  for (std::uint64_t v : {0ull, 17ull, 42ull, 63ull}) {
    SpinConfig x = SpinConfig::from_index(v, 6);
    const Complex fast = mps_evaluate(mps, x);
    const Complex slow = brute_force_amplitude(mps, x);
    CHECK(std::abs(fast - slow) < 1e-12 * std::max(1.0, std::abs(slow)));
  }
}

TEST_CASE("right_canonicalize: normalizes and satisfies the gauge condition") {
  Rng rng(9);
  Mps mps = right_canonicalize(random_mps(6, 4, rng));
  CHECK(enumeration_norm2(mps) == doctest::Approx(1.0).epsilon(1e-10));
  // gauge condition per site: sum_{x,r} T[l,x,r] conj(T[l',x,r]) = delta
  for (const Tensor3& t : mps.tensors) {
    for (std::size_t l = 0; l < t.chi_l; ++l) {
      for (std::size_t lp = 0; lp < t.chi_l; ++lp) {
        Complex acc(0, 0);
        for (std::size_t x = 0; x < 2; ++x)
          for (std::size_t r = 0; r < t.chi_r; ++r)
            acc += t(l, x, r) * std::conj(t(lp, x, r));
        const Complex expect = l == lp ? Complex(1, 0) : Complex(0, 0);
        CHECK(std::abs(acc - expect) < 1e-10);
      }
    }
  }
}

TEST_CASE("right_canonicalize: idempotent on amplitudes") {
  Rng rng(15);
  Mps canon = right_canonicalize(random_mps(5, 3, rng));
  Mps again = right_canonicalize(canon);
  for (std::uint64_t v = 0; v < 32; ++v) {
    SpinConfig x = SpinConfig::from_index(v, 5);
    CHECK(std::abs(mps_evaluate(canon, x) - mps_evaluate(again, x)) < 1e-12);
  }
}

TEST_CASE("right_canonicalize: scale invariance (GHZ scaled by 7)") {
  Mps a = ghz(4);
  Mps b = ghz(4);
  for (auto& z : b.tensors[1].entries) z *= 7.0;
  Mps ca = right_canonicalize(a);
  Mps cb = right_canonicalize(b);
  for (std::uint64_t v = 0; v < 16; ++v) {
    SpinConfig x = SpinConfig::from_index(v, 4);
    CHECK(std::abs(mps_evaluate(ca, x) - mps_evaluate(cb, x)) < 1e-12);
  }
}

TEST_CASE("right_canonicalize: amplitude ratios preserved") {
  Rng rng(21);
  Mps raw = random_mps(5, 4, rng);
  Mps canon = right_canonicalize(raw);
  SpinConfig ref = SpinConfig::from_index(7, 5);
  const Complex r0 = mps_evaluate(raw, ref);
  const Complex c0 = mps_evaluate(canon, ref);
  for (std::uint64_t v = 0; v < 32; ++v) {
    SpinConfig x = SpinConfig::from_index(v, 5);
    const Complex ratio_raw = mps_evaluate(raw, x) / r0;
    const Complex ratio_canon = mps_evaluate(canon, x) / c0;
    CHECK(std::abs(ratio_raw - ratio_canon) < 1e-10);
  }
}

TEST_CASE("right_canonicalize: zero state rejected") {
  Mps mps = product_state_zeros(3);
  for (auto& t : mps.tensors) t.entries.assign(t.entries.size(), Complex(0, 0));
  CHECK_THROWS_AS(right_canonicalize(mps), NumericalError);
}

TEST_CASE("marginal: full prefix equals |psi|^2; GHZ half-prefix is 1/2") {
  Mps canon = right_canonicalize(ghz(4));
  SpinConfig x = SpinConfig::from_index(0, 4);
  CHECK(mps_marginal(canon, x, 4) ==
        doctest::Approx(std::norm(mps_evaluate(canon, x))).epsilon(1e-12));
  CHECK(mps_marginal(canon, x, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("marginal: all prefixes match enumeration sums") {
  Rng rng(25);
  const std::size_t n = 6;
  Mps canon = right_canonicalize(random_mps(n, 3, rng));
  for (std::uint64_t v : {0ull, 9ull, 33ull, 63ull}) {
    SpinConfig x = SpinConfig::from_index(v, n);
    for (std::size_t j = 1; j <= n; ++j) {
      double sum = 0.0;
      for (std::uint64_t rest = 0; rest < (1ull << (n - j)); ++rest) {
        SpinConfig y = x;
        for (std::size_t k = j; k < n; ++k) y[k] = (rest >> (k - j)) & 1u;
        sum += std::norm(mps_evaluate(canon, y));
      }
      CHECK(mps_marginal(canon, x, j) == doctest::Approx(sum).epsilon(1e-10));
    }
  }
}

TEST_CASE("marginal and sample require canonical form") {
  Rng rng(27);
  Mps raw = random_mps(4, 2, rng);
  CHECK_THROWS_AS(mps_marginal(raw, SpinConfig(4), 2), Error);
  CHECK_THROWS_AS(mps_sample(raw, rng), Error);
}

TEST_CASE("sample: product state is deterministic") {
  Mps canon = right_canonicalize(product_state_zeros(5));
  Rng rng(1);
  for (int k = 0; k < 10; ++k)
    CHECK(mps_sample(canon, rng).to_index() == 0);
}

TEST_CASE("sample: GHZ frequencies within binomial bounds, support exact") {
  Mps canon = right_canonicalize(ghz(6));
  Rng rng(33);
  const int n_samples = 100000;
  int zeros = 0;
  for (int k = 0; k < n_samples; ++k) {
    const std::uint64_t v = mps_sample(canon, rng).to_index();
    REQUIRE((v == 0 || v == 63));
    zeros += v == 0;
  }
  // 5 sigma of Binomial(1e5, 1/2) is ~0.0079
  CHECK(std::abs(zeros / double(n_samples) - 0.5) < 0.01);
}

TEST_CASE("sample: TV distance to enumerated distribution < 0.02") {
  Rng rng(37);
  const std::size_t n = 6;
  Mps canon = right_canonicalize(random_mps(n, 3, rng));
  std::vector<double> p(1 << n);
  for (std::uint64_t v = 0; v < (1ull << n); ++v)
    p[v] = std::norm(mps_evaluate(canon, SpinConfig::from_index(v, n)));
  std::vector<double> freq(1 << n, 0.0);
  const int n_samples = 100000;
  Rng srng(41);
  for (int k = 0; k < n_samples; ++k)
    freq[mps_sample(canon, srng).to_index()] += 1.0 / n_samples;
  double tv = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) tv += std::abs(p[v] - freq[v]);
  CHECK(tv / 2 < 0.02);
}

TEST_CASE("conditional chain: product of conditionals equals |psi|^2") {
  Rng rng(43);
  const std::size_t n = 6;
  Mps canon = right_canonicalize(random_mps(n, 3, rng));
  for (std::uint64_t v : {1ull, 20ull, 55ull}) {
    SpinConfig x = SpinConfig::from_index(v, n);
    double logq = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double qj = mps_marginal(canon, x, j);
      const double qprev = j == 1 ? 1.0 : mps_marginal(canon, x, j - 1);
      logq += std::log(qj / qprev);
    }
    CHECK(std::exp(logq) ==
          doctest::Approx(std::norm(mps_evaluate(canon, x))).epsilon(1e-9));
  }
}
