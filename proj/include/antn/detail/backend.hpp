#pragma once

// Two interchangeable evaluation backends: PlainBackend computes doubles,
// TapeBackend records the same arithmetic on a gradient tape. Model
// evaluation code is written once against this interface so the value and
// gradient paths cannot drift apart.

#include <cmath>
#include <span>

#include "antn/grad.hpp"

namespace antn::detail {

struct PlainBackend {
  using R = double;
  const double* params;

  explicit PlainBackend(const ParamStore& ps)
      : params(ps.flat_values().data()) {}

  R c(double v) const { return v; }
  R param(std::size_t gi) const { return params[gi]; }
  // row layout [w_0 .. w_{len-1}, bias]
  R dot(std::size_t row, const R* in, std::size_t len) const {
    double acc = params[row + len];
    for (std::size_t k = 0; k < len; ++k) acc += params[row + k] * in[k];
    return acc;
  }
  R add(R a, R b) const { return a + b; }
  R sub(R a, R b) const { return a - b; }
  R mul(R a, R b) const { return a * b; }
  R div(R a, R b) const { return a / b; }
  R neg(R a) const { return -a; }
  R tanh_(R a) const { return std::tanh(a); }
  R log_(R a) const { return std::log(a); }
  R sqrt_(R a) const { return std::sqrt(a); }
  R softplus(R a) const {
    return a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  }
  R atan2_(R y, R x) const { return std::atan2(y, x); }
  double value(R v) const { return v; }
};

struct TapeBackend {
  using R = Node;
  Tape& t;

  explicit TapeBackend(Tape& tape) : t(tape) {}

  R c(double v) const { return t.constant(v); }
  R param(std::size_t gi) const { return t.param(gi); }
  R dot(std::size_t row, const R* in, std::size_t len) const {
    return t.dot(row, std::span<const Node>(in, len));
  }
  R add(R a, R b) const { return t.add(a, b); }
  R sub(R a, R b) const { return t.sub(a, b); }
  R mul(R a, R b) const { return t.mul(a, b); }
  R div(R a, R b) const { return t.div(a, b); }
  R neg(R a) const { return t.neg(a); }
  R tanh_(R a) const { return t.tanh_(a); }
  R log_(R a) const { return t.log_(a); }
  R sqrt_(R a) const { return t.sqrt_(a); }
  R softplus(R a) const { return t.softplus(a); }
  R atan2_(R y, R x) const { return t.atan2_(y, x); }
  double value(R v) const { return t.value(v); }
};

/// Complex value over a backend: a (re, im) pair of backend scalars.
template <class B>
struct Cx {
  typename B::R re, im;
};

template <class B>
Cx<B> cx_add(const B& b, Cx<B> x, Cx<B> y) {
  return {b.add(x.re, y.re), b.add(x.im, y.im)};
}
template <class B>
Cx<B> cx_mul(const B& b, Cx<B> x, Cx<B> y) {
  return {b.sub(b.mul(x.re, y.re), b.mul(x.im, y.im)),
          b.add(b.mul(x.re, y.im), b.mul(x.im, y.re))};
}
template <class B>
typename B::R cx_norm2(const B& b, Cx<B> x) {
  return b.add(b.mul(x.re, x.re), b.mul(x.im, x.im));
}
template <class B>
Cx<B> cx_scale(const B& b, typename B::R s, Cx<B> x) {
  return {b.mul(s, x.re), b.mul(s, x.im)};
}

}  // namespace antn::detail
