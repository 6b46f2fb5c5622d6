#pragma once

#include "lvr/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace lvr {

// Truncated power series sum_{n < size()} c_n x^n.
//
// Every binary operation returns a series whose length is the minimum of the
// operand lengths, so the order-n coefficient of a result never reads input
// coefficients beyond order n.
template <class Scalar>
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::vector<Scalar> coeffs, std::string variable = "lambda")
      : coeffs_(std::move(coeffs)), variable_(std::move(variable)) {}

  static PowerSeries constant(const Scalar& c, std::size_t length,
                              std::string variable = "lambda") {
    std::vector<Scalar> v(length, Scalar(0));
    if (length > 0) v[0] = c;
    return PowerSeries(std::move(v), std::move(variable));
  }

  // The series x itself, truncated to `length` coefficients.
  static PowerSeries identity(std::size_t length, std::string variable = "lambda") {
    std::vector<Scalar> v(length, Scalar(0));
    if (length > 1) v[1] = Scalar(1);
    return PowerSeries(std::move(v), std::move(variable));
  }

  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  const std::vector<Scalar>& coeffs() const { return coeffs_; }
  const std::string& variable() const { return variable_; }
  const Scalar& operator[](std::size_t n) const { return coeffs_.at(n); }
  Scalar& operator[](std::size_t n) { return coeffs_.at(n); }

  PowerSeries truncated(std::size_t length) const {
    std::vector<Scalar> v(coeffs_.begin(),
                          coeffs_.begin() + std::min(length, coeffs_.size()));
    return PowerSeries(std::move(v), variable_);
  }

  PowerSeries operator-() const {
    PowerSeries r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::vector<Scalar> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a.coeffs_[i] + b.coeffs_[i];
    return PowerSeries(std::move(v), a.variable_);
  }

  friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) { return a + (-b); }

  friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::vector<Scalar> v(n, Scalar(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (a.coeffs_[i] == Scalar(0)) continue;
      for (std::size_t j = 0; i + j < n; ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
    return PowerSeries(std::move(v), a.variable_);
  }

  PowerSeries scaled(const Scalar& s) const {
    PowerSeries r = *this;
    for (auto& c : r.coeffs_) c *= s;
    return r;
  }

  PowerSeries pow(unsigned e) const {
    PowerSeries r = constant(Scalar(1), size(), variable_);
    for (unsigned i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  // 1/S; requires S(0) != 0.
  PowerSeries reciprocal() const {
    if (empty()) return *this;
    if (coeffs_[0] == Scalar(0)) throw InvalidArgument("reciprocal: zero constant term");
    const std::size_t n = size();
    std::vector<Scalar> r(n, Scalar(0));
    r[0] = Scalar(1) / coeffs_[0];
    for (std::size_t m = 1; m < n; ++m) {
      Scalar acc(0);
      for (std::size_t j = 1; j <= m; ++j) acc += coeffs_[j] * r[m - j];
      r[m] = -acc / coeffs_[0];
    }
    return PowerSeries(std::move(r), variable_);
  }

  PowerSeries derivative() const {
    if (size() <= 1) return PowerSeries(std::vector<Scalar>{}, variable_);
    std::vector<Scalar> v(size() - 1);
    for (std::size_t i = 1; i < size(); ++i) v[i - 1] = coeffs_[i] * Scalar(static_cast<long>(i));
    return PowerSeries(std::move(v), variable_);
  }

  // log S for S(0) == 1, via n*l_n = n*s_n - sum_{j=1}^{n-1} j*l_j*s_{n-j}.
  PowerSeries log() const {
    if (empty()) return *this;
    if (coeffs_[0] != Scalar(1)) throw InvalidArgument("log: constant term must be 1");
    const std::size_t n = size();
    std::vector<Scalar> l(n, Scalar(0));
    for (std::size_t m = 1; m < n; ++m) {
      Scalar acc = coeffs_[m] * Scalar(static_cast<long>(m));
      for (std::size_t j = 1; j < m; ++j) acc -= Scalar(static_cast<long>(j)) * l[j] * coeffs_[m - j];
      l[m] = acc / Scalar(static_cast<long>(m));
    }
    return PowerSeries(std::move(l), variable_);
  }

  // exp S for S(0) == 0, via n*e_n = sum_{j=1}^{n} j*s_j*e_{n-j}.
  PowerSeries exp() const {
    if (empty()) return *this;
    if (coeffs_[0] != Scalar(0)) throw InvalidArgument("exp: constant term must be 0");
    const std::size_t n = size();
    std::vector<Scalar> e(n, Scalar(0));
    e[0] = Scalar(1);
    for (std::size_t m = 1; m < n; ++m) {
      Scalar acc(0);
      for (std::size_t j = 1; j <= m; ++j) acc += Scalar(static_cast<long>(j)) * coeffs_[j] * e[m - j];
      e[m] = acc / Scalar(static_cast<long>(m));
    }
    return PowerSeries(std::move(e), variable_);
  }

  // S(inner(x)) for inner(0) == 0 (Horner in series arithmetic).
  PowerSeries compose(const PowerSeries& inner) const {
    if (!inner.empty() && inner.coeffs_[0] != Scalar(0))
      throw InvalidArgument("compose: inner series must vanish at 0");
    const std::size_t n = std::min(size(), inner.size());
    PowerSeries in = inner.truncated(n);
    PowerSeries r = constant(Scalar(0), n, inner.variable_);
    for (std::size_t i = n; i-- > 0;) {
      r = r * in;
      r.coeffs_[0] += coeffs_[i];
    }
    return r;
  }

  template <class X>
  X evaluate(const X& x) const {
    X acc(0);
    for (std::size_t i = size(); i-- > 0;) acc = acc * x + X(coeffs_[i]);
    return acc;
  }

 private:
  std::vector<Scalar> coeffs_;
  std::string variable_ = "lambda";
};

}  // namespace lvr
