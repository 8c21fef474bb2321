#pragma once

#include <span>
#include <vector>

#include "schurlr/errors.hpp"
#include "schurlr/scalar.hpp"

namespace schurlr {

template <Scalar T>
using Vector = std::vector<T>;

/// conj(x)^T y. The first argument is the conjugated one, everywhere in the
/// library.
template <Scalar T>
T dot(std::span<const T> x, std::span<const T> y) {
  require_same_size(x.size(), y.size(), "dot");
  T sum(0);
  for (std::size_t i = 0; i < x.size(); ++i) sum += conj(x[i]) * y[i];
  return sum;
}

template <Scalar T>
T dot(const Vector<T>& x, const Vector<T>& y) {
  return dot<T>(std::span<const T>(x), std::span<const T>(y));
}

/// alpha x + y.
template <Scalar T>
Vector<T> axpy(T alpha, std::span<const T> x, std::span<const T> y) {
  require_same_size(x.size(), y.size(), "axpy");
  Vector<T> out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

template <Scalar T>
Vector<T> axpy(T alpha, const Vector<T>& x, const Vector<T>& y) {
  return axpy<T>(alpha, std::span<const T>(x), std::span<const T>(y));
}

/// y += alpha x in place.
template <Scalar T>
void axpy_inplace(T alpha, std::span<const T> x, std::span<T> y) {
  require_same_size(x.size(), y.size(), "axpy_inplace");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

template <Scalar T>
Real norm2(std::span<const T> x) {
  Real s = 0;
  for (const T& v : x) s += abs2(v);
  return std::sqrt(s);
}

template <Scalar T>
Real norm2(const Vector<T>& x) {
  return norm2<T>(std::span<const T>(x));
}

template <Scalar T>
void scale(T alpha, std::span<T> x) {
  for (T& v : x) v *= alpha;
}

template <Scalar T>
Vector<T> subtract(const Vector<T>& a, const Vector<T>& b) {
  require_same_size(a.size(), b.size(), "subtract");
  Vector<T> out(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] -= b[i];
  return out;
}

template <Scalar To, Scalar From>
Vector<To> convert(const Vector<From>& x) {
  return Vector<To>(x.begin(), x.end());
}

}  // namespace schurlr
