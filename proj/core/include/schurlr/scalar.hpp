#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace schurlr {

using Real = double;
using Complex = std::complex<double>;
using Index = std::ptrdiff_t;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

/// The two scalar fields the library is instantiated for.
template <class T>
concept Scalar = std::is_same_v<T, Real> || std::is_same_v<T, Complex>;

/// Conjugate that stays in the field (std::conj(double) would promote).
template <Scalar T>
constexpr T conj(T x) {
  if constexpr (is_complex_v<T>) {
    return std::conj(x);
  } else {
    return x;
  }
}

/// |x|^2 without a square root.
template <Scalar T>
constexpr Real abs2(T x) {
  if constexpr (is_complex_v<T>) {
    return x.real() * x.real() + x.imag() * x.imag();
  } else {
    return x * x;
  }
}

template <Scalar T>
constexpr Real real_part(T x) {
  if constexpr (is_complex_v<T>) {
    return x.real();
  } else {
    return x;
  }
}

}  // namespace schurlr
