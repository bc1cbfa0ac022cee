#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace hodgefsi {

template <int D>
using Vec = std::array<double, static_cast<std::size_t>(D)>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <std::size_t N>
inline std::array<double, N> operator+(const std::array<double, N>& a,
                                       const std::array<double, N>& b) {
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
  return r;
}

template <std::size_t N>
inline std::array<double, N> operator-(const std::array<double, N>& a,
                                       const std::array<double, N>& b) {
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t N>
inline std::array<double, N> operator*(double s,
                                       const std::array<double, N>& a) {
  std::array<double, N> r{};
  for (std::size_t i = 0; i < N; ++i) r[i] = s * a[i];
  return r;
}

template <std::size_t N>
inline std::array<double, N>& operator+=(std::array<double, N>& a,
                                         const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
inline double dot(const std::array<double, N>& a,
                  const std::array<double, N>& b) {
  double s = 0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
inline double norm(const std::array<double, N>& a) {
  return std::sqrt(dot(a, a));
}

// Planar cross product, scalar-valued.
inline double cross(const Vec2& a, const Vec2& b) {
  return a[0] * b[1] - a[1] * b[0];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

}  // namespace hodgefsi
