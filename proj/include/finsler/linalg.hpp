#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "finsler/dual.hpp"

namespace finsler {

/// All tensors are dense, row-major, square in a runtime dimension n <= kMaxDim.
/// Index order is always the order of operator() arguments; mixed tensors
/// document their slot variance where declared.
inline constexpr int kMaxDim = 6;

template <class T>
class Vec {
 public:
  Vec() = default;
  explicit Vec(int n) : n_(n) {}
  int size() const { return n_; }
  T& operator[](int i) { return d_[i]; }
  const T& operator[](int i) const { return d_[i]; }

 private:
  std::array<T, kMaxDim> d_{};
  int n_ = 0;
};

template <class T>
class Mat {
 public:
  Mat() = default;
  explicit Mat(int n) : n_(n) {}
  int size() const { return n_; }
  T& operator()(int i, int j) { return d_[i * n_ + j]; }
  const T& operator()(int i, int j) const { return d_[i * n_ + j]; }

 private:
  std::array<T, kMaxDim * kMaxDim> d_{};
  int n_ = 0;
};

template <class T>
class Ten3 {
 public:
  Ten3() = default;
  explicit Ten3(int n) : n_(n) {}
  int size() const { return n_; }
  T& operator()(int i, int j, int k) { return d_[(i * n_ + j) * n_ + k]; }
  const T& operator()(int i, int j, int k) const { return d_[(i * n_ + j) * n_ + k]; }

 private:
  std::array<T, kMaxDim * kMaxDim * kMaxDim> d_{};
  int n_ = 0;
};

template <class T>
class Ten4 {
 public:
  Ten4() = default;
  explicit Ten4(int n) : n_(n) {}
  int size() const { return n_; }
  T& operator()(int i, int j, int k, int l) { return d_[((i * n_ + j) * n_ + k) * n_ + l]; }
  const T& operator()(int i, int j, int k, int l) const {
    return d_[((i * n_ + j) * n_ + k) * n_ + l];
  }

 private:
  std::array<T, kMaxDim * kMaxDim * kMaxDim * kMaxDim> d_{};
  int n_ = 0;
};

namespace detail {

/// Copy of y with a unit dual seed in one slot (directional differentiation).
template <class T>
Vec<Dual<T>> seed_dir(const Vec<T>& y, int dir) {
  Vec<Dual<T>> yd(y.size());
  for (int i = 0; i < y.size(); ++i) yd[i] = Dual<T>(y[i], T(i == dir ? 1.0 : 0.0));
  return yd;
}

}  // namespace detail

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T s{};
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T, class U>
auto dot(const Vec<T>& a, const Vec<U>& b) {
  decltype(a[0] * b[0]) s{};
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T, class U>
auto matvec(const Mat<T>& m, const Vec<U>& v) {
  Vec<decltype(m(0, 0) * v[0])> r(m.size());
  for (int i = 0; i < m.size(); ++i) {
    decltype(m(0, 0) * v[0]) s{};
    for (int j = 0; j < m.size(); ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

template <class T>
Vec<double> values(const Vec<T>& v) {
  Vec<double> r(v.size());
  for (int i = 0; i < v.size(); ++i) r[i] = value(v[i]);
  return r;
}

template <class T>
Mat<double> values(const Mat<T>& m) {
  Mat<double> r(m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) r(i, j) = value(m(i, j));
  return r;
}

// ---- double-only numerics (dimensions <= kMaxDim, no pivoting surprises) ----

/// Cholesky factor L (lower) of a symmetric positive-definite matrix.
/// Throws std::runtime_error if the matrix is not positive definite.
inline Mat<double> cholesky(const Mat<double>& a) {
  int n = a.size();
  Mat<double> L(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (i == j) {
        if (s <= 0.0) throw std::runtime_error("matrix not positive definite");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  return L;
}

inline Mat<double> inverse(const Mat<double>& a) {
  int n = a.size();
  Mat<double> m = a;
  Mat<double> inv(n);
  for (int i = 0; i < n; ++i) inv(i, i) = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(m(r, c)) > std::fabs(m(p, c))) p = r;
    if (m(p, c) == 0.0) throw std::runtime_error("singular matrix");
    if (p != c)
      for (int j = 0; j < n; ++j) {
        std::swap(m(c, j), m(p, j));
        std::swap(inv(c, j), inv(p, j));
      }
    double piv = m(c, c);
    for (int j = 0; j < n; ++j) {
      m(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = m(r, c);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        m(r, j) -= f * m(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

inline double determinant(const Mat<double>& a) {
  int n = a.size();
  Mat<double> m = a;
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(m(r, c)) > std::fabs(m(p, c))) p = r;
    if (m(p, c) == 0.0) return 0.0;
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(m(c, j), m(p, j));
      det = -det;
    }
    det *= m(c, c);
    for (int r = c + 1; r < n; ++r) {
      double f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

}  // namespace finsler
