#pragma once

#include <cmath>
#include <type_traits>

namespace finsler {

/// Forward-mode dual number. Nest the template for higher derivatives:
/// Dual<Dual<double>> carries exact second derivatives, and so on.
/// Seed .dot = 1 on the variable being differentiated.
template <class T>
struct Dual {
  T val{};
  T dot{};

  Dual() = default;
  Dual(double v) : val(v) {}
  Dual(T v, T d) : val(std::move(v)), dot(std::move(d)) {}

  Dual& operator+=(const Dual& o) { val += o.val; dot += o.dot; return *this; }
  Dual& operator-=(const Dual& o) { val -= o.val; dot -= o.dot; return *this; }
  Dual& operator*=(const Dual& o) {
    dot = dot * o.val + val * o.dot;
    val = val * o.val;
    return *this;
  }
  Dual& operator+=(double s) { val += s; return *this; }
  Dual& operator-=(double s) { val -= s; return *this; }
  Dual& operator*=(double s) { val = val * s; dot = dot * s; return *this; }
  Dual& operator/=(double s) { val = val / s; dot = dot / s; return *this; }
};

// value(): strip all derivative parts down to the underlying double.
inline double value(double x) { return x; }
template <class T>
double value(const Dual<T>& x) { return value(x.val); }

inline bool finite(double x) { return std::isfinite(x); }
template <class T>
bool finite(const Dual<T>& x) { return finite(x.val) && finite(x.dot); }

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { a += b; return a; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { a -= b; return a; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.val * b.val, a.dot * b.val + a.val * b.dot};
}
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T inv = T(1.0) / b.val;
  T q = a.val * inv;
  return {q, (a.dot - q * b.dot) * inv};
}
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.val, -a.dot}; }

template <class T> Dual<T> operator+(Dual<T> a, double s) { a.val += s; return a; }
template <class T> Dual<T> operator+(double s, Dual<T> a) { a.val += s; return a; }
template <class T> Dual<T> operator-(Dual<T> a, double s) { a.val -= s; return a; }
template <class T> Dual<T> operator-(double s, const Dual<T>& a) { return {s - a.val, -a.dot}; }
template <class T> Dual<T> operator*(Dual<T> a, double s) { a *= s; return a; }
template <class T> Dual<T> operator*(double s, Dual<T> a) { a *= s; return a; }
template <class T> Dual<T> operator/(Dual<T> a, double s) { a /= s; return a; }
template <class T> Dual<T> operator/(double s, const Dual<T>& b) {
  return Dual<T>(s) / b;
}

template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return value(a) < value(b); }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return value(a) > value(b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return value(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return value(a) > b; }
template <class T> bool operator<(double a, const Dual<T>& b) { return a < value(b); }
template <class T> bool operator>(double a, const Dual<T>& b) { return a > value(b); }

using std::atan2;
using std::exp;
using std::fabs;
using std::log;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T r = sqrt(a.val);
  return {r, a.dot / (2.0 * r)};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.val);
  return {e, a.dot * e};
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.val), a.dot / a.val};
}

template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T denom = x.val * x.val + y.val * y.val;
  return {atan2(y.val, x.val), (x.val * y.dot - y.val * x.dot) / denom};
}

template <class T>
Dual<T> fabs(const Dual<T>& a) {
  return value(a) < 0.0 ? -a : a;
}

// Convenience nests.
using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;
using Dual3 = Dual<Dual2>;
using Dual4 = Dual<Dual3>;

}  // namespace finsler
