#pragma once

// Forward-mode dual scalar. A Dual<T> carries a value and one derivative slot;
// nesting (Dual<Dual<double>> and deeper) realizes exact mixed partials, one
// seed direction per nesting level. Everything downstream (metric evaluation,
// sprays, curvatures) is templated on the scalar so the same code runs at any
// nesting depth. Storage is a flat struct of 2^depth doubles, no allocation.

#include <cmath>
#include <concepts>
#include <type_traits>

namespace finsler {

template <class T>
struct Dual {
    T a{};  // value
    T b{};  // derivative along this level's seed direction

    constexpr Dual() = default;
    constexpr Dual(const T& value) : a(value), b() {}
    constexpr Dual(const T& value, const T& deriv) : a(value), b(deriv) {}

    // Lift a plain number through any nesting depth (one level per construction).
    template <class U>
        requires(!std::same_as<U, T> && !std::same_as<U, Dual> && std::constructible_from<T, U>)
    constexpr Dual(const U& v) : a(T(v)), b() {}

    Dual& operator+=(const Dual& o) {
        a += o.a;
        b += o.b;
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        a -= o.a;
        b -= o.b;
        return *this;
    }
};

// Leading (0th-order) value of an arbitrarily nested dual.
inline double scalar_value(double x) { return x; }
template <class T>
double scalar_value(const Dual<T>& x) {
    return scalar_value(x.a);
}

template <class T>
Dual<T> operator+(const Dual<T>& u, const Dual<T>& v) {
    return {u.a + v.a, u.b + v.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& u, const Dual<T>& v) {
    return {u.a - v.a, u.b - v.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& u) {
    return {-u.a, -u.b};
}
template <class T>
Dual<T> operator*(const Dual<T>& u, const Dual<T>& v) {
    return {u.a * v.a, u.a * v.b + u.b * v.a};
}
template <class T>
Dual<T> operator/(const Dual<T>& u, const Dual<T>& v) {
    T q = u.a / v.a;
    return {q, (u.b - q * v.b) / v.a};
}

template <class T>
Dual<T> operator+(const Dual<T>& u, double c) {
    return {u.a + c, u.b};
}
template <class T>
Dual<T> operator+(double c, const Dual<T>& u) {
    return {u.a + c, u.b};
}
template <class T>
Dual<T> operator-(const Dual<T>& u, double c) {
    return {u.a - c, u.b};
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& u) {
    return {c - u.a, -u.b};
}
template <class T>
Dual<T> operator*(const Dual<T>& u, double c) {
    return {u.a * c, u.b * c};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& u) {
    return {u.a * c, u.b * c};
}
template <class T>
Dual<T> operator/(const Dual<T>& u, double c) {
    return {u.a / c, u.b / c};
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& u) {
    return Dual<T>(c) / u;
}

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& u) {
    T s = sqrt(u.a);
    return {s, u.b / (2.0 * s)};
}
template <class T>
Dual<T> exp(const Dual<T>& u) {
    T e = exp(u.a);
    return {e, u.b * e};
}
template <class T>
Dual<T> log(const Dual<T>& u) {
    return {log(u.a), u.b / u.a};
}
template <class T>
Dual<T> sin(const Dual<T>& u) {
    return {sin(u.a), u.b * cos(u.a)};
}
template <class T>
Dual<T> cos(const Dual<T>& u) {
    return {cos(u.a), -(u.b * sin(u.a))};
}

// u^p for real constant p; requires u > 0 at the evaluation point unless p is
// a nonnegative integer (handled by pow_int below).
template <class T>
Dual<T> pow(const Dual<T>& u, double p) {
    T w = pow(u.a, p);
    return {w, (p * u.b) * pow(u.a, p - 1.0)};
}

inline double pow_int(double u, int k) {
    double r = 1.0;
    double base = k < 0 ? 1.0 / u : u;
    for (int n = k < 0 ? -k : k; n > 0; n >>= 1) {
        if (n & 1) r *= base;
        base *= base;
    }
    return r;
}
template <class T>
Dual<T> pow_int(const Dual<T>& u, int k) {
    if (k < 0) return 1.0 / pow_int(u, -k);
    Dual<T> r(1.0);
    Dual<T> base = u;
    for (int n = k; n > 0; n >>= 1) {
        if (n & 1) r = r * base;
        base = base * base;
    }
    return r;
}

}  // namespace finsler
