#pragma once

// Small dense linear algebra, templated on scalar so dual numbers flow through
// solves and determinants. Dimensions here are chart dimensions (n <= 8), so
// simple partial-pivot elimination is exactly the right tool.

#include <cmath>
#include <cstddef>
#include <vector>

#include "dual.hpp"
#include "errors.hpp"

namespace finsler {

template <class T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> e;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), e(static_cast<size_t>(r) * c, T(0.0)) {}

    T& operator()(int i, int j) { return e[static_cast<size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return e[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1.0);
        return m;
    }
};

using Matd = Mat<double>;
using Vecd = std::vector<double>;

template <class T>
T dot(const std::vector<T>& u, const std::vector<T>& v) {
    T s(0.0);
    for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline double norm2(const Vecd& u) { return std::sqrt(dot(u, u)); }

inline double max_abs(const Matd& m) {
    double r = 0.0;
    for (double x : m.e) r = std::max(r, std::abs(x));
    return r;
}

inline double max_abs(const Vecd& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

// In-place LU factorization with partial pivoting on leading scalar values;
// solves A w = rhs for one or more right-hand sides stacked as columns.
template <class T>
Mat<T> solve_lu(Mat<T> a, Mat<T> rhs) {
    const int n = a.rows;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(scalar_value(a(col, col)));
        for (int r = col + 1; r < n; ++r) {
            double mag = std::abs(scalar_value(a(r, col)));
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (best == 0.0) throw EngineError("singular matrix in solve_lu");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (int j = 0; j < rhs.cols; ++j) std::swap(rhs(col, j), rhs(piv, j));
        }
        for (int r = col + 1; r < n; ++r) {
            T m = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= m * a(col, j);
            for (int j = 0; j < rhs.cols; ++j) rhs(r, j) -= m * rhs(col, j);
        }
    }
    Mat<T> w(n, rhs.cols);
    for (int j = 0; j < rhs.cols; ++j) {
        for (int i = n - 1; i >= 0; --i) {
            T s = rhs(i, j);
            for (int k = i + 1; k < n; ++k) s -= a(i, k) * w(k, j);
            w(i, j) = s / a(i, i);
        }
    }
    return w;
}

template <class T>
std::vector<T> solve_lu(const Mat<T>& a, const std::vector<T>& rhs) {
    Mat<T> col(a.rows, 1);
    for (int i = 0; i < a.rows; ++i) col(i, 0) = rhs[i];
    Mat<T> w = solve_lu(a, col);
    std::vector<T> out(static_cast<size_t>(a.rows));
    for (int i = 0; i < a.rows; ++i) out[i] = w(i, 0);
    return out;
}

template <class T>
Mat<T> inverse(const Mat<T>& a) {
    return solve_lu(a, Mat<T>::identity(a.rows));
}

template <class T>
T determinant(Mat<T> a) {
    const int n = a.rows;
    T det(1.0);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(scalar_value(a(col, col)));
        for (int r = col + 1; r < n; ++r) {
            double mag = std::abs(scalar_value(a(r, col)));
            if (mag > best) {
                best = mag;
                piv = r;
            }
        }
        if (best == 0.0) return T(0.0);
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            det = -det;
        }
        det = det * a(col, col);
        for (int r = col + 1; r < n; ++r) {
            T m = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= m * a(col, j);
        }
    }
    return det;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps. Diagnostic use
// only (positive-definiteness reporting), so double precision is enough.
inline Vecd sym_eigenvalues(Matd a) {
    const int n = a.rows;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vecd ev(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    return ev;
}

}  // namespace finsler
