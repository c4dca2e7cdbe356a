#pragma once

// Spray and curvature stack. Everything is assembled from nested-dual
// evaluations of F^2:
//   G^i   = 1/4 g^{il} { [F^2]_{x^k y^l} y^k - [F^2]_{x^l} }
//   R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
//           - dG^i/dy^j * dG^j/dy^k
//   Ric   = sum_i R^i_i,   Ric_ij = 1/2 d2 Ric / dy^i dy^j
//   B^i_{jkl} = d3 G^i / dy^j dy^k dy^l,   E_ij = 1/2 B^m_{ijm}
// The deepest chain (Ric_ij) evaluates F^2 six dual levels down; each level is
// a compile-time nesting, so the whole stack is allocation-free per scalar.

#include <cmath>
#include <optional>
#include <vector>

#include "derivatives.hpp"
#include "dual.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "metric.hpp"

namespace finsler {

template <class T>
std::vector<T> lift_vec(const Vecd& v) {
    return std::vector<T>(v.begin(), v.end());
}

// Spray coefficients at arbitrary scalar depth.
template <class T>
std::vector<T> spray_T(const MetricSpec& spec, const std::vector<T>& x, const std::vector<T>& y) {
    const int n = spec.dim;
    using DD = Dual<Dual<T>>;
    std::vector<DD> xd(static_cast<size_t>(n)), yd(static_cast<size_t>(n));
    std::vector<T> rhs(static_cast<size_t>(n), T(0.0));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i)
            xd[static_cast<size_t>(i)] = DD(Dual<T>(x[static_cast<size_t>(i)]), Dual<T>(i == k ? 1.0 : 0.0));
        for (int l = 0; l < n; ++l) {
            for (int i = 0; i < n; ++i)
                yd[static_cast<size_t>(i)] = DD(Dual<T>(y[static_cast<size_t>(i)], T(i == l ? 1.0 : 0.0)), Dual<T>(0.0));
            DD v = eval_F2(spec, xd.data(), yd.data());
            rhs[static_cast<size_t>(l)] += v.b.b * y[static_cast<size_t>(k)];  // [F2]_{x^k y^l} y^k
            if (l == k) rhs[static_cast<size_t>(l)] -= v.b.a;                  // [F2]_{x^l}
        }
    }
    Mat<T> g;
    fundamental_tensor_T(spec, x.data(), y.data(), g);
    std::vector<T> w = solve_lu(g, rhs);
    for (T& c : w) c = 0.25 * c;
    return w;
}

// R^i_k at arbitrary scalar depth.
template <class T>
Mat<T> riemann_T(const MetricSpec& spec, const std::vector<T>& x, const std::vector<T>& y) {
    const int n = spec.dim;
    using DD = Dual<Dual<T>>;
    const size_t un = static_cast<size_t>(n);

    std::vector<T> G(un);
    std::vector<std::vector<T>> Gx(un, std::vector<T>(un));                // Gx[j][i] = dG^i/dx^j
    std::vector<std::vector<T>> Gy(un, std::vector<T>(un));                // Gy[j][i] = dG^i/dy^j
    std::vector<std::vector<std::vector<T>>> Gxy(un, std::vector<std::vector<T>>(un, std::vector<T>(un)));
    std::vector<std::vector<std::vector<T>>> Gyy(un, std::vector<std::vector<T>>(un, std::vector<T>(un)));

    std::vector<DD> xd(un), yd(un);
    for (int j = 0; j < n; ++j) {  // outer seed: x^j
        for (int k = 0; k < n; ++k) {  // inner seed: y^k
            for (int i = 0; i < n; ++i) {
                xd[static_cast<size_t>(i)] = DD(Dual<T>(x[static_cast<size_t>(i)]), Dual<T>(i == j ? 1.0 : 0.0));
                yd[static_cast<size_t>(i)] = DD(Dual<T>(y[static_cast<size_t>(i)], T(i == k ? 1.0 : 0.0)), Dual<T>(0.0));
            }
            std::vector<DD> Gd = spray_T(spec, xd, yd);
            for (int i = 0; i < n; ++i) {
                Gxy[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].b.b;
                if (k == 0) Gx[static_cast<size_t>(j)][static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].b.a;
                if (j == 0) {
                    Gy[static_cast<size_t>(k)][static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].a.b;
                    if (k == 0) G[static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].a.a;
                }
            }
        }
    }
    for (int j = 0; j < n; ++j) {  // outer seed: y^j
        for (int k = j; k < n; ++k) {  // inner seed: y^k
            for (int i = 0; i < n; ++i) {
                xd[static_cast<size_t>(i)] = DD(Dual<T>(x[static_cast<size_t>(i)]), Dual<T>(0.0));
                yd[static_cast<size_t>(i)] = DD(Dual<T>(y[static_cast<size_t>(i)], T(i == k ? 1.0 : 0.0)), Dual<T>(i == j ? 1.0 : 0.0));
            }
            std::vector<DD> Gd = spray_T(spec, xd, yd);
            for (int i = 0; i < n; ++i) {
                Gyy[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].b.b;
                Gyy[static_cast<size_t>(k)][static_cast<size_t>(j)][static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].b.b;
            }
        }
    }

    Mat<T> R(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            T acc = 2.0 * Gx[static_cast<size_t>(k)][static_cast<size_t>(i)];
            for (int j = 0; j < n; ++j) {
                acc -= y[static_cast<size_t>(j)] * Gxy[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(i)];
                acc += 2.0 * G[static_cast<size_t>(j)] * Gyy[static_cast<size_t>(j)][static_cast<size_t>(k)][static_cast<size_t>(i)];
                acc -= Gy[static_cast<size_t>(j)][static_cast<size_t>(i)] * Gy[static_cast<size_t>(k)][static_cast<size_t>(j)];
            }
            R(i, k) = acc;
        }
    return R;
}

template <class T>
T ricci_T(const MetricSpec& spec, const std::vector<T>& x, const std::vector<T>& y) {
    Mat<T> R = riemann_T(spec, x, y);
    T tr(0.0);
    for (int i = 0; i < spec.dim; ++i) tr += R(i, i);
    return tr;
}

// --- public operations -------------------------------------------------------

struct SprayData {
    Vecd G;
    Matd dG_dy;  // (i, j) = dG^i / dy^j
    TangentSample sample;
};

inline SprayData spray(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "spray");
    validate_at(spec, s.x);
    SprayData out;
    out.sample = s;
    const int n = spec.dim;
    out.dG_dy = Matd(n, n);
    std::vector<D1> xd = lift_vec<D1>(s.x);
    for (int j = 0; j < n; ++j) {
        std::vector<D1> yd(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) yd[static_cast<size_t>(i)] = D1(s.y[static_cast<size_t>(i)], i == j ? 1.0 : 0.0);
        std::vector<D1> Gd = spray_T(spec, xd, yd);
        for (int i = 0; i < n; ++i) out.dG_dy(i, j) = Gd[static_cast<size_t>(i)].b;
        if (j == 0) {
            out.G.resize(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) out.G[static_cast<size_t>(i)] = Gd[static_cast<size_t>(i)].a;
        }
    }
    return out;
}

inline Matd riemann_curvature(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "riemann_curvature");
    validate_at(spec, s.x);
    return riemann_T<double>(spec, s.x, s.y);
}

inline double ricci(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "ricci");
    validate_at(spec, s.x);
    return ricci_T<double>(spec, s.x, s.y);
}

inline Matd ricci_tensor(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "ricci_tensor");
    validate_at(spec, s.x);
    const int n = spec.dim;
    using DD = Dual<Dual<double>>;
    Matd out(n, n);
    std::vector<DD> xd = lift_vec<DD>(s.x);
    std::vector<DD> yd(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            for (int m = 0; m < n; ++m)
                yd[static_cast<size_t>(m)] = DD(D1(s.y[static_cast<size_t>(m)], m == j ? 1.0 : 0.0), D1(m == i ? 1.0 : 0.0));
            DD ric = ricci_T(spec, xd, yd);
            out(i, j) = out(j, i) = 0.5 * ric.b.b;
        }
    return out;
}

inline double flag_curvature(const MetricSpec& spec, const TangentSample& s, const Vecd& u) {
    require_slit(spec, s.y, "flag_curvature");
    validate_at(spec, s.x);
    FundamentalTensor ft = fundamental_tensor(spec, s);
    const int n = spec.dim;
    auto inner = [&](const Vecd& a, const Vecd& b) {
        double r = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r += ft.g(i, j) * a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
        return r;
    };
    double gyy = inner(s.y, s.y), guu = inner(u, u), gyu = inner(s.y, u);
    double denom = gyy * guu - gyu * gyu;
    if (denom <= 1e-12 * gyy * guu) throw DegenerateFlag("flag pole u is (numerically) parallel to y");
    Matd R = riemann_T<double>(spec, s.x, s.y);
    Vecd Ru(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) Ru[static_cast<size_t>(i)] += R(i, k) * u[static_cast<size_t>(k)];
    return inner(Ru, u) / denom;
}

struct EinsteinFit {
    double lambda = 0.0;
    double residual = 0.0;  // max |Ric_ij - lambda g_ij| / ||g||_inf over the batch
    int n_samples = 0;
};

inline EinsteinFit einstein_fit(const MetricSpec& spec, const Vecd& x, const std::vector<Vecd>& ys) {
    double num = 0.0, den = 0.0;
    std::vector<Matd> rics, gs;
    for (const Vecd& y : ys) {
        TangentSample s{x, y};
        Matd ric = ricci_tensor(spec, s);
        Matd g = fundamental_tensor(spec, s).g;
        for (size_t e = 0; e < ric.e.size(); ++e) {
            num += ric.e[e] * g.e[e];
            den += g.e[e] * g.e[e];
        }
        rics.push_back(std::move(ric));
        gs.push_back(std::move(g));
    }
    EinsteinFit fit;
    fit.n_samples = static_cast<int>(ys.size());
    fit.lambda = den > 0.0 ? num / den : 0.0;
    for (size_t b = 0; b < rics.size(); ++b) {
        double scale = max_abs(gs[b]);
        for (size_t e = 0; e < rics[b].e.size(); ++e)
            fit.residual = std::max(fit.residual, std::abs(rics[b].e[e] - fit.lambda * gs[b].e[e]) / scale);
    }
    return fit;
}

// Einstein residual against a fixed lambda claim (no fit).
inline double einstein_residual_at(const MetricSpec& spec, const Vecd& x, const std::vector<Vecd>& ys, double lambda) {
    double res = 0.0;
    for (const Vecd& y : ys) {
        TangentSample s{x, y};
        Matd ric = ricci_tensor(spec, s);
        Matd g = fundamental_tensor(spec, s).g;
        double scale = max_abs(g);
        for (size_t e = 0; e < ric.e.size(); ++e) res = std::max(res, std::abs(ric.e[e] - lambda * g.e[e]) / scale);
    }
    return res;
}

struct Tensor4 {
    int n = 0;
    Vecd v;
    explicit Tensor4(int dim = 0) : n(dim), v(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}
    double& at(int i, int j, int k, int l) { return v[((static_cast<size_t>(i) * n + j) * n + k) * n + l]; }
    double at(int i, int j, int k, int l) const { return v[((static_cast<size_t>(i) * n + j) * n + k) * n + l]; }
    double max_abs() const {
        double r = 0.0;
        for (double x : v) r = std::max(r, std::abs(x));
        return r;
    }
};

inline Tensor4 berwald_curvature(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "berwald_curvature");
    validate_at(spec, s.x);
    const int n = spec.dim;
    Tensor4 B(n);
    std::vector<D3> xd = lift_vec<D3>(s.x);
    std::vector<D3> yd(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k)
            for (int l = k; l < n; ++l) {
                for (int m = 0; m < n; ++m) {
                    D1 lev1(s.y[static_cast<size_t>(m)], m == j ? 1.0 : 0.0);
                    D2 lev2(lev1, D1(m == k ? 1.0 : 0.0));
                    yd[static_cast<size_t>(m)] = D3(lev2, D2(m == l ? 1.0 : 0.0));
                }
                std::vector<D3> Gd = spray_T(spec, xd, yd);
                for (int i = 0; i < n; ++i) {
                    double b = Gd[static_cast<size_t>(i)].b.b.b;
                    // fully symmetric in (j,k,l)
                    B.at(i, j, k, l) = B.at(i, j, l, k) = B.at(i, k, j, l) = b;
                    B.at(i, k, l, j) = B.at(i, l, j, k) = B.at(i, l, k, j) = b;
                }
            }
    return B;
}

inline Matd e_curvature(const MetricSpec& spec, const TangentSample& s) {
    Tensor4 B = berwald_curvature(spec, s);
    const int n = spec.dim;
    Matd E(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double tr = 0.0;
            for (int m = 0; m < n; ++m) tr += B.at(m, i, j, m);
            E(i, j) = 0.5 * tr;
        }
    return E;
}

inline Matd e_curvature_from(const Tensor4& B) {
    const int n = B.n;
    Matd E(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double tr = 0.0;
            for (int m = 0; m < n; ++m) tr += B.at(m, i, j, m);
            E(i, j) = 0.5 * tr;
        }
    return E;
}

struct CurvatureReport {
    double ricci_scalar = 0.0;
    Matd ricci_ij;
    std::optional<double> flag;
    double einstein_lambda_fit = 0.0;
    double einstein_residual = 0.0;
    double berwald_norm = 0.0;
    double e_norm = 0.0;
    TangentSample sample;
};

inline CurvatureReport curvature_report(const MetricSpec& spec, const TangentSample& s, const std::vector<Vecd>& einstein_batch,
                                        const Vecd* flag_pole = nullptr) {
    CurvatureReport rep;
    rep.sample = s;
    rep.ricci_scalar = ricci(spec, s);
    rep.ricci_ij = ricci_tensor(spec, s);
    if (flag_pole) rep.flag = flag_curvature(spec, s, *flag_pole);
    EinsteinFit fit = einstein_fit(spec, s.x, einstein_batch);
    rep.einstein_lambda_fit = fit.lambda;
    rep.einstein_residual = fit.residual;
    Tensor4 B = berwald_curvature(spec, s);
    rep.berwald_norm = B.max_abs();
    rep.e_norm = max_abs(e_curvature_from(B));
    return rep;
}

}  // namespace finsler
