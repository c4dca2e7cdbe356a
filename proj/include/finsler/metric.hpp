#pragma once

// Metric zoo: Riemannian matrices, Randers perturbations, Minkowski norms and
// warped products F^2 = F1^2 + f(x1)^2 F2^2, all built from expression trees
// so every evaluation path stays generic over the scalar type.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dual.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "linalg.hpp"

namespace finsler {

inline constexpr double kYFloor = 1e-6;  // slit-bundle floor, relative to unit reference vectors

struct Chart {
    std::vector<bool> periodic;                     // per coordinate
    std::vector<double> period;                     // period length where periodic, 0 otherwise
    std::vector<std::pair<double, double>> domain;  // sampling / integration box
};

struct ChartPoint {
    Vecd coords;
};

struct TangentSample {
    Vecd x;
    Vecd y;
};

enum class MetricKind { Riemannian, Randers, MinkowskiNorm, WarpedProduct };

struct MetricSpec {
    MetricKind kind = MetricKind::Riemannian;
    int dim = 0;
    std::string name;
    Chart chart;

    std::vector<Expr> g_entries;  // Riemannian: dim*dim entries, row-major, functions of x

    std::shared_ptr<const MetricSpec> alpha;  // Randers: Riemannian part
    std::vector<Expr> b_entries;              // Randers: covector b_i(x)

    Expr norm;  // MinkowskiNorm: positive 1-homogeneous function of y

    std::shared_ptr<const MetricSpec> base;   // WarpedProduct (Riemannian base)
    std::shared_ptr<const MetricSpec> fiber;  // WarpedProduct
    Expr warp;                                // f(x1-block), positive

    int base_dim() const { return base ? base->dim : 0; }
};

struct FundamentalTensor {
    Matd g;
    Matd g_inv;
    double det_g = 0.0;
    TangentSample sample;
};

// --- templated evaluation ---------------------------------------------------

template <class T>
T eval_F2(const MetricSpec& spec, const T* x, const T* y) {
    switch (spec.kind) {
        case MetricKind::Riemannian: {
            T q(0.0);
            for (int i = 0; i < spec.dim; ++i)
                for (int j = 0; j < spec.dim; ++j) {
                    T gij = spec.g_entries[static_cast<size_t>(i) * spec.dim + j].eval(x, spec.dim, y, 0);
                    q += gij * y[i] * y[j];
                }
            return q;
        }
        case MetricKind::Randers: {
            T a2 = eval_F2(*spec.alpha, x, y);
            using std::sqrt;
            T alpha = sqrt(a2);
            T beta(0.0);
            for (int i = 0; i < spec.dim; ++i) beta += spec.b_entries[static_cast<size_t>(i)].eval(x, spec.dim, y, 0) * y[i];
            T f = alpha + beta;
            return f * f;
        }
        case MetricKind::MinkowskiNorm: {
            T f = spec.norm.eval(x, 0, y, spec.dim);
            return f * f;
        }
        case MetricKind::WarpedProduct: {
            const int n1 = spec.base->dim;
            T f = spec.warp.eval(x, n1, y, 0);
            return eval_F2(*spec.base, x, y) + f * f * eval_F2(*spec.fiber, x + n1, y + n1);
        }
    }
    throw EngineError("corrupt metric kind");
}

// --- validity checks --------------------------------------------------------

inline bool slit_ok(const MetricSpec& spec, const double* y, double floor_scale = 1.0) {
    double floor = kYFloor * floor_scale;
    double n2 = 0.0;
    for (int i = 0; i < spec.dim; ++i) n2 += y[i] * y[i];
    if (std::sqrt(n2) <= floor) return false;
    if (spec.kind == MetricKind::WarpedProduct) {
        // F lives on the product of slit bundles, but a block with a
        // quadratic (Riemannian) square norm stays smooth through block zero.
        const int n1 = spec.base->dim;
        if (spec.fiber->kind != MetricKind::Riemannian) {
            double f2 = 0.0;
            for (int i = n1; i < spec.dim; ++i) f2 += y[i] * y[i];
            if (std::sqrt(f2) <= floor) return false;
        }
        if (spec.fiber->kind == MetricKind::WarpedProduct && !slit_ok(*spec.fiber, y + n1, floor_scale)) return false;
    }
    return true;
}

inline void require_slit(const MetricSpec& spec, const Vecd& y, const char* where) {
    if (static_cast<int>(y.size()) != spec.dim) throw DimensionMismatch(std::string(where) + ": tangent vector dimension");
    if (!slit_ok(spec, y.data())) throw SlitViolation(std::string(where) + ": tangent vector below slit floor");
}

inline double randers_b_norm2(const MetricSpec& spec, const Vecd& x) {
    // |b|^2_alpha = a^{ij} b_i b_j at x
    const int n = spec.dim;
    Matd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = spec.alpha->g_entries[static_cast<size_t>(i) * n + j].eval(x.data(), n, static_cast<const double*>(nullptr), 0);
    Vecd b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) b[i] = spec.b_entries[static_cast<size_t>(i)].eval(x.data(), n, static_cast<const double*>(nullptr), 0);
    Vecd w = solve_lu(a, b);
    return dot(b, w);
}

// Spot validation at one chart point: Randers bound, warp positivity. Cheap
// enough for public entry points; the templated core skips it.
inline void validate_at(const MetricSpec& spec, const Vecd& x) {
    switch (spec.kind) {
        case MetricKind::Riemannian:
            return;
        case MetricKind::Randers: {
            // |b|_alpha >= 1 destroys strong convexity of the fundamental tensor
            double bn2 = randers_b_norm2(spec, x);
            if (bn2 >= 1.0)
                throw NotPositiveDefinite(
                    (spec.name.empty() ? std::string("Randers") : spec.name) +
                    ": |b|_alpha >= 1 at sample (|b| = " + std::to_string(std::sqrt(bn2)) + ")");
            return;
        }
        case MetricKind::MinkowskiNorm:
            return;
        case MetricKind::WarpedProduct: {
            const int n1 = spec.base->dim;
            double f = spec.warp.eval(x.data(), n1, static_cast<const double*>(nullptr), 0);
            if (!(f > 0.0)) throw NonpositiveWarp("warp function f <= 0 at sample (f = " + std::to_string(f) + ")");
            validate_at(*spec.base, Vecd(x.begin(), x.begin() + n1));
            validate_at(*spec.fiber, Vecd(x.begin() + n1, x.end()));
            return;
        }
    }
}

// --- public evaluation ------------------------------------------------------

inline double eval_F(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "eval_F");
    validate_at(spec, s.x);
    double f2 = eval_F2(spec, s.x.data(), s.y.data());
    if (!std::isfinite(f2)) throw NonFinite("F^2 not finite");
    return std::sqrt(f2);
}

// g_ij = 1/2 d^2 F^2 / dy_i dy_j, exact via one nested dual level per slot.
template <class T>
void fundamental_tensor_T(const MetricSpec& spec, const T* x, const T* y, Mat<T>& g) {
    const int n = spec.dim;
    g = Mat<T>(n, n);
    using D2 = Dual<Dual<T>>;
    std::vector<D2> xd(static_cast<size_t>(n)), yd(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) xd[static_cast<size_t>(i)] = D2(Dual<T>(x[i]));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                Dual<T> lo(y[k], k == j ? T(1.0) : T(0.0));
                yd[static_cast<size_t>(k)] = D2(lo, k == i ? Dual<T>(1.0) : Dual<T>(0.0));
            }
            T h = eval_F2(spec, xd.data(), yd.data()).b.b;
            g(i, j) = 0.5 * h;
            g(j, i) = g(i, j);
        }
}

inline FundamentalTensor fundamental_tensor(const MetricSpec& spec, const TangentSample& s) {
    require_slit(spec, s.y, "fundamental_tensor");
    validate_at(spec, s.x);
    FundamentalTensor ft;
    ft.sample = s;
    fundamental_tensor_T<double>(spec, s.x.data(), s.y.data(), ft.g);
    for (double v : ft.g.e)
        if (!std::isfinite(v)) throw NonFinite("fundamental tensor entry not finite");
    Vecd ev = sym_eigenvalues(ft.g);
    double mn = ev[0];
    for (double v : ev) mn = std::min(mn, v);
    if (mn <= 0.0) {
        std::string msg = "fundamental tensor not positive definite (min eigenvalue " + std::to_string(mn) + " at x=[";
        for (size_t i = 0; i < s.x.size(); ++i) msg += (i ? "," : "") + std::to_string(s.x[i]);
        msg += "], y=[";
        for (size_t i = 0; i < s.y.size(); ++i) msg += (i ? "," : "") + std::to_string(s.y[i]);
        msg += "])";
        throw NotPositiveDefinite(msg);
    }
    ft.g_inv = inverse(ft.g);
    ft.det_g = determinant(ft.g);
    return ft;
}

// Riemannian g(x) read off directly from the entry expressions.
inline Matd metric_matrix(const MetricSpec& spec, const Vecd& x) {
    if (spec.kind != MetricKind::Riemannian) throw DomainError("metric_matrix needs a Riemannian spec");
    const int n = spec.dim;
    Matd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = spec.g_entries[static_cast<size_t>(i) * n + j].eval(x.data(), n, static_cast<const double*>(nullptr), 0);
    return g;
}

inline bool is_riemannian(const MetricSpec& spec) {
    if (spec.kind == MetricKind::Riemannian) return true;
    if (spec.kind == MetricKind::WarpedProduct) return is_riemannian(*spec.base) && is_riemannian(*spec.fiber);
    return false;
}

// --- sampling ---------------------------------------------------------------

inline Vecd draw_x(const MetricSpec& spec, std::mt19937_64& rng) {
    Vecd x(static_cast<size_t>(spec.dim));
    for (int i = 0; i < spec.dim; ++i) {
        auto [lo, hi] = spec.chart.domain[static_cast<size_t>(i)];
        x[static_cast<size_t>(i)] = lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    return x;
}

// Uniform in [-1,1]^n, redrawn until each slit-relevant block is well away
// from zero; keeps test samples conditioned.
inline Vecd draw_y(const MetricSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vecd y(static_cast<size_t>(spec.dim));
    auto block_norm = [&](int off, int len) {
        double s = 0.0;
        for (int i = off; i < off + len; ++i) s += y[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
        return std::sqrt(s);
    };
    for (int attempt = 0; attempt < 256; ++attempt) {
        for (int i = 0; i < spec.dim; ++i) y[static_cast<size_t>(i)] = u(rng);
        bool ok = block_norm(0, spec.dim) > 0.3;
        if (ok && spec.kind == MetricKind::WarpedProduct) {
            const int n1 = spec.base->dim;
            ok = block_norm(0, n1) > 0.2 && block_norm(n1, spec.dim - n1) > 0.2;
        }
        if (ok) return y;
    }
    throw EngineError("draw_y failed to find a slit-safe vector");
}

inline TangentSample draw_sample(const MetricSpec& spec, std::mt19937_64& rng) { return {draw_x(spec, rng), draw_y(spec, rng)}; }

// --- validation sweep -------------------------------------------------------

struct MetricCheckReport {
    int n_samples = 0;
    int n_pass = 0;
    double homogeneity_max_err = 0.0;
    double euler_max_err = 0.0;
    double offdiag_max = 0.0;  // warped base-fiber coupling, must stay ~0
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

inline MetricCheckReport check_metric(const MetricSpec& spec, int n_samples, unsigned long long seed) {
    MetricCheckReport rep;
    rep.n_samples = n_samples;
    std::mt19937_64 rng(seed);
    for (int k = 0; k < n_samples; ++k) {
        TangentSample s = draw_sample(spec, rng);
        try {
            double f = eval_F(spec, s);
            if (!std::isfinite(f) || f <= 0.0) throw NonFinite("F <= 0 or non-finite");
            for (double lam : {0.5, 2.0, 7.0}) {
                TangentSample sl = s;
                for (double& v : sl.y) v *= lam;
                double err = std::abs(eval_F(spec, sl) - lam * f) / (lam * f);
                rep.homogeneity_max_err = std::max(rep.homogeneity_max_err, err);
            }
            FundamentalTensor ft = fundamental_tensor(spec, s);
            double quad = 0.0;
            for (int i = 0; i < spec.dim; ++i)
                for (int j = 0; j < spec.dim; ++j) quad += ft.g(i, j) * s.y[static_cast<size_t>(i)] * s.y[static_cast<size_t>(j)];
            rep.euler_max_err = std::max(rep.euler_max_err, std::abs(quad - f * f) / std::max(1.0, f * f));
            if (spec.kind == MetricKind::WarpedProduct) {
                const int n1 = spec.base->dim;
                for (int i = 0; i < n1; ++i)
                    for (int j = n1; j < spec.dim; ++j) rep.offdiag_max = std::max(rep.offdiag_max, std::abs(ft.g(i, j)));
            }
            ++rep.n_pass;
        } catch (const EngineError& err) {
            rep.failures.push_back("sample " + std::to_string(k) + ": " + err.what());
        }
    }
    if (rep.homogeneity_max_err > 1e-9) rep.failures.push_back("homogeneity error " + std::to_string(rep.homogeneity_max_err));
    if (rep.euler_max_err > 1e-9) rep.failures.push_back("Euler identity error " + std::to_string(rep.euler_max_err));
    if (rep.offdiag_max > 1e-10) rep.failures.push_back("warped off-diagonal coupling " + std::to_string(rep.offdiag_max));
    return rep;
}

// --- spec constructors (shared by tests, configs and tools) ------------------

inline Chart box_chart(int n, double lo = -1.0, double hi = 1.0) {
    Chart c;
    c.periodic.assign(static_cast<size_t>(n), false);
    c.period.assign(static_cast<size_t>(n), 0.0);
    c.domain.assign(static_cast<size_t>(n), {lo, hi});
    return c;
}

inline Chart torus_chart(int n, double period = 6.28318530717958647692) {
    Chart c;
    c.periodic.assign(static_cast<size_t>(n), true);
    c.period.assign(static_cast<size_t>(n), period);
    c.domain.assign(static_cast<size_t>(n), {0.0, period});
    return c;
}

inline MetricSpec riemannian_spec(int n, std::vector<std::string> g, Chart chart, std::string name = "") {
    MetricSpec m;
    m.kind = MetricKind::Riemannian;
    m.dim = n;
    m.name = std::move(name);
    m.chart = std::move(chart);
    for (auto& s : g) m.g_entries.push_back(Expr::parse(s));
    if (static_cast<int>(m.g_entries.size()) != n * n) throw DimensionMismatch("riemannian_spec needs n*n entries");
    return m;
}

inline MetricSpec euclidean_spec(int n, std::string name = "euclidean") {
    std::vector<std::string> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.push_back(i == j ? "1" : "0");
    return riemannian_spec(n, std::move(g), box_chart(n), std::move(name));
}

inline MetricSpec randers_spec(MetricSpec alpha, std::vector<std::string> b, std::string name = "") {
    MetricSpec m;
    m.kind = MetricKind::Randers;
    m.dim = alpha.dim;
    m.name = std::move(name);
    m.chart = alpha.chart;
    m.alpha = std::make_shared<const MetricSpec>(std::move(alpha));
    for (auto& s : b) m.b_entries.push_back(Expr::parse(s));
    if (static_cast<int>(m.b_entries.size()) != m.dim) throw DimensionMismatch("randers_spec needs n covector entries");
    return m;
}

inline MetricSpec minkowski_spec(int n, const std::string& norm, std::string name = "") {
    MetricSpec m;
    m.kind = MetricKind::MinkowskiNorm;
    m.dim = n;
    m.name = std::move(name);
    m.chart = box_chart(n);
    m.norm = Expr::parse(norm);
    return m;
}

inline MetricSpec warped_spec_metric(MetricSpec base, MetricSpec fiber, const std::string& f, std::string name = "") {
    if (base.kind != MetricKind::Riemannian) throw NonRiemannianBase("warped base must be Riemannian");
    MetricSpec m;
    m.kind = MetricKind::WarpedProduct;
    m.dim = base.dim + fiber.dim;
    m.name = std::move(name);
    m.chart.periodic = base.chart.periodic;
    m.chart.period = base.chart.period;
    m.chart.domain = base.chart.domain;
    m.chart.periodic.insert(m.chart.periodic.end(), fiber.chart.periodic.begin(), fiber.chart.periodic.end());
    m.chart.period.insert(m.chart.period.end(), fiber.chart.period.begin(), fiber.chart.period.end());
    m.chart.domain.insert(m.chart.domain.end(), fiber.chart.domain.begin(), fiber.chart.domain.end());
    m.base = std::make_shared<const MetricSpec>(std::move(base));
    m.fiber = std::make_shared<const MetricSpec>(std::move(fiber));
    m.warp = Expr::parse(f);
    return m;
}

}  // namespace finsler
