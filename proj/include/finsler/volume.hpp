#pragma once

// Volume densities and total volumes.
//
//   sigma_HT(x)  = (1/Vol B^n) INT_{F(x,y)<1} det g(x,y) dy      (rejection MC)
//   sigma_max/min(x) = extremum of sqrt(det g(x,y)) over directions
//   sigma_BH     = closed form, Randers only
//
// det g(x, .) is 0-homogeneous in y, so directions stand in for the whole
// indicatrix and sample points near y = 0 can be evaluated at unit norm.
// All MC draws come from an explicit 53-bit uniform on mt19937_64 output so
// results are reproducible across standard library implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "metric.hpp"

namespace finsler {

inline constexpr double kPi = 3.14159265358979323846;

enum class VolumeForm { HolmesThompson, Max, Min, BHRandersClosedForm };

inline const char* form_name(VolumeForm f) {
    switch (f) {
        case VolumeForm::HolmesThompson: return "HT";
        case VolumeForm::Max: return "max";
        case VolumeForm::Min: return "min";
        case VolumeForm::BHRandersClosedForm: return "BH-randers-closed-form";
    }
    return "?";
}

struct VolumeParams {
    long budget = 100000;          // MC points
    std::uint64_t seed = 20240901; // MC stream seed
    double mc_rel_tol = 0.05;      // std_error/value gate for density MC
    int n_dirs = 4096;             // direction scan size (extremal densities, ball boxes)
    int refine_top = 8;            // candidates kept for golden-section refinement
    int quad_order = 16;           // nodes per axis, exactly evaluable densities
    int quad_order_scan = 8;       // nodes per axis when each density eval is a scan
};

struct VolumeEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 for closed forms and quadrature
    std::string method;
    VolumeForm form = VolumeForm::HolmesThompson;
};

inline double vol_ball(int n, double r = 1.0) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(r, n);
}

namespace detail_vol {

inline double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double halton(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
    return r;
}

// Acklam's rational approximation of the standard normal quantile (~1e-9).
inline double norm_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// det g at direction y/|y|; NaN if g fails to evaluate there.
inline double det_g_dir(const MetricSpec& spec, const Vecd& x, const Vecd& y) {
    double nn = norm2(y);
    if (!(nn > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    Vecd yn = y;
    for (double& c : yn) c /= nn;
    Matd g;
    fundamental_tensor_T<double>(spec, x.data(), yn.data(), g);
    for (double v : g.e)
        if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    return determinant(g);
}

// Axis directions first, then Halton points pushed through the normal quantile.
inline std::vector<Vecd> quasi_directions(int n, int count) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<Vecd> dirs;
    dirs.reserve(static_cast<size_t>(count) + 2 * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        for (double s : {1.0, -1.0}) {
            Vecd e(static_cast<size_t>(n), 0.0);
            e[static_cast<size_t>(i)] = s;
            dirs.push_back(e);
        }
    for (int k = 0; k < count; ++k) {
        Vecd u(static_cast<size_t>(n));
        double nn = 0.0;
        for (int j = 0; j < n; ++j) {
            double p = halton(static_cast<std::uint64_t>(k) + 17, primes[j]);
            p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
            u[static_cast<size_t>(j)] = norm_quantile(p);
            nn += u[static_cast<size_t>(j)] * u[static_cast<size_t>(j)];
        }
        if (nn < 1e-12) continue;
        nn = std::sqrt(nn);
        for (double& c : u) c /= nn;
        dirs.push_back(std::move(u));
    }
    return dirs;
}

// Half-widths of an axis box containing {y : F(x,y) < 1}, from the sampled
// boundary points u/F(u). Inflated: the discrete scan undershoots supports.
inline Vecd indicatrix_box(const MetricSpec& spec, const Vecd& x, int n_dirs, double inflate = 1.1) {
    const int n = spec.dim;
    Vecd hw(static_cast<size_t>(n), 0.0);
    for (const Vecd& u : quasi_directions(n, n_dirs)) {
        double f2 = eval_F2(spec, x.data(), u.data());
        if (!(f2 > 0.0) || !std::isfinite(f2)) continue;
        double r = 1.0 / std::sqrt(f2);
        for (int i = 0; i < n; ++i)
            hw[static_cast<size_t>(i)] = std::max(hw[static_cast<size_t>(i)], std::abs(u[static_cast<size_t>(i)]) * r);
    }
    for (double& h : hw) {
        if (!(h > 0.0)) throw DomainError("indicatrix bounding box collapsed along an axis");
        h *= inflate;
    }
    return hw;
}

inline double pairwise_sum(const Vecd& v, size_t lo, size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

struct McAccum {
    Vecd batch_sum, batch_sum2;
    double cur = 0.0, cur2 = 0.0;
    long in_batch = 0, n = 0;
    static constexpr long kBatch = 4096;
    void add(double v) {
        cur += v;
        cur2 += v * v;
        if (++in_batch == kBatch) flush();
        ++n;
    }
    void flush() {
        if (in_batch == 0) return;
        batch_sum.push_back(cur);
        batch_sum2.push_back(cur2);
        cur = cur2 = 0.0;
        in_batch = 0;
    }
    // mean and standard error of the mean
    std::pair<double, double> stats() {
        flush();
        double s = pairwise_sum(batch_sum, 0, batch_sum.size());
        double s2 = pairwise_sum(batch_sum2, 0, batch_sum2.size());
        double mean = s / static_cast<double>(n);
        double var = std::max(0.0, (s2 - s * mean) / std::max<double>(1.0, static_cast<double>(n - 1)));
        return {mean, std::sqrt(var / static_cast<double>(n))};
    }
};

inline std::string mc_method(long n, std::uint64_t seed) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "MC(%ld, seed=%llu)", n, static_cast<unsigned long long>(seed));
    return buf;
}

}  // namespace detail_vol

// sigma_HT by stratified rejection MC over the indicatrix bounding box.
inline VolumeEstimate density_ht_mc(const MetricSpec& spec, const Vecd& x, const VolumeParams& p = {}) {
    validate_at(spec, x);
    const int n = spec.dim;
    Vecd hw = detail_vol::indicatrix_box(spec, x, p.n_dirs);
    double vol_box = 1.0;
    for (double h : hw) vol_box *= 2.0 * h;

    std::mt19937_64 rng(p.seed ^ 0x9e3779b97f4a7c15ull);
    detail_vol::McAccum acc;
    Vecd y(static_cast<size_t>(n));
    auto visit = [&](const Vecd& pt) {
        double f2 = eval_F2(spec, x.data(), pt.data());
        double v = 0.0;
        if (std::isfinite(f2) && f2 < 1.0) {
            double d = detail_vol::det_g_dir(spec, x, pt);
            if (std::isfinite(d)) v = d;
        }
        acc.add(v);
    };

    // jittered lattice over the box, then plain uniform for the remainder
    long m = static_cast<long>(std::floor(std::pow(static_cast<double>(p.budget), 1.0 / n)));
    long lattice_total = 1;
    for (int i = 0; i < n; ++i) lattice_total *= m;
    if (m >= 2) {
        std::vector<long> idx(static_cast<size_t>(n), 0);
        for (long k = 0; k < lattice_total; ++k) {
            for (int i = 0; i < n; ++i) {
                double cell = (static_cast<double>(idx[static_cast<size_t>(i)]) + detail_vol::u01(rng)) / static_cast<double>(m);
                y[static_cast<size_t>(i)] = (2.0 * cell - 1.0) * hw[static_cast<size_t>(i)];
            }
            visit(y);
            for (int i = n - 1; i >= 0; --i) {
                if (++idx[static_cast<size_t>(i)] < m) break;
                idx[static_cast<size_t>(i)] = 0;
            }
        }
    } else {
        lattice_total = 0;
    }
    for (long k = lattice_total; k < p.budget; ++k) {
        for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = (2.0 * detail_vol::u01(rng) - 1.0) * hw[static_cast<size_t>(i)];
        visit(y);
    }

    auto [mean, sem] = acc.stats();
    double scale = vol_box / vol_ball(n);
    VolumeEstimate est;
    est.value = scale * mean;
    est.std_error = scale * sem;
    est.method = detail_vol::mc_method(p.budget, p.seed);
    est.form = VolumeForm::HolmesThompson;
    if (est.value <= 0.0 || est.std_error / est.value > p.mc_rel_tol)
        throw IntegrationBudgetExceeded("density_ht_mc: relative std error " +
                                        std::to_string(est.value > 0.0 ? est.std_error / est.value : std::numeric_limits<double>::infinity()) +
                                        " exceeds " + std::to_string(p.mc_rel_tol) + " after " + std::to_string(p.budget) + " points");
    return est;
}

// Extremum of sqrt(det g) over directions: quasi-random scan, then cyclic
// golden-section refinement on the best few candidates.
inline double density_extremal(const MetricSpec& spec, const Vecd& x, VolumeForm which, const VolumeParams& p = {}) {
    if (which != VolumeForm::Max && which != VolumeForm::Min) throw DomainError("density_extremal: form must be max or min");
    validate_at(spec, x);
    const int n = spec.dim;
    const double sign = which == VolumeForm::Max ? 1.0 : -1.0;
    auto score = [&](const Vecd& u) {
        double d = detail_vol::det_g_dir(spec, x, u);
        if (!std::isfinite(d) || d <= 0.0) return -std::numeric_limits<double>::infinity();
        return sign * std::sqrt(d);
    };

    std::vector<std::pair<double, Vecd>> ranked;
    for (const Vecd& u : detail_vol::quasi_directions(n, p.n_dirs)) {
        double s = score(u);
        if (std::isfinite(s)) ranked.emplace_back(s, u);
    }
    if (ranked.empty()) throw DomainError("density_extremal: no admissible direction");
    size_t keep = std::min<size_t>(static_cast<size_t>(p.refine_top), ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<long>(keep), ranked.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });

    const double invphi = 0.6180339887498949;
    double best = ranked[0].first;
    for (size_t c = 0; c < keep; ++c) {
        Vecd u = ranked[c].second;
        double su = ranked[c].first;
        for (int pass = 0; pass < 3; ++pass) {
            double range = 0.5 / (pass + 1);
            for (int axis = 0; axis < n; ++axis) {
                // tangent direction: e_axis minus its u-component, skip if parallel
                Vecd t(static_cast<size_t>(n), 0.0);
                t[static_cast<size_t>(axis)] = 1.0;
                double proj = dot(t, u);
                for (int i = 0; i < n; ++i) t[static_cast<size_t>(i)] -= proj * u[static_cast<size_t>(i)];
                double tn = norm2(t);
                if (tn < 1e-8) continue;
                for (double& cc : t) cc /= tn;
                auto at = [&](double th) {
                    Vecd w(static_cast<size_t>(n));
                    for (int i = 0; i < n; ++i)
                        w[static_cast<size_t>(i)] = std::cos(th) * u[static_cast<size_t>(i)] + std::sin(th) * t[static_cast<size_t>(i)];
                    return score(w);
                };
                double a = -range, b = range;
                double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
                double f1 = at(x1), f2 = at(x2);
                for (int it = 0; it < 36; ++it) {
                    if (f1 < f2) {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + invphi * (b - a);
                        f2 = at(x2);
                    } else {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - invphi * (b - a);
                        f1 = at(x1);
                    }
                }
                double th = 0.5 * (a + b);
                double fm = at(th);
                if (fm > su) {
                    su = fm;
                    for (int i = 0; i < n; ++i)
                        u[static_cast<size_t>(i)] = std::cos(th) * u[static_cast<size_t>(i)] + std::sin(th) * t[static_cast<size_t>(i)];
                    double un = norm2(u);
                    for (double& cc : u) cc /= un;
                }
            }
        }
        best = std::max(best, su);
    }
    return sign * best;
}

// Point density for a given form. Riemannian specs (recursively, warped
// products of Riemannian pieces included) have y-independent g, so all three
// integral/extremal forms collapse to sqrt(det g) exactly.
inline double density(const MetricSpec& spec, const Vecd& x, VolumeForm form, const VolumeParams& p = {}) {
    if (form == VolumeForm::BHRandersClosedForm) {
        if (spec.kind != MetricKind::Randers) throw DomainError("BH closed form supports Randers specs only");
        double b2 = randers_b_norm2(spec, x);
        if (b2 >= 1.0) throw DomainError("BH closed form: |b|_alpha >= 1");
        Matd a = metric_matrix(*spec.alpha, x);
        return std::sqrt(determinant(a)) * std::pow(1.0 - b2, 0.5 * (spec.dim + 1));
    }
    if (is_riemannian(spec)) {
        Vecd ones(static_cast<size_t>(spec.dim), 1.0);
        double d = detail_vol::det_g_dir(spec, x, ones);
        if (!(d > 0.0)) throw NotPositiveDefinite("density: det g <= 0 at grid point");
        return std::sqrt(d);
    }
    switch (form) {
        case VolumeForm::HolmesThompson: return density_ht_mc(spec, x, p).value;
        case VolumeForm::Max:
        case VolumeForm::Min: return density_extremal(spec, x, form, p);
        default: throw DomainError("unsupported volume form");
    }
}

// sigma_BH of a constant-b Randers norm: the unit ball {|y| + <b,y> < 1} is an
// ellipsoid with axes 1/(1-b^2), (1-b^2)^{-1/2} x (n-1).
inline double bh_randers_closed_form(double b_norm, int n) {
    if (!(b_norm >= 0.0) || b_norm >= 1.0) throw DomainError("bh_randers_closed_form needs 0 <= b_norm < 1");
    return std::pow(1.0 - b_norm * b_norm, 0.5 * (n + 1));
}

namespace detail_vol {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
inline void gauss_legendre(int k, Vecd& nodes, Vecd& weights) {
    nodes.assign(static_cast<size_t>(k), 0.0);
    weights.assign(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < (k + 1) / 2; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (k + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = k * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        nodes[static_cast<size_t>(i)] = -t;
        nodes[static_cast<size_t>(k - 1 - i)] = t;
        double w = 2.0 / ((1.0 - t * t) * dp * dp);
        weights[static_cast<size_t>(i)] = w;
        weights[static_cast<size_t>(k - 1 - i)] = w;
    }
}

struct Axis {
    Vecd nodes, weights;
};

inline Axis axis_rule(const Chart& ch, int i, int k) {
    auto [lo, hi] = ch.domain[static_cast<size_t>(i)];
    Axis ax;
    if (ch.periodic[static_cast<size_t>(i)]) {
        // midpoint rule: spectrally accurate on the circle
        double h = (hi - lo) / k;
        for (int j = 0; j < k; ++j) {
            ax.nodes.push_back(lo + (j + 0.5) * h);
            ax.weights.push_back(h);
        }
    } else {
        Vecd t, w;
        gauss_legendre(k, t, w);
        for (int j = 0; j < k; ++j) {
            ax.nodes.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * t[static_cast<size_t>(j)]);
            ax.weights.push_back(0.5 * (hi - lo) * w[static_cast<size_t>(j)]);
        }
    }
    return ax;
}

}  // namespace detail_vol

// Total volume over the chart box. HT on a genuinely Finsler spec integrates
// det g over {F <= 1} in (x, y) jointly by MC; every other combination is
// product quadrature of the point density.
inline VolumeEstimate total_volume(const MetricSpec& spec, VolumeForm form, const VolumeParams& p = {},
                                   const Chart* dom = nullptr) {
    const Chart& ch = dom ? *dom : spec.chart;
    const int n = spec.dim;
    if (static_cast<int>(ch.domain.size()) != n) throw DimensionMismatch("total_volume: domain/chart dimension");

    if (form == VolumeForm::HolmesThompson && !is_riemannian(spec)) {
        // joint MC: y box from the widest indicatrix over a coarse x lattice
        Vecd hw(static_cast<size_t>(n), 0.0);
        std::mt19937_64 rng0(p.seed ^ 0xda3e39cb94b95bdbull);
        for (int k = 0; k < 24; ++k) {
            Vecd xs(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) {
                auto [lo, hi] = ch.domain[static_cast<size_t>(i)];
                xs[static_cast<size_t>(i)] = lo + (hi - lo) * detail_vol::u01(rng0);
            }
            validate_at(spec, xs);
            Vecd h = detail_vol::indicatrix_box(spec, xs, std::max(256, p.n_dirs / 8));
            for (int i = 0; i < n; ++i) hw[static_cast<size_t>(i)] = std::max(hw[static_cast<size_t>(i)], h[static_cast<size_t>(i)]);
        }
        for (double& h : hw) h *= 1.1;

        double vol_x = 1.0, vol_y = 1.0;
        for (int i = 0; i < n; ++i) {
            auto [lo, hi] = ch.domain[static_cast<size_t>(i)];
            vol_x *= hi - lo;
            vol_y *= 2.0 * hw[static_cast<size_t>(i)];
        }
        std::mt19937_64 rng(p.seed ^ 0x7f4a7c15f39cc060ull);
        detail_vol::McAccum acc;
        Vecd xs(static_cast<size_t>(n)), ys(static_cast<size_t>(n));
        for (long k = 0; k < p.budget; ++k) {
            for (int i = 0; i < n; ++i) {
                auto [lo, hi] = ch.domain[static_cast<size_t>(i)];
                xs[static_cast<size_t>(i)] = lo + (hi - lo) * detail_vol::u01(rng);
                ys[static_cast<size_t>(i)] = (2.0 * detail_vol::u01(rng) - 1.0) * hw[static_cast<size_t>(i)];
            }
            double f2 = eval_F2(spec, xs.data(), ys.data());
            double v = 0.0;
            if (std::isfinite(f2) && f2 <= 1.0) {
                double d = detail_vol::det_g_dir(spec, xs, ys);
                if (std::isfinite(d)) v = d;
            }
            acc.add(v);
        }
        auto [mean, sem] = acc.stats();
        double scale = vol_x * vol_y / vol_ball(n);
        VolumeEstimate est;
        est.value = scale * mean;
        est.std_error = scale * sem;
        est.method = detail_vol::mc_method(p.budget, p.seed);
        est.form = form;
        if (est.value <= 0.0 || est.std_error / est.value > p.mc_rel_tol)
            throw IntegrationBudgetExceeded("total_volume: relative std error above " + std::to_string(p.mc_rel_tol) +
                                            " after " + std::to_string(p.budget) + " points");
        return est;
    }

    const bool exact_density = is_riemannian(spec) ||
                               (form == VolumeForm::BHRandersClosedForm && spec.kind == MetricKind::Randers);
    const int k = exact_density ? p.quad_order : p.quad_order_scan;
    std::vector<detail_vol::Axis> axes;
    for (int i = 0; i < n; ++i) axes.push_back(detail_vol::axis_rule(ch, i, k));

    double total = 0.0;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    Vecd xs(static_cast<size_t>(n));
    for (;;) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            xs[static_cast<size_t>(i)] = axes[static_cast<size_t>(i)].nodes[static_cast<size_t>(idx[static_cast<size_t>(i)])];
            w *= axes[static_cast<size_t>(i)].weights[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        }
        total += w * density(spec, xs, form, p);
        int i = n - 1;
        for (; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < k) break;
            idx[static_cast<size_t>(i)] = 0;
        }
        if (i < 0) break;
    }
    VolumeEstimate est;
    est.value = total;
    est.std_error = 0.0;
    est.method = "product-quadrature(" + std::to_string(k) + ")";
    est.form = form;
    return est;
}

struct WarpedBoundResult {
    double bound = 0.0;
    bool holds = false;
    VolumeEstimate total;
    double f_min = 0.0, f_max = 0.0;
};

// Finiteness bound for warped products: the proof's product form
//   HT:      b^{2 n2} VolB^{n1}(1) VolB^{n2}(1/a) / VolB^n(1) x V1 x V2
//   max/min: b^{2 n2} x V1 x V2
// with the comparison slacked by 3x the stacked relative MC errors.
inline WarpedBoundResult warped_volume_bound(const MetricSpec& w, double a, double b, const VolumeEstimate& vol_base,
                                             const VolumeEstimate& vol_fiber, VolumeForm form, const VolumeParams& p = {}) {
    if (w.kind != MetricKind::WarpedProduct) throw DomainError("warped_volume_bound needs a warped product spec");
    if (!(a > 0.0) || !(b >= a)) throw DomainError("warped_volume_bound needs 0 < a <= b");
    const int n1 = w.base->dim, n2 = w.fiber->dim;

    WarpedBoundResult res;
    res.f_min = std::numeric_limits<double>::infinity();
    res.f_max = -res.f_min;
    const int grid = n1 == 1 ? 4096 : 64;
    std::vector<int> idx(static_cast<size_t>(n1), 0);
    Vecd xb(static_cast<size_t>(n1));
    for (;;) {
        for (int i = 0; i < n1; ++i) {
            auto [lo, hi] = w.base->chart.domain[static_cast<size_t>(i)];
            xb[static_cast<size_t>(i)] = lo + (hi - lo) * (idx[static_cast<size_t>(i)] + 0.5) / grid;
        }
        double f = w.warp.eval(xb.data(), n1, static_cast<const double*>(nullptr), 0);
        res.f_min = std::min(res.f_min, f);
        res.f_max = std::max(res.f_max, f);
        int i = n1 - 1;
        for (; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < grid) break;
            idx[static_cast<size_t>(i)] = 0;
        }
        if (i < 0) break;
    }
    if (res.f_min < a - 1e-9 || res.f_max > b + 1e-9)
        throw WarpBoundViolated("warp function leaves [" + std::to_string(a) + ", " + std::to_string(b) + "]: sampled range [" +
                                std::to_string(res.f_min) + ", " + std::to_string(res.f_max) + "]");

    if (form == VolumeForm::HolmesThompson)
        res.bound = std::pow(b, 2.0 * n2) * vol_ball(n1) * vol_ball(n2, 1.0 / a) / vol_ball(n1 + n2) * vol_base.value *
                    vol_fiber.value;
    else if (form == VolumeForm::Max || form == VolumeForm::Min)
        res.bound = std::pow(b, 2.0 * n2) * vol_base.value * vol_fiber.value;
    else
        throw DomainError("warped_volume_bound supports HT, max, min");

    res.total = total_volume(w, form, p);
    auto rel = [](const VolumeEstimate& e) { return e.value > 0.0 ? e.std_error / e.value : 0.0; };
    double slack = 1.0 + 3.0 * (rel(res.total) + rel(vol_base) + rel(vol_fiber));
    res.holds = res.total.value <= res.bound * slack;
    return res;
}

// Density as a plain callback, for distortion and S-curvature.
inline std::function<double(const Vecd&)> density_fn(const MetricSpec& spec, VolumeForm form, const VolumeParams& p = {}) {
    MetricSpec copy = spec;
    VolumeParams pc = p;
    return [copy, form, pc](const Vecd& x) { return density(copy, x, form, pc); };
}

}  // namespace finsler
