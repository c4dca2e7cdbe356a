#pragma once

// Public derivative requests: mixed partials of arbitrary targets in chart (x)
// and tangent (y) coordinates, orders up to 4 total. One nesting level of dual
// arithmetic per differentiation step; the depth is a compile-time property,
// so requests dispatch to fixed instantiations. Deeper derivatives (the
// Berwald and Ricci-tensor stacks) are realized inside the curvature module by
// nesting these same levels, never as a single order-5+ request.

#include <array>
#include <cmath>
#include <vector>

#include "dual.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "metric.hpp"

namespace finsler {

using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

// Targets implement evaluation at every supported nesting depth; the generic
// adapter below forwards a single templated callable to all of them.
struct DiffTarget {
    virtual ~DiffTarget() = default;
    virtual int out_dim() const = 0;
    virtual void eval(const double* x, int nx, const double* y, int ny, double* out) const = 0;
    virtual void eval(const D1* x, int nx, const D1* y, int ny, D1* out) const = 0;
    virtual void eval(const D2* x, int nx, const D2* y, int ny, D2* out) const = 0;
    virtual void eval(const D3* x, int nx, const D3* y, int ny, D3* out) const = 0;
    virtual void eval(const D4* x, int nx, const D4* y, int ny, D4* out) const = 0;
};

template <class F>
struct FnTarget final : DiffTarget {
    F f;
    int m;
    FnTarget(F fn, int out) : f(std::move(fn)), m(out) {}
    int out_dim() const override { return m; }
    void eval(const double* x, int nx, const double* y, int ny, double* out) const override { f(x, nx, y, ny, out); }
    void eval(const D1* x, int nx, const D1* y, int ny, D1* out) const override { f(x, nx, y, ny, out); }
    void eval(const D2* x, int nx, const D2* y, int ny, D2* out) const override { f(x, nx, y, ny, out); }
    void eval(const D3* x, int nx, const D3* y, int ny, D3* out) const override { f(x, nx, y, ny, out); }
    void eval(const D4* x, int nx, const D4* y, int ny, D4* out) const override { f(x, nx, y, ny, out); }
};

template <class F>
FnTarget<F> make_target(F f, int out_dim) {
    return FnTarget<F>(std::move(f), out_dim);
}

struct MetricF2Target final : DiffTarget {
    const MetricSpec& spec;
    explicit MetricF2Target(const MetricSpec& s) : spec(s) {}
    int out_dim() const override { return 1; }
    void eval(const double* x, int, const double* y, int, double* out) const override { out[0] = eval_F2(spec, x, y); }
    void eval(const D1* x, int, const D1* y, int, D1* out) const override { out[0] = eval_F2(spec, x, y); }
    void eval(const D2* x, int, const D2* y, int, D2* out) const override { out[0] = eval_F2(spec, x, y); }
    void eval(const D3* x, int, const D3* y, int, D3* out) const override { out[0] = eval_F2(spec, x, y); }
    void eval(const D4* x, int, const D4* y, int, D4* out) const override { out[0] = eval_F2(spec, x, y); }
};

enum class VarBlock { X, Y };

struct DerivStep {
    VarBlock block;
    int index;
    int repetition = 1;
};

struct DerivRequest {
    Vecd x;
    Vecd y;
    std::vector<DerivStep> orders;
    double y_ref = 1.0;  // slit floor scale
};

namespace detail {

template <int K>
struct NestedDualT {
    using type = Dual<typename NestedDualT<K - 1>::type>;
};
template <>
struct NestedDualT<0> {
    using type = double;
};
template <int K>
using NestedDual = typename NestedDualT<K>::type;

template <int K>
NestedDual<K> seeded(double v, const std::array<bool, 4>& mask) {
    if constexpr (K == 0) {
        return v;
    } else {
        using Lower = NestedDual<K - 1>;
        return NestedDual<K>(seeded<K - 1>(v, mask), mask[K - 1] ? Lower(1.0) : Lower(0.0));
    }
}

template <int K>
double top_partial(const NestedDual<K>& d) {
    if constexpr (K == 0)
        return d;
    else
        return top_partial<K - 1>(d.b);
}

template <int K>
Vecd eval_depth(const DiffTarget& f, const Vecd& x, const Vecd& y, const std::vector<std::pair<VarBlock, int>>& dirs) {
    using D = NestedDual<K>;
    std::vector<D> xd(x.size()), yd(y.size());
    std::array<bool, 4> mask{};
    for (size_t i = 0; i < x.size(); ++i) {
        for (int j = 0; j < K; ++j) mask[static_cast<size_t>(j)] = dirs[static_cast<size_t>(j)] == std::pair{VarBlock::X, static_cast<int>(i)};
        xd[i] = seeded<K>(x[i], mask);
    }
    for (size_t i = 0; i < y.size(); ++i) {
        for (int j = 0; j < K; ++j) mask[static_cast<size_t>(j)] = dirs[static_cast<size_t>(j)] == std::pair{VarBlock::Y, static_cast<int>(i)};
        yd[i] = seeded<K>(y[i], mask);
    }
    std::vector<D> raw(static_cast<size_t>(f.out_dim()));
    f.eval(xd.data(), static_cast<int>(x.size()), yd.data(), static_cast<int>(y.size()), raw.data());
    Vecd out(raw.size());
    for (size_t r = 0; r < raw.size(); ++r) {
        out[r] = top_partial<K>(raw[r]);
        if (!std::isfinite(out[r]) || !std::isfinite(scalar_value(raw[r]))) throw NonFinite("target returned non-finite value");
    }
    return out;
}

}  // namespace detail

// Mixed partial of the target along the requested steps; returns one value per
// output component.
inline Vecd partial(const DiffTarget& f, const DerivRequest& req) {
    int total = 0;
    std::vector<std::pair<VarBlock, int>> dirs;
    for (const DerivStep& s : req.orders) {
        if (s.repetition < 1) throw EngineError("derivative repetition < 1");
        total += s.repetition;
        for (int r = 0; r < s.repetition; ++r) dirs.emplace_back(s.block, s.index);
    }
    if (total > 4) throw OrderTooHigh("total derivative order " + std::to_string(total) + " > 4");
    if (total < 1) throw EngineError("empty derivative request");
    if (norm2(req.y) <= kYFloor * req.y_ref) throw SlitViolation("partial: basepoint below slit floor");
    switch (total) {
        case 1:
            return detail::eval_depth<1>(f, req.x, req.y, dirs);
        case 2:
            return detail::eval_depth<2>(f, req.x, req.y, dirs);
        case 3:
            return detail::eval_depth<3>(f, req.x, req.y, dirs);
        default:
            return detail::eval_depth<4>(f, req.x, req.y, dirs);
    }
}

// 1/2 d^2 F^2/dy_i dy_j from a scalar target; both step orders are evaluated
// and the pair symmetrized, with the asymmetry reported back.
inline Matd hessian_y(const DiffTarget& f2, const TangentSample& s, double* asym_out = nullptr) {
    const int n = static_cast<int>(s.y.size());
    Matd h(n, n);
    double asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            DerivRequest r1{s.x, s.y, {{VarBlock::Y, i}, {VarBlock::Y, j}}};
            double hij = partial(f2, r1)[0];
            double hji = hij;
            if (j != i) {
                DerivRequest r2{s.x, s.y, {{VarBlock::Y, j}, {VarBlock::Y, i}}};
                hji = partial(f2, r2)[0];
            }
            asym = std::max(asym, std::abs(hij - hji));
            h(i, j) = h(j, i) = 0.25 * (hij + hji);  // 1/2 * symmetrized second derivative
        }
    if (asym_out) *asym_out = asym;
    if (asym > 1e-10) throw EngineError("hessian_y asymmetry " + std::to_string(asym) + " above tol_sym");
    return h;
}

}  // namespace finsler
