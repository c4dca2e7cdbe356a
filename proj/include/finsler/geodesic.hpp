#pragma once

// Geodesic integration. The trajectory solves xdd^i + 2 G^i(x, xd) = 0 with a
// fixed-step classical RK4; F(x, xd) is recorded per step so speed drift is
// observable rather than silently renormalized away.

#include <cmath>
#include <vector>

#include "curvature.hpp"
#include "errors.hpp"
#include "metric.hpp"

namespace finsler {

struct GeodesicTrajectory {
    std::vector<double> t;
    std::vector<Vecd> x;
    std::vector<Vecd> xdot;
    std::vector<double> speed;  // F(x, xdot) per stored step
    double speed_drift = 0.0;   // max |F - F(0)| / F(0)
};

namespace detail {

struct GeoState {
    Vecd x, v;
};

inline GeoState geo_rhs(const MetricSpec& spec, const GeoState& s) {
    std::vector<double> G = spray_T<double>(spec, s.x, s.v);
    GeoState d;
    d.x = s.v;
    d.v.resize(G.size());
    for (size_t i = 0; i < G.size(); ++i) d.v[i] = -2.0 * G[i];
    return d;
}

inline GeoState geo_axpy(const GeoState& s, double c, const GeoState& d) {
    GeoState r = s;
    for (size_t i = 0; i < r.x.size(); ++i) {
        r.x[i] += c * d.x[i];
        r.v[i] += c * d.v[i];
    }
    return r;
}

inline void wrap_periodic(const MetricSpec& spec, Vecd& x) {
    const Chart& c = spec.chart;
    for (int i = 0; i < spec.dim; ++i)
        if (c.periodic[static_cast<size_t>(i)]) {
            double p = c.period[static_cast<size_t>(i)];
            x[static_cast<size_t>(i)] -= p * std::floor(x[static_cast<size_t>(i)] / p);
        }
}

}  // namespace detail

inline GeodesicTrajectory integrate(const MetricSpec& spec, const TangentSample& start, double t_end, double step,
                                    int store_every = 1) {
    require_slit(spec, start.y, "integrate");
    validate_at(spec, start.x);
    if (step <= 0.0 || t_end < 0.0) throw EngineError("integrate: need step > 0 and t_end >= 0");
    if (store_every < 1) store_every = 1;

    GeodesicTrajectory out;
    detail::GeoState s{start.x, start.y};
    const double v0 = norm2(start.y);
    const double f0 = eval_F(spec, {start.x, start.y});
    const long n_steps = std::lround(std::ceil(t_end / step - 1e-12));
    double t = 0.0;

    auto record = [&](double tt, const detail::GeoState& st) {
        out.t.push_back(tt);
        out.x.push_back(st.x);
        out.xdot.push_back(st.v);
        double f = eval_F(spec, {st.x, st.v});
        out.speed.push_back(f);
        out.speed_drift = std::max(out.speed_drift, std::abs(f - f0) / f0);
    };
    record(0.0, s);

    for (long k = 0; k < n_steps; ++k) {
        double h = std::min(step, t_end - t);
        detail::GeoState k1 = detail::geo_rhs(spec, s);
        detail::GeoState k2 = detail::geo_rhs(spec, detail::geo_axpy(s, 0.5 * h, k1));
        detail::GeoState k3 = detail::geo_rhs(spec, detail::geo_axpy(s, 0.5 * h, k2));
        detail::GeoState k4 = detail::geo_rhs(spec, detail::geo_axpy(s, h, k3));
        for (size_t i = 0; i < s.x.size(); ++i) {
            s.x[i] += h / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
            s.v[i] += h / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
        }
        detail::wrap_periodic(spec, s.x);
        t += h;
        double vn = norm2(s.v);
        if (!std::isfinite(vn) || vn > 1e6 * v0) throw BlowUp("geodesic velocity exceeded 1e6 x initial at t = " + std::to_string(t));
        if ((k + 1) % store_every == 0 || k + 1 == n_steps) record(t, s);
    }
    return out;
}

}  // namespace finsler
