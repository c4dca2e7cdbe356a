#pragma once

// Distortion tau = ln( sqrt(det g(x,y)) / sigma(x) ) against a chosen volume
// density, and S-curvature as its derivative along the geodesic through the
// sample. The derivative is a 5-point central stencil at t = +-h, +-2h with
// the geodesic marched by RK4 at step h/8; the density keeps one MC stream
// for every x (common random numbers), so stencil differences cancel noise.

#include <cmath>
#include <vector>

#include "curvature.hpp"
#include "geodesic.hpp"
#include "metric.hpp"
#include "volume.hpp"

namespace finsler {

inline double distortion(const MetricSpec& spec, const TangentSample& s, VolumeForm form, const VolumeParams& p = {}) {
    require_slit(spec, s.y, "distortion");
    validate_at(spec, s.x);
    double d = detail_vol::det_g_dir(spec, s.x, s.y);
    if (!(d > 0.0)) throw NonFinite("distortion: det g not positive at sample");
    double sigma = density(spec, s.x, form, p);
    if (!(sigma > 0.0)) throw NonFinite("distortion: density not positive at sample");
    return std::log(std::sqrt(d) / sigma);
}

inline double s_curvature(const MetricSpec& spec, const TangentSample& s, VolumeForm form, const VolumeParams& p = {},
                          double h = 1e-4) {
    require_slit(spec, s.y, "s_curvature");
    validate_at(spec, s.x);

    // march the geodesic to t and return tau there; dt may be negative
    auto tau_at = [&](double t) {
        detail::GeoState st{s.x, s.y};
        int steps = 8 * static_cast<int>(std::lround(std::abs(t) / h));
        double dt = steps ? t / steps : 0.0;
        for (int k = 0; k < steps; ++k) {
            detail::GeoState k1 = detail::geo_rhs(spec, st);
            detail::GeoState k2 = detail::geo_rhs(spec, detail::geo_axpy(st, 0.5 * dt, k1));
            detail::GeoState k3 = detail::geo_rhs(spec, detail::geo_axpy(st, 0.5 * dt, k2));
            detail::GeoState k4 = detail::geo_rhs(spec, detail::geo_axpy(st, dt, k3));
            for (size_t i = 0; i < st.x.size(); ++i) {
                st.x[i] += dt / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
                st.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
            }
        }
        return distortion(spec, TangentSample{st.x, st.v}, form, p);
    };

    return (-tau_at(2.0 * h) + 8.0 * tau_at(h) - 8.0 * tau_at(-h) + tau_at(-2.0 * h)) / (12.0 * h);
}

}  // namespace finsler
