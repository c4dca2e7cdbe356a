// Shared metric specimens for the test suites.  Everything here is cheap to
// construct; tests that mutate a spec should copy it first.
#pragma once

#include <string>
#include <vector>

#include "finsler/metric.hpp"
#include "finsler/warped.hpp"

namespace zoo {

using finsler::Chart;
using finsler::MetricSpec;
using finsler::WarpedSpec;

inline MetricSpec euclid(int n) { return finsler::euclidean_spec(n); }

// Flat but anisotropic; exercises the constant nontrivial metric path.
inline MetricSpec diag14() {
    return finsler::riemannian_spec(2, {"1", "0", "0", "4"}, finsler::box_chart(2), "diag14");
}

// Round unit sphere in polar coordinates, poles excluded.  theta is a box
// coordinate (the chart is honest about not wrapping), phi is periodic.
inline MetricSpec sphere2() {
    Chart c;
    c.periodic = {false, true};
    c.period = {0.0, 6.28318530717958647692};
    c.domain = {{0.35, 2.79}, {0.0, 6.28318530717958647692}};
    return finsler::riemannian_spec(2, {"1", "0", "0", "sin(theta)^2"}, c, "sphere2");
}

inline MetricSpec flat_torus(int n, std::string name = "flat-torus") {
    std::vector<std::string> g(static_cast<size_t>(n) * n, "0");
    for (int i = 0; i < n; ++i) g[static_cast<size_t>(i) * n + i] = "1";
    return finsler::riemannian_spec(n, g, finsler::torus_chart(n), std::move(name));
}

// Surface of revolution (R = 2, r = 1).  Gauss curvature cos(theta)/(2+cos(theta)),
// so Ric = K g gives a closed form to pin the oracle against.
inline MetricSpec torus_rev() {
    return finsler::riemannian_spec(2, {"1", "0", "0", "(2 + cos(theta))^2"},
                                    finsler::torus_chart(2), "torus-rev");
}

// Diagonal with cross-coordinate dependence; mild coefficients keep the
// finite-difference oracle truncation far below its tolerance.
inline MetricSpec diag3() {
    return finsler::riemannian_spec(
        3, {"1 + 0.3*cos(x2)", "0", "0", "0", "1.2 + 0.3*sin(x3)", "0", "0", "0", "1.1 + 0.3*cos(x1)"},
        finsler::box_chart(3), "diag3");
}

inline MetricSpec offdiag2() {
    return finsler::riemannian_spec(
        2, {"1.5", "0.2*cos(x1 + x2)", "0.2*cos(x1 + x2)", "1.2"},
        finsler::box_chart(2), "offdiag2");
}

// Constant-coefficient Randers perturbations of Euclidean space.  These are
// locally Minkowski: spray, curvatures and E all vanish identically.
inline MetricSpec randers_flat(double b0, int n = 3) {
    std::vector<std::string> b(static_cast<size_t>(n), "0");
    b[0] = std::to_string(b0);
    return finsler::randers_spec(finsler::euclidean_spec(n), b, "randers-flat");
}

// |b| = 1.1 violates strong convexity; validation must reject it.
inline MetricSpec randers_bad() {
    return finsler::randers_spec(finsler::euclidean_spec(2), {"1.1", "0"}, "randers-bad");
}

// Position-dependent b: not Berwald, nonzero spray and E in general.
inline MetricSpec randers_xdep() {
    return finsler::randers_spec(finsler::euclidean_spec(2), {"0.2 + 0.1*sin(x1)", "0"},
                                 "randers-xdep");
}

inline MetricSpec randers_torus(double b0) {
    MetricSpec alpha = flat_torus(2, "alpha-torus");
    return finsler::randers_spec(alpha, {std::to_string(b0), "0"}, "randers-torus");
}

// Non-Randers Minkowski norm with genuinely quartic indicatrix.
inline MetricSpec quartic_mink() {
    return finsler::minkowski_spec(2, "(y1^4 + y2^4 + 2.2*y1^2*y2^2)^0.25", "quartic");
}

inline MetricSpec circle() {
    return finsler::riemannian_spec(1, {"1"}, finsler::torus_chart(1), "circle");
}

inline MetricSpec line(double lo = -1.0, double hi = 1.0) {
    return finsler::riemannian_spec(1, {"1"}, finsler::box_chart(1, lo, hi), "line");
}

// R x_{e^t} R^n2 with flat fiber: Einstein with lambda = -n2, mu = 0.
inline WarpedSpec hyperbolic(int n2 = 2) {
    return finsler::make_warped(line(), finsler::euclidean_spec(n2), "exp(t)", "hyperbolic");
}

// Compact Riemannian warped product with honestly nonconstant warp.
inline WarpedSpec torus_cos_torus() {
    return finsler::make_warped(circle(), flat_torus(2), "2 + cos(theta)", "torus-cos-torus");
}

// Finsler fiber (constant-b Randers): the fiber Cartan tensor is nonzero, so
// the mixed warped Berwald family driven by (f^2)' [F2^2]_{y y y} lights up
// for nonconstant f, while the fiber's own spray still vanishes.
inline WarpedSpec warped_randers_fiber() {
    MetricSpec fiber = finsler::randers_spec(finsler::euclidean_spec(2), {"0.3", "0"}, "rfiber");
    return finsler::make_warped(circle(), fiber, "2 + cos(theta)", "circle-cos-randers");
}

inline WarpedSpec warped_randers_fiber_constf() {
    MetricSpec fiber = finsler::randers_spec(finsler::euclidean_spec(2), {"0.3", "0"}, "rfiber");
    return finsler::make_warped(circle(), fiber, "2", "circle-const-randers");
}

// Position-dependent fiber Randers term: the fiber spray is nonzero, which
// feeds the family built from fiber spray derivatives.
inline WarpedSpec warped_randers_xfiber() {
    return finsler::make_warped(circle(), randers_xdep(), "2 + cos(theta)", "circle-cos-rxdep");
}

// Constant warp over a flat pair: Einstein with lambda = 0 and constant f.
inline WarpedSpec trivial_product() {
    return finsler::make_warped(circle(), flat_torus(2), "1", "trivial-product");
}

// Curved compact base, flat fiber, constant warp.  Not Einstein (the base
// block carries curvature, the fiber block none).
inline WarpedSpec sphere_flat_product() {
    return finsler::make_warped(sphere2(), flat_torus(1), "1", "sphere-flat-product");
}

// Family of compact-base specs with nonconstant positive warp, seeded so the
// falsification sweep is reproducible.
inline WarpedSpec falsifier(unsigned long long k) {
    double a = 1.5 + 0.05 * static_cast<double>(k % 21);
    double c = 0.3 + 0.02 * static_cast<double>(k % 11);
    double d = 0.37 * static_cast<double>(k % 17);
    std::string f = std::to_string(a) + " + " + std::to_string(c) + "*cos(theta + " +
                    std::to_string(d) + ")";
    int n2 = 1 + static_cast<int>(k % 2);
    return finsler::make_warped(circle(), flat_torus(n2), f,
                                "falsifier-" + std::to_string(k));
}

}  // namespace zoo
