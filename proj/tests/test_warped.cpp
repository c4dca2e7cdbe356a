#include "finsler/warped.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finsler/curvature.hpp"
#include "oracles.hpp"
#include "zoo.hpp"

using finsler::MetricSpec;
using finsler::TangentSample;
using finsler::Vecd;
using finsler::WarpedSpec;

namespace {

std::vector<TangentSample> draw_batch(const MetricSpec& m, int n, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::vector<TangentSample> out;
    for (int k = 0; k < n; ++k) out.push_back(finsler::draw_sample(m, rng));
    return out;
}

const finsler::BerwaldFamily& family(const std::vector<finsler::BerwaldFamily>& fams,
                                     const std::string& tag) {
    for (const auto& f : fams)
        if (f.tag == tag) return f;
    throw std::runtime_error("missing family " + tag);
}

}  // namespace

TEST(Warped, WarpFieldsExponential) {
    WarpedSpec w = zoo::hyperbolic(2);
    double t = 0.4;
    finsler::WarpFields wf = finsler::warp_fields(w, {t});
    double e = std::exp(t);
    EXPECT_NEAR(wf.f, e, 1e-14);
    EXPECT_NEAR(wf.grad[0], e, 1e-13);
    EXPECT_NEAR(wf.hess(0, 0), e, 1e-12);
    // minus-trace convention
    EXPECT_NEAR(wf.lap, -e, 1e-12);
    EXPECT_NEAR(wf.grad_norm2, e * e, 1e-12);
}

TEST(Warped, WarpFieldsMatchFiniteDifferencesOnCurvedBase) {
    WarpedSpec w =
        finsler::make_warped(zoo::sphere2(), zoo::euclid(1), "2 + 0.3*sin(theta)*cos(phi)");
    Vecd x1 = {1.1, 0.6};
    finsler::WarpFields wf = finsler::warp_fields(w, x1);
    EXPECT_NEAR(wf.f, oracle::warp_at(w, x1), 1e-14);
    Vecd g = oracle::warp_grad_fd(w, x1);
    EXPECT_NEAR(wf.grad[0], g[0], 1e-9);
    EXPECT_NEAR(wf.grad[1], g[1], 1e-9);
    finsler::Matd h = oracle::warp_hess_fd(w, x1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(wf.hess(i, j), h(i, j), 1e-7);
    EXPECT_NEAR(wf.lap, oracle::warp_lap_fd(w, x1), 1e-7);
}

TEST(Warped, SprayBlocksHandValuesOnHyperbolic) {
    WarpedSpec w = zoo::hyperbolic(1);
    // at t = 0: f = 1, (f^2)' = 2; base G = -1/4 * 2 * y2^2, fiber G = y1 y2
    TangentSample s{{0.0, 0.5}, {0.7, 0.2}};
    finsler::WarpedSprayBlocks b = finsler::warped_spray(w, s);
    EXPECT_NEAR(b.base[0], -0.25 * 2.0 * 0.04, 1e-13);
    EXPECT_NEAR(b.fiber[0], 0.7 * 0.2, 1e-13);
}

TEST(Warped, ClosedSprayMatchesAssembled) {
    for (const WarpedSpec& w : {zoo::hyperbolic(2), zoo::torus_cos_torus(),
                                zoo::warped_randers_fiber()}) {
        MetricSpec assembled = finsler::assemble(w);
        for (const TangentSample& s : draw_batch(assembled, 15, 17)) {
            finsler::SprayData sd = finsler::spray(assembled, s);
            finsler::WarpedSprayBlocks blocks = finsler::warped_spray(w, s);
            const int n1 = w.base.dim;
            for (int i = 0; i < n1; ++i)
                EXPECT_NEAR(sd.G[static_cast<size_t>(i)], blocks.base[static_cast<size_t>(i)],
                            1e-9)
                    << w.name;
            for (int a = 0; a < w.fiber.dim; ++a)
                EXPECT_NEAR(sd.G[static_cast<size_t>(n1 + a)],
                            blocks.fiber[static_cast<size_t>(a)], 1e-9)
                    << w.name;
        }
    }
}

TEST(Warped, HyperbolicModelIsEinstein) {
    WarpedSpec w = zoo::hyperbolic(2);
    MetricSpec assembled = finsler::assemble(w);
    std::mt19937_64 rng(23);
    for (double t : {-1.0, -0.5, 0.0, 0.6, 1.0}) {
        Vecd x = {t, 0.3, -0.4};
        std::vector<Vecd> ys;
        for (int k = 0; k < 8; ++k) ys.push_back(finsler::draw_y(assembled, rng));
        finsler::EinsteinFit fit = finsler::einstein_fit(assembled, x, ys);
        EXPECT_NEAR(fit.lambda, -2.0, 1e-5);
        EXPECT_LT(fit.residual, 1e-6);
        EXPECT_NEAR(finsler::compute_mu(w, fit.lambda, {t}), 0.0, 1e-7);
        EXPECT_NEAR(finsler::compute_mu(w, -2.0, {t}), 0.0, 1e-9);
    }
}

TEST(Warped, RicciBlocksClosedHyperbolic) {
    WarpedSpec w = zoo::hyperbolic(2);
    TangentSample s{{0.3, 0.1, -0.2}, {0.5, 0.8, -0.4}};
    finsler::RicciBlocks rb = finsler::ricci_blocks_closed(w, s);
    double f2 = std::exp(2.0 * 0.3);
    EXPECT_NEAR(rb.base(0, 0), -2.0, 1e-10);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) EXPECT_NEAR(rb.fiber(a, b), a == b ? -2.0 * f2 : 0.0, 1e-10);
}

TEST(Warped, RicciBlockResidualsSmall) {
    for (const WarpedSpec& w : {zoo::hyperbolic(2), zoo::torus_cos_torus(),
                                zoo::warped_randers_fiber()}) {
        MetricSpec assembled = finsler::assemble(w);
        std::vector<TangentSample> samples = draw_batch(assembled, 10, 29);
        finsler::RicciBlockResiduals r =
            finsler::ricci_block_residuals(w, assembled, samples);
        EXPECT_LT(r.res_f2, 1e-6) << w.name;
        EXPECT_LT(r.res_f3, 1e-8) << w.name;
        EXPECT_LT(r.res_f4, 1e-6) << w.name;
    }
}

TEST(Warped, ComputeMuHandValue) {
    WarpedSpec w = zoo::torus_cos_torus();
    double th = 0.7;
    // flat 1d base: lap = -f'', f'' = -cos
    double f = 2.0 + std::cos(th);
    double lap = std::cos(th);
    double grad2 = std::sin(th) * std::sin(th);
    double expect = 0.0 - f * lap + (2 - 1) * grad2;
    EXPECT_NEAR(finsler::compute_mu(w, 0.0, {th}), expect, 1e-12);
    // functional overload agrees with the constant one
    EXPECT_NEAR(finsler::compute_mu(w, [](const Vecd&) { return 0.0; }, {th}), expect, 1e-12);
}

TEST(Warped, BerwaldFamiliesRiemannianPairVanish) {
    WarpedSpec w = zoo::torus_cos_torus();
    MetricSpec assembled = finsler::assemble(w);
    for (const TangentSample& s : draw_batch(assembled, 5, 31)) {
        for (const finsler::BerwaldFamily& fam : finsler::warped_berwald_components(w, s)) {
            EXPECT_LT(fam.max_closed, 1e-9) << fam.tag;
            EXPECT_LT(fam.residual, 1e-9) << fam.tag;
        }
    }
}

TEST(Warped, BerwaldDetectorFamilyLightsUpWithFinslerFiber) {
    WarpedSpec w = zoo::warped_randers_fiber();
    MetricSpec assembled = finsler::assemble(w);
    double eq5max = 0.0, eq4max = 0.0;
    for (const TangentSample& s : draw_batch(assembled, 10, 37)) {
        auto fams = finsler::warped_berwald_components(w, s);
        eq5max = std::max(eq5max, family(fams, "eq5").max_closed);
        eq4max = std::max(eq4max, family(fams, "eq4").max_closed);
        for (const char* t : {"eq11", "eq2", "eq3", "eq4", "eq5", "eq6", "eq7", "eq8"})
            EXPECT_LT(family(fams, t).residual, 1e-7) << t;
        // always-zero families stay flat even with a Finsler fiber
        for (const char* t : {"eq6", "eq7", "eq8"})
            EXPECT_LT(family(fams, t).max_closed, 1e-8) << t;
    }
    // the (f, f, f)-lower family over the base index is the live detector;
    // the (b, f, f) one collapses for Riemannian bases
    EXPECT_GT(eq5max, 1e-3);
    EXPECT_LT(eq4max, 1e-8);
}

TEST(Warped, BerwaldFamiliesConstantWarpVanish) {
    WarpedSpec w = zoo::warped_randers_fiber_constf();
    MetricSpec assembled = finsler::assemble(w);
    for (const TangentSample& s : draw_batch(assembled, 5, 41)) {
        auto fams = finsler::warped_berwald_components(w, s);
        for (const char* t : {"eq3", "eq4", "eq5", "eq6", "eq7", "eq8"})
            EXPECT_LT(family(fams, t).max_closed, 1e-8) << t;
        EXPECT_LT(family(fams, "eq5").residual, 1e-8);
    }
}

TEST(Warped, FiberSprayFamilyNonzeroForPositionDependentFiber) {
    WarpedSpec w = zoo::warped_randers_xfiber();
    MetricSpec assembled = finsler::assemble(w);
    double eq2max = 0.0;
    for (const TangentSample& s : draw_batch(assembled, 10, 43)) {
        auto fams = finsler::warped_berwald_components(w, s);
        eq2max = std::max(eq2max, family(fams, "eq2").max_closed);
        EXPECT_LT(family(fams, "eq2").residual, 1e-7);
    }
    EXPECT_GT(eq2max, 1e-4);
}

TEST(Warped, ScalarRelationsHyperbolic) {
    WarpedSpec w = zoo::hyperbolic(2);
    MetricSpec assembled = finsler::assemble(w);
    finsler::ScalarRelationResiduals r =
        finsler::scalar_relations(w, -2.0, 0.0, draw_batch(assembled, 10, 47));
    EXPECT_LT(r.res_14, 1e-6);
    EXPECT_LT(r.res_15, 1e-6);
    EXPECT_LT(r.res_16, 1e-6);
}

TEST(Warped, ScalarRelationsTrivialProduct) {
    WarpedSpec w = zoo::trivial_product();
    MetricSpec assembled = finsler::assemble(w);
    finsler::ScalarRelationResiduals r =
        finsler::scalar_relations(w, 0.0, 0.0, draw_batch(assembled, 10, 53));
    EXPECT_LT(r.res_14, 1e-9);
    EXPECT_LT(r.res_15, 1e-9);
    EXPECT_LT(r.res_16, 1e-9);
}

TEST(Warped, IdentitySuiteHyperbolic) {
    finsler::WarpedIdentityResiduals r = finsler::identity_suite(zoo::hyperbolic(2), 10, 59);
    EXPECT_NEAR(r.lambda_fit, -2.0, 1e-5);
    EXPECT_NEAR(r.mu_fit, 0.0, 1e-7);
    EXPECT_NEAR(r.mu_formula, 0.0, 1e-7);
    EXPECT_LT(r.einstein_residual, 1e-6);
    EXPECT_LT(r.res_f2, 1e-8);
    EXPECT_LT(r.res_f3, 1e-8);
    EXPECT_LT(r.res_f4, 1e-8);
    EXPECT_LT(r.res_f8, 1e-6);
    EXPECT_LT(r.res_f9, 1e-6);
    EXPECT_LT(r.res_f10, 1e-6);
    EXPECT_LT(r.res_scal_14, 1e-6);
    EXPECT_LT(r.res_scal_15, 1e-6);
    EXPECT_LT(r.res_scal_16, 1e-6);
    EXPECT_LT(r.spray_residual, 1e-9);
    for (const auto& [tag, res] : r.berwald_component_residuals) EXPECT_LT(res, 1e-8) << tag;
}

TEST(Warped, IdentitySuiteNonEinsteinStillClosesBlocks) {
    finsler::WarpedIdentityResiduals r = finsler::identity_suite(zoo::torus_cos_torus(), 10, 61);
    // structure identities hold regardless of the Einstein property
    EXPECT_LT(r.res_f2, 1e-7);
    EXPECT_LT(r.res_f3, 1e-8);
    EXPECT_LT(r.res_f4, 1e-7);
    EXPECT_LT(r.spray_residual, 1e-9);
    // the metric is not Einstein and the suite says so
    EXPECT_GT(r.einstein_residual, 1e-3);
    EXPECT_EQ(r.n_samples, 10);
}

TEST(Warped, SplitSampleRoundTrip) {
    WarpedSpec w = zoo::hyperbolic(2);
    TangentSample s{{0.1, 0.2, 0.3}, {1.0, 2.0, 3.0}};
    Vecd x1, y1, x2, y2;
    finsler::split_sample(w, s, x1, y1, x2, y2);
    EXPECT_EQ(x1.size(), 1u);
    EXPECT_EQ(x2.size(), 2u);
    EXPECT_DOUBLE_EQ(x2[1], 0.3);
    EXPECT_DOUBLE_EQ(y2[0], 2.0);
    TangentSample bad{{0.1, 0.2}, {1.0, 2.0}};
    EXPECT_THROW(finsler::split_sample(w, bad, x1, y1, x2, y2), finsler::DimensionMismatch);
}
