// Acceptance drive: ten end-to-end checks, one pass/fail line each.
//
//   acceptance_test <path-to-finslercurv> <configs-dir>
//
// Both arguments feed the reproducibility check (10); everything else runs
// in-process. Exit code is the number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/audit.hpp"
#include "finsler/curvature.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/metric.hpp"
#include "finsler/report.hpp"
#include "finsler/volume.hpp"
#include "finsler/warped.hpp"
#include "oracles.hpp"
#include "zoo.hpp"

using finsler::MetricSpec;
using finsler::TangentSample;
using finsler::Vecd;
using finsler::VolumeEstimate;
using finsler::VolumeForm;
using finsler::VolumeParams;
using finsler::WarpedSpec;

namespace {

std::string g_cli_path;
std::string g_config_dir;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// accumulates hard conditions; the detail string carries the headline numbers
struct Check {
    bool pass = true;
    std::string why;
    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (!why.empty()) why += "; ";
        why += what;
    }
};

std::vector<Vecd> draw_ys(const MetricSpec& m, std::mt19937_64& rng, int count) {
    std::vector<Vecd> ys;
    for (int i = 0; i < count; ++i) ys.push_back(finsler::draw_y(m, rng));
    return ys;
}

// ---- 1: flat anchors ------------------------------------------------------

bool crit1(std::string& detail) {
    Check ck;
    double worst = 0.0;
    std::mt19937_64 rng(101);
    MetricSpec flats[] = {zoo::euclid(2), zoo::euclid(3), zoo::randers_flat(0.3, 3), zoo::randers_flat(0.5, 2)};
    for (const MetricSpec& m : flats) {
        for (int i = 0; i < 12; ++i) {
            TangentSample s = finsler::draw_sample(m, rng);
            worst = std::max(worst, finsler::max_abs(finsler::spray(m, s).G));
            worst = std::max(worst, finsler::max_abs(finsler::riemann_curvature(m, s)));
            worst = std::max(worst, std::abs(finsler::ricci(m, s)));
            worst = std::max(worst, finsler::berwald_curvature(m, s).max_abs());
            worst = std::max(worst, finsler::max_abs(finsler::e_curvature(m, s)));
        }
    }
    ck.require(worst < 1e-8, "curvature magnitude " + fmt(worst) + " >= 1e-8");
    detail = "max |spray,Riemann,Ricci,Berwald,E| = " + fmt(worst) + " (tol 1e-8)";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 2: Riemannian Ricci vs Christoffel oracle ----------------------------

bool crit2(std::string& detail) {
    Check ck;
    double worst = 0.0;
    std::mt19937_64 rng(202);
    MetricSpec specs[] = {zoo::sphere2(), zoo::torus_rev(), zoo::flat_torus(2), zoo::diag3(), zoo::offdiag2()};
    for (const MetricSpec& m : specs) {
        for (int i = 0; i < 100; ++i) {
            TangentSample s = finsler::draw_sample(m, rng);
            finsler::Matd engine = finsler::ricci_tensor(m, s);
            finsler::Matd fd = oracle::ricci_fd(m, s.x);
            for (int a = 0; a < m.dim; ++a)
                for (int b = 0; b < m.dim; ++b) worst = std::max(worst, std::abs(engine(a, b) - fd(a, b)));
        }
    }
    ck.require(worst <= 1e-7, "ricci mismatch " + fmt(worst) + " > 1e-7");
    detail = "5 specs x 100 samples, max |Ric_engine - Ric_oracle| = " + fmt(worst) + " (tol 1e-7)";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 3: exponential-warp line x flat fiber is Einstein --------------------

bool crit3(std::string& detail) {
    Check ck;
    WarpedSpec w = zoo::hyperbolic(2);
    MetricSpec m = finsler::assemble(w);
    std::mt19937_64 rng(303);
    double dl = 0.0, res = 0.0, mu = 0.0;
    for (int i = 0; i <= 10; ++i) {
        double t = -1.0 + 0.2 * i;
        Vecd x = {t, -1.0 + 0.17 * i, 1.0 - 0.19 * i};
        finsler::EinsteinFit fit = finsler::einstein_fit(m, x, draw_ys(m, rng, 8));
        dl = std::max(dl, std::abs(fit.lambda - (-2.0)));
        res = std::max(res, fit.residual);
        mu = std::max(mu, std::abs(finsler::compute_mu(w, fit.lambda, Vecd{t})));
    }
    ck.require(dl <= 1e-5, "lambda off by " + fmt(dl));
    ck.require(res < 1e-6, "einstein residual " + fmt(res));
    ck.require(mu <= 1e-7, "mu " + fmt(mu));
    detail = "fitted lambda = -2 +- " + fmt(dl) + " (tol 1e-5), residual " + fmt(res) +
             " (tol 1e-6), |mu| " + fmt(mu) + " (tol 1e-7) over t in [-1,1]";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 4: closed Ricci blocks vs brute force --------------------------------

bool crit4(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(404);
    WarpedSpec specs[] = {zoo::hyperbolic(2), zoo::torus_cos_torus(), zoo::warped_randers_fiber()};
    double base = 0.0, mixed = 0.0, fiber = 0.0;
    for (const WarpedSpec& w : specs) {
        MetricSpec m = finsler::assemble(w);
        std::vector<TangentSample> samples;
        for (int i = 0; i < 50; ++i) samples.push_back(finsler::draw_sample(m, rng));
        finsler::RicciBlockResiduals r = finsler::ricci_block_residuals(w, m, samples);
        base = std::max(base, r.res_f2);
        mixed = std::max(mixed, r.res_f3);
        fiber = std::max(fiber, r.res_f4);
    }
    ck.require(base < 1e-6, "base block " + fmt(base));
    ck.require(fiber < 1e-6, "fiber block " + fmt(fiber));
    ck.require(mixed < 1e-8, "mixed block " + fmt(mixed));
    detail = "3 specs x 50 samples: base " + fmt(base) + ", fiber " + fmt(fiber) +
             " (tol 1e-6), mixed " + fmt(mixed) + " (tol 1e-8)";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 5: warped Berwald families -------------------------------------------

bool crit5(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(505);
    std::map<std::string, double> live, constant;
    double worst_res = 0.0;
    WarpedSpec w = zoo::warped_randers_fiber();
    MetricSpec m = finsler::assemble(w);
    for (int i = 0; i < 10; ++i) {
        TangentSample s = finsler::draw_sample(m, rng);
        for (const finsler::BerwaldFamily& f : finsler::warped_berwald_components(w, s)) {
            live[f.tag] = std::max(live[f.tag], f.max_closed);
            worst_res = std::max(worst_res, f.residual);
        }
    }
    WarpedSpec wc = zoo::warped_randers_fiber_constf();
    MetricSpec mc = finsler::assemble(wc);
    for (int i = 0; i < 10; ++i) {
        TangentSample s = finsler::draw_sample(mc, rng);
        for (const finsler::BerwaldFamily& f : finsler::warped_berwald_components(wc, s)) {
            constant[f.tag] = std::max(constant[f.tag], f.max_closed);
            worst_res = std::max(worst_res, f.residual);
        }
    }
    for (const char* tag : {"eq6", "eq7", "eq8"}) {
        ck.require(live[tag] < 1e-8, std::string(tag) + " live " + fmt(live[tag]));
        ck.require(constant[tag] < 1e-8, std::string(tag) + " const " + fmt(constant[tag]));
    }
    // with a Riemannian base the family tagged eq4 is identically zero, so the
    // nonconstant-warp signal sits in the all-fiber-derivative family eq5;
    // both maxima are reported
    ck.require(live["eq5"] > 1e-3, "detector eq5 " + fmt(live["eq5"]) + " <= 1e-3");
    ck.require(live["eq4"] < 1e-8, "eq4 (identically zero family) " + fmt(live["eq4"]));
    ck.require(constant["eq4"] < 1e-8 && constant["eq5"] < 1e-8,
               "constant-warp eq4/eq5 " + fmt(constant["eq4"]) + "/" + fmt(constant["eq5"]));
    ck.require(worst_res <= 1e-7, "closed vs brute " + fmt(worst_res));
    detail = "eq6-8 max " + fmt(std::max({live["eq6"], live["eq7"], live["eq8"]})) +
             " (tol 1e-8); detector eq5 = " + fmt(live["eq5"]) + " > 1e-3 for f = 2+cos(theta), eq4 = " +
             fmt(live["eq4"]) + " (zero for Riemannian base); constant f: eq5 = " + fmt(constant["eq5"]) +
             "; closed vs brute " + fmt(worst_res) + " (tol 1e-7)";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 6: scalar curvature relations ----------------------------------------

bool crit6(std::string& detail) {
    Check ck;
    std::mt19937_64 rng(606);
    auto run = [&](const WarpedSpec& w, double lam, double mu) {
        MetricSpec m = finsler::assemble(w);
        std::vector<TangentSample> samples;
        for (int i = 0; i < 10; ++i) samples.push_back(finsler::draw_sample(m, rng));
        finsler::ScalarRelationResiduals r = finsler::scalar_relations(w, lam, mu, samples);
        return std::max({r.res_14, r.res_15, r.res_16});
    };
    double hyp = run(zoo::hyperbolic(2), -2.0, 0.0);
    double triv = run(zoo::trivial_product(), 0.0, 0.0);
    ck.require(hyp < 1e-6, "hyperbolic relations " + fmt(hyp));
    ck.require(triv < 1e-6, "trivial product relations " + fmt(triv));
    detail = "residual ids 1.4-1.6: hyperbolic " + fmt(hyp) + ", trivial product " + fmt(triv) + " (tol 1e-6)";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 7: volume forms -------------------------------------------------------

bool crit7(std::string& detail) {
    Check ck;
    VolumeParams big;
    big.budget = 1000000;
    std::mt19937_64 rng(707);

    // HT density of Riemannian specs vs sqrt(det g)
    double worst_sigma = 0.0;
    MetricSpec rspecs[] = {zoo::sphere2(), zoo::torus_rev(), zoo::flat_torus(2), zoo::diag3(), zoo::offdiag2()};
    for (const MetricSpec& m : rspecs) {
        for (int i = 0; i < 2; ++i) {
            Vecd x = finsler::draw_x(m, rng);
            double closed = finsler::density(m, x, VolumeForm::HolmesThompson);
            VolumeEstimate est = finsler::density_ht_mc(m, x, big);
            double sig = std::abs(est.value - closed) / std::max(est.std_error, 1e-300);
            worst_sigma = std::max(worst_sigma, sig);
        }
    }
    ck.require(worst_sigma <= 3.0, "riemannian HT off by " + fmt(worst_sigma) + " sigma");

    // constant-b Randers: HT and BH closed forms vs MC
    MetricSpec rd = zoo::randers_flat(0.3, 2);
    Vecd x0 = {0.0, 0.0};
    VolumeEstimate ht = finsler::density_ht_mc(rd, x0, big);
    double ht_sig = std::abs(ht.value - 1.0) / ht.std_error;
    ck.require(ht_sig <= 3.0, "randers HT " + fmt(ht.value) + " off closed 1 by " + fmt(ht_sig) + " sigma");

    // BH by rejection over the enclosing box |y|_inf <= 1/(1-b)
    double bh_closed = finsler::bh_randers_closed_form(0.3, 2);
    {
        std::mt19937_64 mc(7070);
        const long N = 1000000;
        const double hw = 1.0 / 0.7;
        long hits = 0;
        for (long k = 0; k < N; ++k) {
            double u = hw * (2.0 * std::generate_canonical<double, 53>(mc) - 1.0);
            double v = hw * (2.0 * std::generate_canonical<double, 53>(mc) - 1.0);
            if (std::sqrt(u * u + v * v) + 0.3 * u < 1.0) ++hits;
        }
        double box = 4.0 * hw * hw;
        double p = static_cast<double>(hits) / N;
        double vol = p * box;
        double se_vol = box * std::sqrt(p * (1.0 - p) / N);
        double bh_mc = finsler::vol_ball(2) / vol;
        double se_bh = bh_mc * se_vol / vol;
        double sig = std::abs(bh_mc - bh_closed) / se_bh;
        ck.require(sig <= 3.0, "randers BH closed " + fmt(bh_closed) + " vs MC " + fmt(bh_mc) + " off by " + fmt(sig) + " sigma");
    }

    // BH <= HT across the Randers family
    double bh_margin = 1e300;
    for (int i = 1; i <= 9; ++i) {
        double b = 0.1 * i;
        MetricSpec rb = zoo::randers_flat(b, 2);
        double bh = finsler::density(rb, x0, VolumeForm::BHRandersClosedForm);
        VolumeEstimate est = finsler::density_ht_mc(rb, x0, big);
        bh_margin = std::min(bh_margin, est.value + 3.0 * est.std_error - bh);
        ck.require(bh <= est.value + 3.0 * est.std_error,
                   "BH > HT at b = " + fmt(b) + " (" + fmt(bh) + " vs " + fmt(est.value) + ")");
    }

    // warped finiteness bound on the cosine torus
    MetricSpec wm = finsler::assemble(zoo::torus_cos_torus());
    VolumeEstimate vb = finsler::total_volume(*wm.base, VolumeForm::HolmesThompson);
    VolumeEstimate vf = finsler::total_volume(*wm.fiber, VolumeForm::HolmesThompson);
    finsler::WarpedBoundResult bound = finsler::warped_volume_bound(wm, 1.0, 3.0, vb, vf, VolumeForm::HolmesThompson);
    ck.require(bound.holds, "warped volume bound violated: bound " + fmt(bound.bound) + " vs total " + fmt(bound.total.value));

    detail = "riemannian HT worst " + fmt(worst_sigma) + " sigma; randers HT " + fmt(ht_sig) +
             " sigma, BH closed " + fmt(bh_closed) + " checked by rejection MC; min(HT+3se-BH) = " + fmt(bh_margin) +
             " over b in {0.1..0.9}; warped bound " + fmt(bound.bound) + " >= total " + fmt(bound.total.value);
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 8: triviality falsification -------------------------------------------

bool crit8(std::string& detail) {
    Check ck;
    double min_ratio = 1e300;
    int violated = 0;
    for (unsigned long long k = 1; k <= 20; ++k) {
        WarpedSpec w = zoo::falsifier(k);
        double claim = (k % 2 == 0) ? -1.0 : 0.0;
        finsler::AuditReport rep = finsler::triviality_audit(w, claim);
        if (rep.verdict == finsler::Verdict::EinsteinViolated) ++violated;
        min_ratio = std::min(min_ratio, rep.claim_residual / (10.0 * rep.tol_id));
        ck.require(rep.verdict == finsler::Verdict::EinsteinViolated,
                   w.base.name + " claim " + fmt(claim) + " not einstein-violated");
        ck.require(rep.claim_residual > 10.0 * rep.tol_id,
                   "claim residual " + fmt(rep.claim_residual) + " <= 10*tol");
    }
    WarpedSpec trivs[] = {zoo::trivial_product(),
                          finsler::make_warped(zoo::flat_torus(1), zoo::flat_torus(2), "1", "trivial-13")};
    int consistent = 0;
    for (const WarpedSpec& w : trivs) {
        finsler::AuditReport rep = finsler::triviality_audit(w, 0.0);
        if (rep.verdict == finsler::Verdict::ConsistentWithTrivial) ++consistent;
        ck.require(rep.verdict == finsler::Verdict::ConsistentWithTrivial,
                   w.base.name + ": trivial product not consistent-with-trivial");
    }
    detail = std::to_string(violated) + "/20 falsifiers einstein-violated, min residual/(10 tol) = " + fmt(min_ratio) +
             "; " + std::to_string(consistent) + "/2 constant-f products consistent-with-trivial";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 9: geodesics -----------------------------------------------------------

bool crit9(std::string& detail) {
    Check ck;
    double drift = 0.0;
    {
        MetricSpec specs[] = {zoo::sphere2(), zoo::torus_rev(), zoo::randers_xdep()};
        TangentSample starts[] = {{{1.2, 0.3}, {0.4, 0.5}}, {{0.7, 0.2}, {0.3, 0.4}}, {{0.1, -0.2}, {0.6, 0.3}}};
        for (int i = 0; i < 3; ++i) {
            finsler::GeodesicTrajectory tr = finsler::integrate(specs[i], starts[i], 10.0, 1e-3, 50);
            drift = std::max(drift, tr.speed_drift);
        }
    }
    ck.require(drift < 1e-6, "speed drift " + fmt(drift));

    // unit-speed equator: the orbit closes after parameter 2 pi
    MetricSpec sph = zoo::sphere2();
    const double kPi = 3.14159265358979323846;
    auto dist3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                         (a[2] - b[2]) * (a[2] - b[2]));
    };
    TangentSample eq{{kPi / 2.0, 0.0}, {0.5, std::sqrt(0.75)}};
    finsler::GeodesicTrajectory orbit = finsler::integrate(sph, eq, 2.0 * kPi, 1e-3, 100);
    std::array<double, 3> p = oracle::sphere_embed(eq.x[0], eq.x[1]);
    double period_err = dist3(p, oracle::sphere_embed(orbit.x.back()[0], orbit.x.back()[1]));
    ck.require(period_err <= 1e-5, "period error " + fmt(period_err));

    // step halving against the closed-form great circle at t = 2
    std::array<double, 3> q = oracle::sphere_velocity(eq.x[0], eq.x[1], eq.y[0], eq.y[1]);
    auto endpoint_err = [&](double h) {
        finsler::GeodesicTrajectory tr = finsler::integrate(sph, eq, 2.0, h, 1 << 20);
        return dist3(oracle::great_circle(p, q, 2.0), oracle::sphere_embed(tr.x.back()[0], tr.x.back()[1]));
    };
    double e1 = endpoint_err(4e-2), e2 = endpoint_err(2e-2);
    double order = std::log2(e1 / e2);
    ck.require(order > 3.3 && order < 4.6, "observed order " + fmt(order));
    detail = "speed drift " + fmt(drift) + " (tol 1e-6) over t in [0,10]; great-circle period 2pi +- " +
             fmt(period_err) + " (tol 1e-5); step-halving order " + fmt(order);
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

// ---- 10: reproducibility through the CLI ------------------------------------

bool crit10(std::string& detail) {
    Check ck;
    if (g_cli_path.empty()) {
        detail = "no CLI path given on the command line";
        return false;
    }
    auto run_pair = [&](const std::string& cmd, const std::string& cfg, const std::string& tag) {
        // the invocations must match byte for byte, output path included, or
        // the config echo inside the report would differ by construction
        std::string out = "acc_rep_" + tag + ".json";
        std::string a = "acc_rep_" + tag + "_a.json", b = "acc_rep_" + tag + "_b.json";
        std::string shell = g_cli_path + " " + cmd + " --config " + g_config_dir + "/" + cfg +
                            " --seed 11 --format structured --out " + out + " >/dev/null 2>&1";
        for (const std::string& dest : {a, b}) {
            int rc = std::system(shell.c_str());
            ck.require(rc == 0, cmd + " exited with " + std::to_string(rc));
            std::rename(out.c_str(), dest.c_str());
        }
        auto load = [](const std::string& path) {
            std::ifstream f(path);
            std::stringstream ss;
            ss << f.rdbuf();
            return ss.str();
        };
        std::string ra = load(a), rb = load(b);
        ck.require(!ra.empty() && !rb.empty(), cmd + ": empty report");
        if (ra.empty() || rb.empty()) return false;
        finsler::ordered_json ja = finsler::ordered_json::parse(ra);
        finsler::ordered_json jb = finsler::ordered_json::parse(rb);
        std::string sa = finsler::strip_timing(ja).dump(2);
        std::string sb = finsler::strip_timing(jb).dump(2);
        ck.require(sa == sb, cmd + " reports differ beyond the timing block");
        return sa == sb;
    };
    bool ok1 = run_pair("warped-check", "hyperbolic.toml", "wc");
    bool ok2 = run_pair("curvature", "randers-03.toml", "cv");
    detail = std::string("warped-check ") + (ok1 ? "byte-identical" : "DIFFERS") + ", curvature " +
             (ok2 ? "byte-identical" : "DIFFERS") + " (timing block excluded)";
    if (!ck.pass) detail += "; " + ck.why;
    return ck.pass;
}

struct Criterion {
    int id;
    const char* tag;
    std::function<bool(std::string&)> run;
    double time_limit;  // seconds; 0 = none
};

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    if (argc > 2) g_config_dir = argv[2];

    const Criterion criteria[] = {
        {1, "flat-anchors", crit1, 1.0},
        {2, "riemannian-oracle", crit2, 30.0},
        {3, "exponential-warp-einstein", crit3, 0.0},
        {4, "ricci-blocks", crit4, 300.0},
        {5, "berwald-families", crit5, 0.0},
        {6, "scalar-relations", crit6, 0.0},
        {7, "volume-forms", crit7, 600.0},
        {8, "triviality-falsification", crit8, 0.0},
        {9, "geodesics", crit9, 0.0},
        {10, "reproducibility", crit10, 0.0},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.time_limit > 0.0 && secs > c.time_limit) {
            ok = false;
            detail += "; over time limit " + fmt(c.time_limit) + " s";
        }
        if (!ok) ++failed;
        std::printf("[%s] %2d %-26s %s [%.2f s%s]\n", ok ? "PASS" : "FAIL", c.id, c.tag, detail.c_str(), secs,
                    c.time_limit > 0.0 ? ("/" + fmt(c.time_limit) + " s limit").c_str() : "");
    }
    std::printf("acceptance: %d/10 criteria pass\n", 10 - failed);
    return failed;
}
