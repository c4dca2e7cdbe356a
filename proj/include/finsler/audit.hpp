#pragma once

// Einstein / triviality obstruction audits for warped products.
//
// A nonconstant warp on a compact base is incompatible with the assembled
// metric being Einstein at nonpositive lambda, and with the sign pattern
// (lambda > 0, mu <= 0); the scalar-relation inequalities (a)..(f) each force
// a sign on Delta f and hence constancy as well.  The audits evaluate those
// obstructions on grids and report what they force.  Findings live in the
// report; nothing here throws on a failed check.
//
// Sign convention: Delta f := -g1^{ij} (Hess f)_{ij}, the convention under
// which mu = lambda f^2 - f Delta f + (n2 - 1) |grad f|^2 holds on the
// exponential-warp model.  The analyst Laplacian is the negative of this.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "finsler/curvature.hpp"
#include "finsler/warped.hpp"

namespace finsler {

enum class Verdict { ConsistentWithTrivial, EinsteinViolated, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::ConsistentWithTrivial: return "consistent-with-trivial";
        case Verdict::EinsteinViolated: return "einstein-violated";
        default: return "inconclusive";
    }
}

enum class ConditionStatus { Holds, Fails, NotApplicable };

inline const char* condition_status_name(ConditionStatus c) {
    switch (c) {
        case ConditionStatus::Holds: return "holds";
        case ConditionStatus::Fails: return "fails";
        default: return "not-applicable";
    }
}

struct ConditionResult {
    ConditionStatus status = ConditionStatus::NotApplicable;
    double margin = 0.0;  // min slack of the defining inequality over the grid
    Vecd witness_x1;      // grid point realizing the margin
    Vecd witness_x2;
    std::string implied;  // consequence for Delta f when the condition holds
    std::string detail;   // the inequality as evaluated
};

// Sign census of Delta f over the base lattice (convention above).
struct SignSummary {
    double min = 0.0;
    double max = 0.0;
    int n_pos = 0;
    int n_neg = 0;
    int n_zero = 0;  // |Delta f| <= zero_tol
    double zero_tol = 0.0;
    std::string convention = "Delta f = -trace_g1 Hess f; flip signs for the analyst convention";
};

struct AuditGrid {
    int base_per_dim = 64;    // deterministic base lattice resolution
    int fiber_per_dim = 4;    // fiber lattice for per-point mu fits
    int curvature_points = 8; // random x samples for the assembled-metric fit
    int einstein_batch = 6;   // y samples per x
    std::uint64_t seed = 20240901ull;
};

struct AuditReport {
    std::string op;  // "triviality" | "positivity" | "conditions"

    // Pointwise Frobenius fits: lambda on the assembled metric at seeded random
    // samples, mu on the fiber over its lattice.  Residuals are max over points
    // of max |Ric_ij - fit * g_ij| / ||g||_inf, so a varying lambda(x) inflates
    // lambda_residual only through the spread of the per-point fits.
    double lambda_fit = 0.0;
    double lambda_residual = 0.0;
    double mu_fit = 0.0;
    double mu_residual = 0.0;
    double mu_min = 0.0;  // smallest per-fiber-point fit

    bool has_claim = false;
    double lambda_claim = 0.0;
    double claim_residual = 0.0;  // residual against lambda_claim (no fit)

    double f_min = 0.0;
    double f_max = 0.0;
    double f_variation = 0.0;  // max f - min f over the base lattice
    double grad_min = 0.0;     // range of |grad f| over the base lattice
    double grad_max = 0.0;
    double min_hess_eigenvalue = 0.0;  // min g1-eigenvalue of Hess f (reported, not interpreted)
    bool base_compact = false;

    double triv_tol = 0.0;  // 1e-6 * max f
    double tol_id = 1e-6;

    SignSummary subharmonicity;
    std::string positivity_branch;  // "", "not-applicable", "mu-nonpositive", "mu-positive"
    std::map<std::string, ConditionResult> conditions;
    std::vector<std::string> findings;
    Verdict verdict = Verdict::Inconclusive;

    int n_base_grid = 0;
    int n_fiber_grid = 0;
    int n_curvature_points = 0;
};

namespace detail_audit {

inline std::vector<Vecd> lattice(const Chart& chart, int per_dim) {
    const int n = static_cast<int>(chart.domain.size());
    std::vector<Vecd> pts;
    size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<size_t>(per_dim);
    pts.reserve(total);
    std::vector<int> idx(static_cast<size_t>(n), 0);
    for (size_t c = 0; c < total; ++c) {
        Vecd x(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            const auto& d = chart.domain[static_cast<size_t>(i)];
            // midpoint offsets: periodic coordinates tile [lo, hi) evenly and
            // never duplicate the seam, bounded ones stay interior
            x[static_cast<size_t>(i)] = d.first + (d.second - d.first) * (idx[static_cast<size_t>(i)] + 0.5) / per_dim;
        }
        pts.push_back(std::move(x));
        for (int i = n - 1; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < per_dim) break;
            idx[static_cast<size_t>(i)] = 0;
        }
    }
    return pts;
}

inline bool chart_compact(const Chart& chart) {
    for (bool p : chart.periodic)
        if (!p) return false;
    return !chart.periodic.empty();
}

// Smallest w with (Hess f) v = w g1 v, via g1 = L L^T and the symmetric
// pencil L^{-1} H L^{-T}.
inline double min_generalized_eig(const Matd& h, const Matd& g) {
    const int n = g.rows;
    Matd l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = g(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) throw EngineError("base metric not positive definite in audit");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = g(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    // B = L^{-1} H L^{-T}: forward-solve columns, then rows
    Matd b = h;
    for (int c = 0; c < n; ++c)
        for (int i = 0; i < n; ++i) {
            double s = b(i, c);
            for (int k = 0; k < i; ++k) s -= l(i, k) * b(k, c);
            b(i, c) = s / l(i, i);
        }
    for (int r = 0; r < n; ++r)
        for (int j = 0; j < n; ++j) {
            double s = b(r, j);
            for (int k = 0; k < j; ++k) s -= l(j, k) * b(r, k);
            b(r, j) = s / l(j, j);
        }
    Vecd ev = sym_eigenvalues(b);
    return *std::min_element(ev.begin(), ev.end());
}

struct BaseScan {
    std::vector<Vecd> pts;
    std::vector<WarpFields> fields;
};

inline BaseScan scan_base(const WarpedSpec& w, const AuditGrid& grid, AuditReport& rep) {
    BaseScan scan;
    scan.pts = lattice(w.base.chart, grid.base_per_dim);
    scan.fields.reserve(scan.pts.size());
    rep.f_min = std::numeric_limits<double>::infinity();
    rep.f_max = -rep.f_min;
    rep.grad_min = rep.f_min;
    rep.grad_max = -rep.f_min;
    rep.min_hess_eigenvalue = rep.f_min;
    SignSummary& ss = rep.subharmonicity;
    ss.min = rep.f_min;
    ss.max = -rep.f_min;
    double lap_scale = 0.0;
    for (const Vecd& x1 : scan.pts) {
        WarpFields wf = warp_fields(w, x1);
        rep.f_min = std::min(rep.f_min, wf.f);
        rep.f_max = std::max(rep.f_max, wf.f);
        double gn = std::sqrt(std::max(0.0, wf.grad_norm2));
        rep.grad_min = std::min(rep.grad_min, gn);
        rep.grad_max = std::max(rep.grad_max, gn);
        rep.min_hess_eigenvalue =
            std::min(rep.min_hess_eigenvalue, min_generalized_eig(wf.hess, metric_matrix(w.base, x1)));
        ss.min = std::min(ss.min, wf.lap);
        ss.max = std::max(ss.max, wf.lap);
        lap_scale = std::max(lap_scale, std::abs(wf.lap));
        scan.fields.push_back(std::move(wf));
    }
    ss.zero_tol = 1e-10 * (1.0 + lap_scale);
    for (const WarpFields& wf : scan.fields) {
        if (std::abs(wf.lap) <= ss.zero_tol)
            ++ss.n_zero;
        else if (wf.lap > 0.0)
            ++ss.n_pos;
        else
            ++ss.n_neg;
    }
    rep.f_variation = rep.f_max - rep.f_min;
    rep.triv_tol = 1e-6 * rep.f_max;
    rep.base_compact = chart_compact(w.base.chart);
    rep.n_base_grid = static_cast<int>(scan.pts.size());
    return scan;
}

struct FitScan {
    std::vector<Vecd> xs;               // assembled-metric sample points
    std::vector<std::vector<Vecd>> ys;  // y batch per point
    std::vector<double> mu_points;      // per-fiber-lattice-point fits
    std::vector<Vecd> fiber_pts;
};

inline FitScan fit_curvature(const WarpedSpec& w, const MetricSpec& assembled, const AuditGrid& grid,
                             AuditReport& rep) {
    FitScan scan;
    std::mt19937_64 rng(grid.seed);
    double lam_sum = 0.0;
    for (int p = 0; p < grid.curvature_points; ++p) {
        Vecd x = draw_x(assembled, rng);
        std::vector<Vecd> ys;
        for (int b = 0; b < grid.einstein_batch; ++b) ys.push_back(draw_y(assembled, rng));
        EinsteinFit fit = einstein_fit(assembled, x, ys);
        lam_sum += fit.lambda;
        rep.lambda_residual = std::max(rep.lambda_residual, fit.residual);
        scan.xs.push_back(std::move(x));
        scan.ys.push_back(std::move(ys));
    }
    rep.lambda_fit = grid.curvature_points > 0 ? lam_sum / grid.curvature_points : 0.0;
    rep.n_curvature_points = grid.curvature_points;

    scan.fiber_pts = lattice(w.fiber.chart, grid.fiber_per_dim);
    double mu_sum = 0.0;
    rep.mu_min = std::numeric_limits<double>::infinity();
    for (const Vecd& x2 : scan.fiber_pts) {
        std::vector<Vecd> ys;
        for (int b = 0; b < grid.einstein_batch; ++b) ys.push_back(draw_y(w.fiber, rng));
        EinsteinFit fit = einstein_fit(w.fiber, x2, ys);
        mu_sum += fit.lambda;
        rep.mu_residual = std::max(rep.mu_residual, fit.residual);
        rep.mu_min = std::min(rep.mu_min, fit.lambda);
        scan.mu_points.push_back(fit.lambda);
    }
    rep.mu_fit = scan.fiber_pts.empty() ? 0.0 : mu_sum / static_cast<double>(scan.fiber_pts.size());
    rep.n_fiber_grid = static_cast<int>(scan.fiber_pts.size());
    return scan;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string fmt_point(const Vecd& x) {
    std::string s = "(";
    for (size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt(x[i]);
    return s + ")";
}

// Verdict shared by all audits.  residual is the operation's headline Einstein
// residual (claim residual when a claim was audited, fit residual otherwise).
// require_nonconst_f: without an explicit claim, a constant-f non-Einstein
// product is a trivial product rather than a detected violation, so the
// violated verdict is reserved for nonconstant warps.
inline Verdict decide(const AuditReport& rep, double residual, bool require_nonconst_f) {
    if (rep.f_variation < rep.triv_tol && residual < rep.tol_id) return Verdict::ConsistentWithTrivial;
    if (residual >= 10.0 * rep.tol_id && (!require_nonconst_f || rep.f_variation >= rep.triv_tol))
        return Verdict::EinsteinViolated;
    return Verdict::Inconclusive;
}

}  // namespace detail_audit

// Audits the claim that the assembled metric is Einstein with a fixed
// nonpositive lambda.  On a compact base a nonconstant warp rules the claim
// out, so small residual + nonconstant f is flagged as an engine bug.
inline AuditReport triviality_audit(const WarpedSpec& w, double lambda_claim, const AuditGrid& grid = {}) {
    if (lambda_claim > 0.0) throw DomainError("triviality_audit requires lambda_claim <= 0");
    AuditReport rep;
    rep.op = "triviality";
    rep.has_claim = true;
    rep.lambda_claim = lambda_claim;
    MetricSpec assembled = assemble(w);
    detail_audit::scan_base(w, grid, rep);
    detail_audit::FitScan fits = detail_audit::fit_curvature(w, assembled, grid, rep);
    for (size_t p = 0; p < fits.xs.size(); ++p)
        rep.claim_residual =
            std::max(rep.claim_residual, einstein_residual_at(assembled, fits.xs[p], fits.ys[p], lambda_claim));

    using detail_audit::fmt;
    const bool f_const = rep.f_variation < rep.triv_tol;
    rep.findings.push_back("claim residual " + fmt(rep.claim_residual) + " at lambda_claim = " + fmt(lambda_claim) +
                           "; f variation " + fmt(rep.f_variation) + " (triv_tol " + fmt(rep.triv_tol) + ")");
    if (!rep.base_compact)
        rep.findings.push_back("base chart is not fully periodic: the compactness argument does not apply, "
                               "residuals reported as-is");
    if (!f_const && rep.base_compact) {
        double strength = std::max(rep.claim_residual / rep.tol_id, rep.f_variation / rep.triv_tol);
        rep.findings.push_back("obstruction check: max(claim_residual/tol_id, f_variation/triv_tol) = " +
                               fmt(strength) + " (must be >= 1 for a nonconstant warp)");
        if (rep.claim_residual < rep.tol_id)
            rep.findings.push_back("ENGINE-BUG: nonconstant warp on a compact base with claim residual below "
                                   "tol_id contradicts the triviality obstruction");
    }
    if (f_const && rep.claim_residual >= 10.0 * rep.tol_id)
        rep.findings.push_back("f is constant, so the product is a genuine product metric; the claimed lambda "
                               "is simply wrong (fitted lambda = " + fmt(rep.lambda_fit) + ")");
    rep.verdict = detail_audit::decide(rep, rep.claim_residual, /*require_nonconst_f=*/false);
    return rep;
}

// Positivity obstruction: fitted lambda > 0 together with mu <= 0 somewhere on
// the fiber forces Delta f >= lambda f > 0, which no function on a compact
// base satisfies (the g1-mean of Delta f vanishes), so the Einstein hypothesis
// must fail there unless it already fails numerically.
inline AuditReport positivity_audit(const WarpedSpec& w, const AuditGrid& grid = {}) {
    AuditReport rep;
    rep.op = "positivity";
    MetricSpec assembled = assemble(w);
    detail_audit::BaseScan base = detail_audit::scan_base(w, grid, rep);
    detail_audit::fit_curvature(w, assembled, grid, rep);

    using detail_audit::fmt;
    const bool f_const = rep.f_variation < rep.triv_tol;
    if (rep.lambda_fit <= 0.0) {
        rep.positivity_branch = "not-applicable";
        rep.findings.push_back("fitted lambda = " + fmt(rep.lambda_fit) +
                               " <= 0: positivity obstruction not applicable");
    } else if (rep.mu_min <= 0.0) {
        rep.positivity_branch = "mu-nonpositive";
        rep.findings.push_back("fitted lambda = " + fmt(rep.lambda_fit) + " > 0 and fitted mu = " + fmt(rep.mu_min) +
                               " <= 0 at some fiber point: the Einstein hypothesis forces Delta f >= lambda*f > 0 "
                               "on the base (subharmonic in the sign convention used here)");
        double worst = std::numeric_limits<double>::infinity();
        size_t worst_at = 0;
        for (size_t i = 0; i < base.fields.size(); ++i) {
            double slack = base.fields[i].lap - rep.lambda_fit * base.fields[i].f;
            if (slack < worst) {
                worst = slack;
                worst_at = i;
            }
        }
        if (worst >= 0.0)
            rep.findings.push_back("computed Delta f satisfies the forced bound on the whole lattice "
                                   "(min slack " + fmt(worst) + ")");
        else
            rep.findings.push_back("computed Delta f violates the forced bound (min slack " + fmt(worst) + " at x1 = " +
                                   detail_audit::fmt_point(base.pts[worst_at]) +
                                   "): the fitted Einstein hypothesis cannot hold");
        if (rep.base_compact && !f_const)
            rep.findings.push_back("maximum-principle contradiction: a nonconstant subharmonic warp on a compact "
                                   "base is impossible, so (lambda > 0, mu <= 0) cannot be Einstein data here");
        if (f_const)
            rep.findings.push_back("f is constant: trivial product, no subharmonicity contradiction; the Einstein "
                                   "hypothesis fails directly when base and fiber curvatures disagree (fit residual " +
                                   fmt(rep.lambda_residual) + ")");
    } else {
        rep.positivity_branch = "mu-positive";
        rep.findings.push_back("fitted mu = " + fmt(rep.mu_min) +
                               " > 0 on the fiber grid: no positivity obstruction (fiber scalar curvature positive)");
    }
    rep.verdict = detail_audit::decide(rep, rep.lambda_residual, /*require_nonconst_f=*/true);
    return rep;
}

// Scalar-relation inequalities (a)..(f), evaluated pointwise from the fitted
// or supplied (lambda, mu) and the warp fields:
//   Scal_base(x1) = n1*lambda - n2*Delta f/f,  Scal_fiber = n2*mu,
//   Scal_total    = (n1+n2)*lambda.
// Each holding condition forces a sign on Delta f; on a compact base that
// sign forces f constant.  Pass NaN for lambda/mu to use the grid fits.
inline AuditReport condition_suite_63(const WarpedSpec& w, double lambda, double mu, const AuditGrid& grid = {}) {
    AuditReport rep;
    rep.op = "conditions";
    MetricSpec assembled = assemble(w);
    detail_audit::BaseScan base = detail_audit::scan_base(w, grid, rep);
    detail_audit::FitScan fits = detail_audit::fit_curvature(w, assembled, grid, rep);

    using detail_audit::fmt;
    const int n1 = w.base.dim, n2 = w.fiber.dim;
    const bool lam_fitted = std::isnan(lambda), mu_fitted = std::isnan(mu);
    if (lam_fitted) lambda = rep.lambda_fit;
    std::vector<double> mu_vals = mu_fitted ? fits.mu_points : std::vector<double>{mu};
    std::vector<Vecd> mu_pts = mu_fitted ? fits.fiber_pts : std::vector<Vecd>{Vecd()};
    if (!mu_fitted) {
        rep.mu_fit = mu;
        rep.mu_min = mu;
    }
    rep.findings.push_back(std::string("lambda ") + (lam_fitted ? "fitted" : "supplied") + " = " + fmt(lambda) +
                           ", mu " + (mu_fitted ? "fitted per fiber point, mean" : "supplied") + " = " +
                           fmt(rep.mu_fit));
    if (lambda <= 0.0 || rep.mu_min <= 0.0)
        rep.findings.push_back("preamble caveat: the inequality suite assumes positive total and fiber scalar "
                               "curvature; here lambda = " + fmt(lambda) + ", min mu = " + fmt(rep.mu_min) +
                               ", so the forced-constancy reading does not bind");

    const double sm = (n1 + n2) * lambda;
    // Per-base-point pieces; s1 via the trace relation, so the implied Delta f
    // signs below are exact consequences, not independent measurements.
    std::vector<double> s1(base.fields.size());
    for (size_t i = 0; i < base.fields.size(); ++i)
        s1[i] = n1 * lambda - n2 * base.fields[i].lap / base.fields[i].f;

    struct Probe {
        double margin = std::numeric_limits<double>::infinity();
        size_t at_base = 0, at_fiber = 0;
        void see(double m, size_t b, size_t f) {
            if (m < margin) {
                margin = m;
                at_base = b;
                at_fiber = f;
            }
        }
    };
    auto lap_min = [&](double scale_f) {  // min of lap - scale_f * f over lattice
        double m = std::numeric_limits<double>::infinity();
        for (const WarpFields& wf : base.fields) m = std::min(m, wf.lap - scale_f * wf.f);
        return m;
    };
    auto set = [&](const std::string& key, const Probe& p, const std::string& ineq, const std::string& implied,
                   bool has_fiber_witness) {
        ConditionResult r;
        r.margin = p.margin;
        r.status = p.margin >= -1e-12 * (1.0 + std::abs(p.margin)) ? ConditionStatus::Holds : ConditionStatus::Fails;
        r.detail = ineq;
        r.witness_x1 = base.pts[p.at_base];
        if (has_fiber_witness && !mu_pts[p.at_fiber].empty()) r.witness_x2 = mu_pts[p.at_fiber];
        r.implied = r.status == ConditionStatus::Holds ? implied : "";
        rep.conditions[key] = r;
        if (r.status == ConditionStatus::Holds && rep.base_compact && rep.f_variation >= rep.triv_tol)
            rep.findings.push_back("condition (" + key + ") holds with a nonconstant warp on a compact base: "
                                   "under the Einstein hypothesis this is impossible, so that hypothesis fails "
                                   "(fit residual " + fmt(rep.lambda_residual) + ")");
    };

    {  // (a): |grad f| >= sqrt(Scal_fiber/(n2(n2-1))) for some fiber point, all x1
        Probe p;
        std::string detail;
        if (n2 == 1) {
            for (size_t i = 0; i < base.fields.size(); ++i)
                p.see(std::sqrt(std::max(0.0, base.fields[i].grad_norm2)), i, 0);
            detail = "n2 = 1: fiber scalar curvature vanishes, threshold 0";
        } else {
            double thr = std::numeric_limits<double>::infinity();
            size_t thr_at = 0;
            for (size_t j = 0; j < mu_vals.size(); ++j) {
                double t = std::sqrt(std::max(0.0, n2 * mu_vals[j]) / (n2 * (n2 - 1.0)));
                if (t < thr) {
                    thr = t;
                    thr_at = j;
                }
            }
            for (size_t i = 0; i < base.fields.size(); ++i)
                p.see(std::sqrt(std::max(0.0, base.fields[i].grad_norm2)) - thr, i, thr_at);
            detail = "|grad f| >= " + fmt(thr) + " (threshold minimized over the fiber grid)";
        }
        double chk = lap_min(lambda);
        set("a", p, detail,
            "Delta f >= lambda*f (grid min slack " + fmt(chk) + (chk >= 0.0 ? ", satisfied)" : ", violated)"), true);
    }
    {  // (b): Scal_total <= Scal_base everywhere
        Probe p;
        for (size_t i = 0; i < base.fields.size(); ++i) p.see(s1[i] - sm, i, 0);
        double chk = -std::numeric_limits<double>::infinity();  // max of lap + lambda*f
        for (const WarpFields& wf : base.fields) chk = std::max(chk, wf.lap + lambda * wf.f);
        set("b", p, "Scal_total <= Scal_base",
            "Delta f <= -lambda*f (grid max " + fmt(chk) + (chk <= 0.0 ? ", satisfied)" : ", violated)"), false);
    }
    {  // (c): Scal_total - Scal_fiber >= Scal_base, and mu >= lambda
        Probe p;
        for (size_t j = 0; j < mu_vals.size(); ++j)
            for (size_t i = 0; i < base.fields.size(); ++i)
                p.see(std::min(sm - n2 * mu_vals[j] - s1[i], mu_vals[j] - lambda), i, j);
        double chk = lap_min(0.0);
        set("c", p, "Scal_total - Scal_fiber >= Scal_base and mu >= lambda (division-free form)",
            "Delta f >= 0 (grid min " + fmt(chk) + (chk >= 0.0 ? ", satisfied)" : ", violated)"), true);
    }
    {  // (d): Scal_total - Scal_fiber/f^2 >= Scal_base
        Probe p;
        for (size_t j = 0; j < mu_vals.size(); ++j)
            for (size_t i = 0; i < base.fields.size(); ++i)
                p.see(sm - n2 * mu_vals[j] / (base.fields[i].f * base.fields[i].f) - s1[i], i, j);
        double chk = lap_min(0.0);
        set("d", p, "Scal_total - Scal_fiber/f^2 >= Scal_base",
            "Delta f >= 0 (grid min " + fmt(chk) + (chk >= 0.0 ? ", satisfied)" : ", violated)"), true);
    }
    {  // (e): Scal_base <= 0 everywhere
        Probe p;
        for (size_t i = 0; i < base.fields.size(); ++i) p.see(-s1[i], i, 0);
        double chk = lap_min(0.0);
        set("e", p, "Scal_base <= 0",
            "Delta f >= n1*lambda*f/n2, so Delta f >= 0 when lambda >= 0 (grid min " + fmt(chk) +
                (chk >= 0.0 ? ", satisfied)" : ", violated)"),
            false);
    }
    {  // (f): Scal_base >= n1*Scal_fiber/(n2 f^2)
        Probe p;
        for (size_t j = 0; j < mu_vals.size(); ++j)
            for (size_t i = 0; i < base.fields.size(); ++i)
                p.see(s1[i] - n1 * mu_vals[j] / (base.fields[i].f * base.fields[i].f), i, j);
        std::string implied;
        if (n1 == n2 && n2 > 1)
            implied = "|grad f| = 0 forced (n1 = n2); grid max |grad f| = " + fmt(rep.grad_max);
        else if (n1 == n2)
            implied = "no sign forced (n1 = n2 = 1)";
        else if (n1 > n2)
            implied = "Delta f >= 0 (grid min " + fmt(lap_min(0.0)) + ")";
        else
            implied = "Delta f <= 0 (grid max " + fmt(rep.subharmonicity.max) + ")";
        set("f", p, "Scal_base >= n1*Scal_fiber/(n2*f^2)", implied, true);
    }

    rep.verdict = detail_audit::decide(rep, rep.lambda_residual, /*require_nonconst_f=*/true);
    return rep;
}

}  // namespace finsler
