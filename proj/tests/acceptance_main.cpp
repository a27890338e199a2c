// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code = failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "muentropy/blowup_cp2.hpp"
#include "muentropy/estimates.hpp"
#include "muentropy/functionals.hpp"
#include "muentropy/io.hpp"
#include "muentropy/optimizer.hpp"
#include "muentropy/thermo.hpp"
#include "test_systems.hpp"

using namespace muentropy;
using namespace fixtures;

namespace {

int failures = 0;

void criterion(int number, const std::string& label, const std::function<bool(std::string&)>& run) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = run(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

bool closed_form_reproduction(std::string& detail) {
    ToricSystem bl = blowup_cp2_system();
    Vec eta = blowup_cp2_eta();
    double worst = 0.0;
    QuadratureConfig tight;
    tight.rel_tol = 1e-12;
    for (int i = -300; i <= 300; ++i) {
        double x = i * 0.01;
        AffineFn l{x * eta, 0.0};
        AffineFn weighted{x * eta, 0.0};
        double A = integrate_volume_exp_affine(bl, l);
        double B = integrate_boundary_exp_affine(bl, l);
        double D = integrate_volume_affine_exp(bl, weighted, l);
        worst = std::max(worst, std::abs(A - blowup_cp2_volume_integral(x)) /
                                    std::abs(blowup_cp2_volume_integral(x)));
        worst = std::max(worst, std::abs(B - blowup_cp2_boundary_integral(x)) /
                                    std::abs(blowup_cp2_boundary_integral(x)));
        double Dref = blowup_cp2_weighted_integral(x);
        worst = std::max(worst, std::abs(D - Dref) / std::max(std::abs(Dref), 1e-3));
        // independent numeric spot checks along the grid
        if (i % 25 == 0) {
            double An = integrate_volume(
                bl, [&](const Vec& y) { return std::exp(l(y)); }, tight);
            double Bn = integrate_boundary(
                bl, [&](const Vec& y) { return std::exp(l(y)); }, tight);
            worst = std::max(worst, std::abs(An - A) / std::abs(A));
            worst = std::max(worst, std::abs(Bn - B) / std::abs(B));
        }
    }
    detail = "max relative error " + format_g17(worst) + " over 601 grid points (tol 1e-8)";
    return worst <= 1e-8;
}

bool futaki_derivative_identity(std::string& detail) {
    ToricSystem bl = blowup_cp2_system();
    ToricSystem sq = sym_square_sys();
    Rng rng(20260809);
    double worst = 0.0;
    int done = 0;
    for (int t = 0; done < 50; ++t) {
        Rng sub = rng.split(t);
        const ToricSystem& sys = (t % 2 == 0) ? bl : sq;
        double lambda = sub.uniform(-7.0, 3.0);
        Vec xi = pt({sub.uniform(-0.8, 0.8), sub.uniform(-0.8, 0.8)});
        PiecewiseAffineConvex q = random_nonneg_convex(sys.polytope, sub);
        double fut = futaki(sys, lambda, xi, q);
        if (std::abs(fut) < 1e-3) continue;  // relative tolerance needs scale
        std::vector<PiecewiseAffineConvex> kinks{q};
        const double h = 1e-4;
        auto value = [&](double tt) {
            return na_mu_lambda_field(
                sys, lambda, [&](const Vec& y) { return xi.dot(y) + tt * q(y); }, kinks);
        };
        double fd = (value(h) - value(-h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd + fut) / std::abs(fut));
        ++done;
    }
    double df = donaldson_futaki(bl, linear_from_vector(blowup_cp2_eta()));
    double df_err = std::abs(df - M_PI / 3.0);
    detail = "max FD mismatch " + format_g17(worst) + " (tol 1e-5); |DF(eta) - pi/3| = " +
             format_g17(df_err) + " (tol 1e-8)";
    return worst <= 1e-5 && df_err <= 1e-8;
}

bool optimizer_cross_validation(std::string& detail) {
    ToricSystem bl = blowup_cp2_system();
    bool ok = true;
    std::string parts;
    for (double frac : {0.0, -1.0}) {
        double lambda = 2.0 * M_PI * frac;
        auto vec = optimize_vector(bl, lambda, Vec::Zero(2));
        double oracle = blowup_cp2_optimal_x(lambda);
        double gap = std::abs(vec.xi(0) - oracle);
        parts += " x(lambda/2pi=" + format_g17(frac) + ") gap=" + format_g17(gap);
        ok = ok && vec.converged && gap <= 1e-4 && std::abs(vec.xi(0) - vec.xi(1)) <= 1e-6;
    }
    SolverConfig cfg;  // full default schedule: pieces 10, 4 random starts
    cfg.seed = 7;
    OptResult pa0 = canonical_distribution(bl, 0.0, cfg);
    double F0_ref = -blowup_cp2_na_mu(blowup_cp2_optimal_x(0.0)) / (2.0 * M_PI);
    double rel0 = std::abs(pa0.report.F - F0_ref) / std::abs(F0_ref);
    OptResult pa1 = minimize_free_energy(bl, 1.0, cfg);
    double lam = -2.0 * M_PI;
    double F1_ref = -(blowup_cp2_na_mu_lambda(blowup_cp2_optimal_x(lam), lam) +
                      lam * log_exp_minus_n_mass(bl)) /
                    (2.0 * M_PI);
    double rel1 = std::abs(pa1.report.F - F1_ref) / std::abs(F1_ref);
    parts += " F(T=0) rel=" + format_g17(rel0) + " F(T=1) rel=" + format_g17(rel1);
    detail = parts + " (tols 1e-4 / 1e-3)";
    return ok && rel0 <= 1e-3 && rel1 <= 1e-3;
}

bool semistable_baseline(std::string& detail) {
    SolverConfig cfg;
    cfg.pieces = 6;
    cfg.starts = 2;
    cfg.seed = 3;
    bool ok = true;
    double worst_l1 = 0.0, worst_f = 0.0;
    for (int which = 0; which < 2; ++which) {
        ToricSystem sys = which == 0 ? sym_square_sys() : segment_sys(-1, 1);
        double U1 = sys.boundary_measure / sys.volume;
        State one = normalize(sys, linear_from_vector(Vec::Zero(sys.dim())));
        for (double T : {0.0, 1.0, 10.0}) {
            OptResult res = canonical_distribution(sys, T, cfg);
            double l1 = l1_distance(sys, res.u_star, one) / sys.volume;
            double fgap = std::abs(res.report.F - U1);
            worst_l1 = std::max(worst_l1, l1);
            worst_f = std::max(worst_f, fgap);
            ok = ok && l1 <= 1e-2 && fgap <= 1e-3;
        }
    }
    detail = "worst |u-1|_L1/vol = " + format_g17(worst_l1) + " (tol 1e-2); worst |F - U(1)| = " +
             format_g17(worst_f) + " (tol 1e-3)";
    return ok;
}

bool thermodynamic_structure(std::string& detail) {
    ToricSystem bl = blowup_cp2_system();
    // canonical family on a 6-point grid (single-piece curves are exact for
    // this system; tight tolerances keep the N-scaled heat-bath sums clean)
    SolverConfig curve_cfg;
    curve_cfg.pieces = 1;
    curve_cfg.starts = 1;
    curve_cfg.grad_tol = 1e-10;
    curve_cfg.f_tol = 1e-5;
    CanonicalFamily fam = canonical_family(bl, {0.0, 0.5, 1.0, 2.0, 5.0, 20.0}, curve_cfg);
    double slack = 2.0 * curve_cfg.f_tol;
    bool fam_ok = fam.worst_U_decrease <= slack && fam.worst_S_decrease <= slack &&
                  fam.worst_F_convexity <= slack;

    // product F-additivity on blowup x segment
    SolverConfig prod_cfg;
    prod_cfg.pieces = 3;
    prod_cfg.starts = 2;
    prod_cfg.seed = 5;
    ToricSystem seg = segment_sys(-1, 1);
    auto prod_res = product_canonical_check(bl, seg, 1.0, prod_cfg);
    bool prod_ok = prod_res.f_residual <= 10.0 * prod_cfg.f_tol;

    // heat bath against the blowup reservoir
    CanonicalCurve curve(bl, curve_cfg);
    double T_R = 1.0;
    double U = curve.U(0.5);
    HeatBathTable table =
        heat_bath_experiment(bl, bl, U, T_R, {1, 2, 4, 8, 16, 32}, curve.at(0.5).u_star,
                             curve_cfg);
    bool shrink = true;
    double prev = 1e300;
    for (const auto& row : table.rows) {
        double gap = std::abs(row.T_N - T_R);
        if (gap >= prev) shrink = false;
        prev = gap;
    }
    double final_rel = std::abs(table.rows.back().dS_N - table.limit) / std::abs(table.limit);
    bool hb_ok = shrink && final_rel <= 0.05;

    detail = "family(worst dU=" + format_g17(fam.worst_U_decrease) +
             ", dS=" + format_g17(fam.worst_S_decrease) +
             ", d2F=" + format_g17(fam.worst_F_convexity) + "; slack " + format_g17(slack) +
             "), product residual=" + format_g17(prod_res.f_residual) + " (tol " +
             format_g17(10.0 * prod_cfg.f_tol) + "), heat-bath final rel=" +
             format_g17(final_rel) + " (tol 0.05)";
    return fam_ok && prod_ok && hb_ok;
}

bool estimates_suite(std::string& detail) {
    ToricSystem bl = blowup_cp2_system();
    ToricSystem sq = sym_square_sys();
    // mean value: 1000 (u, x) pairs, zero violations
    Rng rng(606);
    int violations = 0, done = 0;
    for (int t = 0; done < 1000; ++t) {
        Rng sub = rng.split(t);
        const ToricSystem& sys = (t % 2 == 0) ? bl : sq;
        PiecewiseAffineConvex u = random_nonneg_convex(sys.polytope, sub);
        Vec x = sample_point(sys.polytope, sub);
        if (sys.polytope.inradius_at(x) < 1e-6) continue;
        auto [lhs, rhs] = mean_value_check(sys, u, x, 48);
        if (lhs > rhs * (1.0 + 1e-6)) ++violations;
        ++done;
    }
    // Poincare ratios finite on 200 random PA per system
    bool finite = true;
    double chat_bl = 0.0;
    for (int which = 0; which < 2; ++which) {
        const ToricSystem& sys = which == 0 ? bl : sq;
        EstimateProbe probe = poincare_probe(sys, 2.0, 200, 10100 + which);
        for (double r : probe.ratios) finite = finite && std::isfinite(r);
        if (which == 0) chat_bl = probe.sup_ratio;
    }
    // entropy bound with the empirical constant: violations only when the
    // constant binds (the Jensen step itself must never fail)
    int jensen_bad = 0, unexplained = 0, flagged = 0;
    Rng rng2(707);
    for (int t = 0; t < 200; ++t) {
        Rng sub = rng2.split(t);
        PiecewiseAffineConvex u = random_nonneg_convex(bl.polytope, sub);
        auto s = entropy_bound_sample(bl, u);
        if (s.boundary_mass <= 0.0) continue;
        if (s.lhs > s.jensen_rhs + 1e-8) ++jensen_bad;
        if (s.lhs > 2.0 * std::log(chat_bl * s.boundary_mass) + 1e-8) {
            ++flagged;
            if (std::exp(s.jensen_rhs / 2.0) / s.boundary_mass <= chat_bl) ++unexplained;
        }
    }
    detail = "mean-value violations " + std::to_string(violations) +
             "/1000, ratios finite=" + (finite ? std::string("yes") : std::string("no")) +
             ", entropy-bound flags " + std::to_string(flagged) + " (all constant-binding: " +
             (unexplained == 0 ? "yes" : "NO") + "), Jensen violations " +
             std::to_string(jensen_bad);
    return violations == 0 && finite && jensen_bad == 0 && unexplained == 0;
}

bool invariant_suite(std::string& detail) {
    ToricSystem bl = blowup_cp2_system();
    Rng rng(808);
    double worst_gauge = 0.0, worst_logconv = 0.0, worst_affine = 0.0, worst_ident = 0.0;
    double min_concavity_margin = 1e300;
    for (int t = 0; t < 25; ++t) {
        Rng sub = rng.split(t);
        PiecewiseAffineConvex qa = random_nonneg_convex(bl.polytope, sub);
        PiecewiseAffineConvex qb = random_nonneg_convex(bl.polytope, sub);
        double c = sub.uniform(-4, 4);
        State ua = normalize(bl, qa);
        State ub = normalize(bl, qb);
        State ua_shift = normalize(bl, qa.shifted(c));
        for (int i = 0; i < 40; ++i) {
            Vec x = sample_point(bl.polytope, sub);
            worst_gauge = std::max(
                worst_gauge, std::abs(ua.density(x) - ua_shift.density(x)) /
                                 (1.0 + ua.density(x)));
        }
        double tt = sub.uniform(0.2, 0.8);
        State um = mixture(ua, ub, tt);
        for (int i = 0; i < 40; ++i) {
            Vec x = sample_point(bl.polytope, sub), y = sample_point(bl.polytope, sub);
            double lhs = um.density(0.5 * (x + y));
            double rhs = um.density(x) * um.density(y);
            worst_logconv = std::max(worst_logconv, lhs * lhs - rhs * (1.0 + 1e-9));
        }
        double Ua = internal_energy(bl, ua), Ub = internal_energy(bl, ub);
        double Um = internal_energy(bl, um);
        worst_affine =
            std::max(worst_affine,
                     std::abs(Um - ((1 - tt) * Ua + tt * Ub)) / std::abs(Um));
        if (l1_distance(bl, ua, ub) > 1e-3) {
            double margin =
                entropy(bl, um) - ((1 - tt) * entropy(bl, ua) + tt * entropy(bl, ub));
            min_concavity_margin = std::min(min_concavity_margin, margin);
        }
        // conversion identities
        double T = sub.uniform(0.0, 3.0);
        double lam = lambda_from_temperature(T);
        double S = entropy(bl, ua), U = internal_energy(bl, ua);
        worst_ident = std::max(
            worst_ident, std::abs(na_mu(bl, qa) + 2.0 * M_PI * U) / (2.0 * M_PI * U));
        worst_ident =
            std::max(worst_ident, std::abs(sigma_functional(bl, qa) -
                                           (-S - log_exp_minus_n_mass(bl))));
        double lhs = na_mu_lambda(bl, lam, qa);
        double rhs = -2.0 * M_PI * (U - T * S) - lam * log_exp_minus_n_mass(bl);
        worst_ident = std::max(worst_ident, std::abs(lhs - rhs) / std::abs(rhs));
    }
    // surrogate gradient vs finite differences
    FreeEnergyObjective obj(bl, 0.8, 3, 64.0, 6, 2);
    Rng rng2(909);
    double worst_grad = 0.0;
    for (int t = 0; t < 20; ++t) {
        Rng sub = rng2.split(t);
        std::vector<double> theta(std::size_t(obj.parameter_count()));
        for (auto& v : theta) v = 0.5 * sub.normal();
        std::vector<double> grad;
        obj.value_and_gradient(theta, grad);
        double ginf = 0.0;
        for (double g : grad) ginf = std::max(ginf, std::abs(g));
        for (int c = 0; c < obj.parameter_count(); ++c) {
            auto tp = theta, tm = theta;
            tp[std::size_t(c)] += 1e-5;
            tm[std::size_t(c)] -= 1e-5;
            double fd = (obj.value(tp) - obj.value(tm)) / 2e-5;
            // scale floored at 1e-4 of the gradient norm: zero-ish components
            // only carry central-difference roundoff
            worst_grad = std::max(
                worst_grad, std::abs(fd - grad[std::size_t(c)]) /
                                std::max({std::abs(fd), std::abs(grad[std::size_t(c)]),
                                          1e-4 * ginf, 1e-12}));
        }
    }
    detail = "gauge " + format_g17(worst_gauge) + " (1e-12), log-convexity defect " +
             format_g17(worst_logconv) + " (<=0), U-affinity " + format_g17(worst_affine) +
             " (1e-9), S-concavity margin " + format_g17(min_concavity_margin) +
             " (>0), identities " + format_g17(worst_ident) + " (1e-8), grad FD " +
             format_g17(worst_grad) + " (1e-4)";
    return worst_gauge <= 1e-12 && worst_logconv <= 0.0 && worst_affine <= 1e-9 &&
           min_concavity_margin > 0.0 && worst_ident <= 1e-8 && worst_grad <= 1e-4;
}

}  // namespace

int main() {
    criterion(1, "closed-form reproduction", closed_form_reproduction);
    criterion(2, "Futaki derivative identity", futaki_derivative_identity);
    criterion(3, "optimizer cross-validation", optimizer_cross_validation);
    criterion(4, "semistable baseline", semistable_baseline);
    criterion(5, "thermodynamic structure", thermodynamic_structure);
    criterion(6, "estimates suite", estimates_suite);
    criterion(7, "invariant suite", invariant_suite);
    if (failures == 0) std::printf("all acceptance criteria passed\n");
    return failures;
}
