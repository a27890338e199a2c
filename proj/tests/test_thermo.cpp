#include <cmath>

#include "doctest.h"
#include "muentropy/blowup_cp2.hpp"
#include "muentropy/thermo.hpp"
#include "test_systems.hpp"

using namespace muentropy;
using namespace fixtures;

namespace {
SolverConfig tight_linear_cfg() {
    // the blowup family is exactly linear, so a single piece with tight
    // tolerances gives fast, precise canonical curves
    SolverConfig cfg;
    cfg.pieces = 1;
    cfg.starts = 1;
    cfg.grad_tol = 1e-10;
    cfg.f_tol = 1e-6;
    cfg.mesh_refine = 3;
    return cfg;
}
SolverConfig small_cfg() {
    SolverConfig cfg;
    cfg.pieces = 3;
    cfg.starts = 1;
    cfg.mesh_refine = 2;
    return cfg;
}
}  // namespace

TEST_CASE("canonical family: constant on semistable systems") {
    ToricSystem sq = sym_square_sys();
    CanonicalFamily fam = canonical_family(sq, {0.0, 0.5, 1.0, 2.0}, small_cfg());
    for (const auto& p : fam.points) {
        CHECK(p.F == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(p.U == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(p.S == doctest::Approx(0.0).epsilon(1e-3));
    }

    ToricSystem seg = segment_sys(-1, 1);
    CanonicalFamily fseg = canonical_family(seg, {0.0, 1.0, 2.0}, small_cfg());
    for (const auto& p : fseg.points) CHECK(p.F == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("canonical family on the blowup matches the closed-form curve") {
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalFamily fam = canonical_family(bl, {0.0, 0.5, 1.0, 2.0, 5.0, 20.0}, cfg);
    const double f_tol = cfg.f_tol;
    CHECK(fam.worst_U_decrease <= 2 * f_tol);
    CHECK(fam.worst_S_decrease <= 2 * f_tol);
    CHECK(fam.worst_F_decrease <= 2 * f_tol);
    CHECK(fam.worst_F_convexity <= 2 * f_tol);
    CHECK(fam.points.back().F == doctest::Approx(2.0).epsilon(0.05));
    // endpoint trends: F approaches U(1_P) and T S decays on the tail
    const auto& tail = fam.points[fam.points.size() - 2];
    const auto& last = fam.points.back();
    CHECK(std::abs(last.T * last.S) < std::abs(tail.T * tail.S));

    // each grid point agrees with the 1-D closed-form family
    for (const auto& p : fam.points) {
        double x = blowup_cp2_optimal_x(lambda_from_temperature(p.T));
        double A = blowup_cp2_volume_integral(x);
        double U_expect = blowup_cp2_boundary_integral(x) / A;
        double S_expect = -(blowup_cp2_weighted_integral(x) / A + std::log(4.0 / A));
        CHECK(p.U == doctest::Approx(U_expect).epsilon(2e-5));
        CHECK(p.S == doctest::Approx(S_expect).epsilon(2e-4));
        CHECK(p.F == doctest::Approx(U_expect - p.T * S_expect).epsilon(2e-5));
    }
}

TEST_CASE("canonical points match externally computed references") {
    // frozen 30-digit-arithmetic references for the blowup family
    // (independent golden-section on the closed forms)
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    struct Ref {
        double T, U, S, F;
    };
    const Ref refs[] = {
        {0.0, 1.97774358, -0.01101336, 1.97774358},
        {0.5, 1.97862190, -0.00705988, 1.98215184},
        {1.0, 1.98018335, -0.00491297, 1.98509632},
        {2.0, 1.98323873, -0.00277459, 1.98878790},
    };
    for (const auto& r : refs) {
        OptResult res = canonical_distribution(bl, r.T, cfg);
        CHECK(res.report.U == doctest::Approx(r.U).epsilon(2e-6));
        CHECK(res.report.S == doctest::Approx(r.S).epsilon(2e-4));
        CHECK(res.report.F == doctest::Approx(r.F).epsilon(2e-6));
    }
}

TEST_CASE("equilibrium of energy brackets the target") {
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalCurve curve(bl, cfg);
    double U0 = curve.U(0.0);
    double Utop = curve.trivial_energy();
    CHECK(Utop == doctest::Approx(2.0));

    double target = 0.5 * (U0 + Utop);
    EquilibriumResult eq = equilibrium_of_energy(bl, target, cfg, 1e-4);
    CHECK(std::abs(eq.report.U - target) <= 1e-4);
    CHECK(eq.T_lo <= eq.T_hi);

    // top of the range: trivial state, sentinel upper end
    EquilibriumResult top = equilibrium_of_energy(bl, Utop, cfg, 1e-4);
    CHECK(top.T_hi == kTMaxSentinel);

    CHECK_THROWS_AS(equilibrium_of_energy(bl, Utop + 0.5, cfg), OutOfRangeError);
    CHECK_THROWS_AS(equilibrium_of_energy(bl, U0 - 0.5, cfg), OutOfRangeError);

    // semistable square: any target = U(1_P) is degenerate-isothermal
    ToricSystem sq = sym_square_sys();
    EquilibriumResult eqs = equilibrium_of_energy(sq, 2.0, small_cfg(), 1e-3);
    CHECK(eqs.T_hi == kTMaxSentinel);
    CHECK(eqs.T_lo == 0.0);
}

TEST_CASE("isothermality: reflexive, separated for distinct temperatures") {
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalCurve curve(bl, cfg);
    double U1 = curve.U(1.0);
    auto v = isothermal_check(bl, U1, bl, U1, cfg);
    CHECK(v.isothermal);

    double U2 = curve.U(2.0);
    auto w = isothermal_check(bl, U1, bl, U2, cfg, 1e-2);
    CHECK_FALSE(w.isothermal);

    // degenerate semistable pair: isothermal at every temperature, and the
    // product state passes the F-additivity check
    ToricSystem sq = sym_square_sys();
    ToricSystem seg = segment_sys(-1, 1);
    SolverConfig small;
    small.pieces = 2;
    small.starts = 1;
    small.mesh_refine = 2;
    auto d = isothermal_check(sq, 2.0, seg, 1.0, small);
    CHECK(d.isothermal);
    CHECK(d.f_additivity_residual <= 10.0 * small.f_tol);
}

TEST_CASE("product canonical: square = segment x segment") {
    ToricSystem seg = segment_sys(-1, 1);
    auto res = product_canonical_check(seg, seg, 1.0, small_cfg());
    CHECK(res.f_residual <= 10.0 * small_cfg().f_tol);
    CHECK(res.composite.report.F == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(res.l1_marginal_distance <= 1e-2);

    // T = 0 with both factors semistable: residual at the f_tol scale
    auto res0 = product_canonical_check(seg, seg, 0.0, small_cfg());
    CHECK(res0.f_residual <= small_cfg().f_tol);
}

TEST_CASE("product canonical spot check in dimension 2 + 2") {
    // both factors are the blowup system; the composite optimum is the
    // product of the (linear) factor optima, so one piece suffices and the
    // 4-D geometry/quadrature/solver path gets exercised end to end
    ToricSystem bl = blowup_sys();
    SolverConfig cfg;
    cfg.pieces = 1;
    cfg.starts = 1;
    cfg.mesh_order = 4;
    cfg.mesh_refine = 0;
    cfg.report_quadrature.rel_tol = 1e-8;
    auto res = product_canonical_check(bl, bl, 1.0, cfg);
    CHECK(res.f_residual <= 10.0 * cfg.f_tol);
    CHECK(res.l1_marginal_distance <= 5e-2);
    CHECK(res.composite.report.F ==
          doctest::Approx(2.0 * res.factor1.report.F).epsilon(1e-4));
}

TEST_CASE("canonical F is minimal against probe states") {
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalFamily fam = canonical_family(bl, {0.0, 1.0, 3.0}, cfg);
    Rng rng(220);
    for (const auto& p : fam.points) {
        for (int t = 0; t < 6; ++t) {
            Rng sub = rng.split(std::uint64_t(t) * 31 + std::uint64_t(p.T * 7));
            State probe = normalize(bl, random_nonneg_convex(bl.polytope, sub));
            double Fp = free_energy(bl, p.T, probe);
            CHECK(p.F <= Fp + cfg.f_tol);
        }
        // the trivial-state bound from the solver contract
        CHECK(p.F <= bl.boundary_measure / bl.volume + cfg.f_tol);
    }
}

TEST_CASE("heat bath rejects a flat reservoir") {
    ToricSystem bl = blowup_sys();
    ToricSystem sq = sym_square_sys();  // semistable: zero heat capacity
    SolverConfig cfg = small_cfg();
    State probe = normalize(bl, linear_from_vector(pt({-0.2, -0.2})));
    CHECK_THROWS_AS(heat_bath_experiment(bl, sq, 1.98, 1.0, {1, 2}, probe, cfg),
                    NegativeHeatCapacityError);
}

TEST_CASE("heat capacity signs") {
    ToricSystem sq = sym_square_sys();
    CHECK(std::abs(heat_capacity(sq, 1.0, 0.05, small_cfg())) <= 5e-2);

    ToricSystem seg = segment_sys(-1, 1);
    CHECK(std::abs(heat_capacity(seg, 1.0, 0.05, small_cfg())) <= 5e-2);

    ToricSystem bl = blowup_sys();
    double cap = heat_capacity(bl, 1.0, 0.05, tight_linear_cfg());
    CHECK(cap > 0.0);
}

TEST_CASE("heat bath: isothermal branch is constant") {
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalCurve curve(bl, cfg);
    double T_R = 1.0;
    double U = curve.U(T_R);
    const OptResult& can = curve.at(T_R);
    HeatBathTable t =
        heat_bath_experiment(bl, bl, U, T_R, {1, 2, 4}, can.u_star, cfg);
    for (const auto& row : t.rows) {
        CHECK(row.T_N == doctest::Approx(T_R).epsilon(1e-6));
        CHECK(std::abs(row.dS_N) <= 1e-6);
    }
    CHECK(std::abs(t.limit) <= 1e-8);
}

TEST_CASE("heat bath: convergence to the free-energy difference") {
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalCurve curve(bl, cfg);
    double T_R = 1.0;
    double U = curve.U(0.5);
    const OptResult& probe = curve.at(0.5);
    HeatBathTable t =
        heat_bath_experiment(bl, bl, U, T_R, {1, 2, 4, 8, 16, 32}, probe.u_star, cfg);
    CHECK(t.limit != 0.0);
    double prev_gap = 1e300;
    for (const auto& row : t.rows) {
        double gap = std::abs(row.T_N - T_R);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(std::abs(t.rows.back().dS_N - t.limit) <= 0.05 * std::abs(t.limit));
}

TEST_CASE("medium temperature and superadditivity via additive composites") {
    // composite of two blowup copies held at different energies; composite
    // canonical quantities via per-factor additivity
    ToricSystem bl = blowup_sys();
    SolverConfig cfg = tight_linear_cfg();
    CanonicalCurve curve(bl, cfg);
    double T1 = 0.5, T2 = 2.0;
    double U1 = curve.U(T1), U2 = curve.U(T2);
    // solve 2 U_can(T*) = U1 + U2: medium temperature
    double lo = T1, hi = T2;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (2.0 * curve.U(mid) < U1 + U2)
            lo = mid;
        else
            hi = mid;
    }
    double Tmid = 0.5 * (lo + hi);
    CHECK(T1 < Tmid);
    CHECK(Tmid < T2);
    // superadditivity: S^eq_12(U1+U2) = 2 S_can(T*) >= S_can(T1) + S_can(T2)
    CHECK(2.0 * curve.S(Tmid) >= curve.S(T1) + curve.S(T2) - 2.0 * cfg.f_tol);
}
