#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "muentropy/optimizer.hpp"

namespace muentropy {

// sentinel standing in for T = infinity endpoints
constexpr double kTMaxSentinel = 1e6;

// Memoized canonical sweep with warm starts between neighboring
// temperatures; the workhorse behind equilibria and the heat bath.
class CanonicalCurve {
public:
    CanonicalCurve(const ToricSystem& system, SolverConfig cfg);

    const OptResult& at(double T);
    double U(double T) { return at(T).report.U; }
    double S(double T) { return at(T).report.S; }
    double F(double T) { return at(T).report.F; }

    const ToricSystem& system() const { return *system_; }
    double trivial_energy() const { return trivial_energy_; }  // U(1_P)

private:
    const ToricSystem* system_;
    SolverConfig cfg_;
    double trivial_energy_;
    std::map<double, OptResult> memo_;
    std::mutex mutex_;
};

struct CanonicalPoint {
    double T = 0.0;
    double U = 0.0, S = 0.0, F = 0.0;
    OptResult opt;
};

struct CanonicalFamily {
    std::vector<CanonicalPoint> points;
    double trivial_energy = 0.0;   // U(1_P) = F limit at large T
    double worst_U_decrease = 0.0;  // max over grid of U[i] - U[i+1]
    double worst_S_decrease = 0.0;
    double worst_F_decrease = 0.0;
    double worst_F_convexity = 0.0;  // max discrete second difference of F
};

// Warm-started sweep of canonical_distribution over an increasing T grid;
// the first grid point runs serially, the rest in parallel seeded from it.
CanonicalFamily canonical_family(const ToricSystem& system, const std::vector<double>& T_grid,
                                 const SolverConfig& cfg);

struct EquilibriumResult {
    double U_target = 0.0;
    double T_lo = 0.0, T_hi = 0.0;  // bracketing interval
    State u_eq;
    FunctionalReport report;
};

// Bisection on the monotone canonical energy curve until
// |U(u_T) - U_target| <= tol. Throws OutOfRangeError outside
// [U_can(0), U(1_P)].
EquilibriumResult equilibrium_of_energy(const ToricSystem& system, double U_target,
                                        const SolverConfig& cfg, double tol = 1e-4);

struct IsothermalVerdict {
    bool isothermal = false;
    EquilibriumResult first, second;
    double overlap_lo = 0.0, overlap_hi = 0.0;
    // F-additivity of the product state at the common temperature, solved on
    // the product polytope when the combined dimension stays desk-scale;
    // NaN when skipped
    double f_additivity_residual = 0.0;
};

IsothermalVerdict isothermal_check(const ToricSystem& s1, double U1, const ToricSystem& s2,
                                   double U2, const SolverConfig& cfg, double T_tol = 5e-2);

struct ProductCanonicalResidual {
    double f_residual = 0.0;           // |F_12 - F_1 - F_2|
    double l1_marginal_distance = 0.0;  // composite vs product of its marginals
    OptResult composite, factor1, factor2;
};

// Independent spot-check of the product theorem: the composite canonical
// state is solved on the product polytope, never assembled from factors.
ProductCanonicalResidual product_canonical_check(const ToricSystem& s1, const ToricSystem& s2,
                                                 double T, const SolverConfig& cfg);

struct HeatBathRow {
    int N = 0;
    double T_N = 0.0;
    double dS_N = 0.0;
};

struct HeatBathTable {
    std::vector<HeatBathRow> rows;
    double T_R = 0.0;
    double limit = 0.0;  // -(1/T_R)(F_can(T_R) - F(T_R, u_probe))
    double U_probe = 0.0, S_probe = 0.0;
};

// For each N, T_N solves U_can(T) + N U_can_R(T) = U + N U_can_R(T_R) on the
// per-factor canonical curves (the product polytope is never optimized);
// dS_N is the composite entropy difference against the probe product state.
// Throws NegativeHeatCapacityError when the reservoir curve is flat or
// decreasing at T_R.
HeatBathTable heat_bath_experiment(const ToricSystem& system, const ToricSystem& reservoir,
                                   double U, double T_R, const std::vector<int>& N_list,
                                   const State& u_probe, const SolverConfig& cfg);

// central difference T (S_can(T+dT) - S_can(T-dT)) / (2 dT)
double heat_capacity(const ToricSystem& system, double T, double dT, const SolverConfig& cfg);

}  // namespace muentropy
