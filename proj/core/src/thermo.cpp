#include "muentropy/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "muentropy/parallel.hpp"

namespace muentropy {

CanonicalCurve::CanonicalCurve(const ToricSystem& system, SolverConfig cfg)
    : system_(&system),
      cfg_(std::move(cfg)),
      trivial_energy_(system.boundary_measure / system.volume) {}

const OptResult& CanonicalCurve::at(double T) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memo_.find(T);
    if (it != memo_.end()) return it->second;
    SolverConfig cfg = cfg_;
    if (!memo_.empty()) {
        // warm start from the nearest solved temperature
        auto up = memo_.lower_bound(T);
        const OptResult* near = nullptr;
        if (up != memo_.end()) near = &up->second;
        if (up != memo_.begin()) {
            auto down = std::prev(up);
            if (!near || T - down->first < up->first - T) near = &down->second;
        }
        if (near) cfg.warm_starts.push_back(near->q_star);
    }
    OptResult res = canonical_distribution(*system_, T, cfg);
    return memo_.emplace(T, std::move(res)).first->second;
}

CanonicalFamily canonical_family(const ToricSystem& system, const std::vector<double>& T_grid,
                                 const SolverConfig& cfg) {
    CanonicalFamily fam;
    fam.trivial_energy = system.boundary_measure / system.volume;
    if (T_grid.empty()) return fam;
    for (std::size_t i = 0; i < T_grid.size(); ++i) {
        if (T_grid[i] < 0.0 || (i > 0 && T_grid[i] <= T_grid[i - 1]))
            throw Error("temperature grid must be nonnegative and increasing");
    }
    fam.points.resize(T_grid.size());
    // serial warm-start prefix, then the remaining grid points in parallel
    OptResult first = canonical_distribution(system, T_grid.front(), cfg);
    fam.points[0] = {T_grid.front(), first.report.U, first.report.S, first.report.F, first};
    SolverConfig warm = cfg;
    warm.warm_starts.push_back(first.q_star);
    parallel_for(T_grid.size() - 1, [&](std::size_t i) {
        OptResult res = canonical_distribution(system, T_grid[i + 1], warm);
        fam.points[i + 1] = {T_grid[i + 1], res.report.U, res.report.S, res.report.F,
                             std::move(res)};
    });
    for (std::size_t i = 0; i + 1 < fam.points.size(); ++i) {
        fam.worst_U_decrease =
            std::max(fam.worst_U_decrease, fam.points[i].U - fam.points[i + 1].U);
        fam.worst_S_decrease =
            std::max(fam.worst_S_decrease, fam.points[i].S - fam.points[i + 1].S);
        fam.worst_F_decrease =
            std::max(fam.worst_F_decrease, fam.points[i].F - fam.points[i + 1].F);
    }
    for (std::size_t i = 1; i + 1 < fam.points.size(); ++i) {
        double h1 = fam.points[i].T - fam.points[i - 1].T;
        double h2 = fam.points[i + 1].T - fam.points[i].T;
        double d2 = 2.0 *
                    (h1 * fam.points[i + 1].F - (h1 + h2) * fam.points[i].F +
                     h2 * fam.points[i - 1].F) /
                    (h1 * h2 * (h1 + h2));
        fam.worst_F_convexity = std::max(fam.worst_F_convexity, d2);
    }
    return fam;
}

EquilibriumResult equilibrium_of_energy(const ToricSystem& system, double U_target,
                                        const SolverConfig& cfg, double tol) {
    CanonicalCurve curve(system, cfg);
    const double U_top = curve.trivial_energy();
    EquilibriumResult out;
    out.U_target = U_target;
    if (U_target > U_top + tol)
        throw OutOfRangeError("energy target above the trivial-state energy");
    if (U_target >= U_top - tol) {
        // degenerate top of the range: the trivial state at T = infinity
        out.T_hi = kTMaxSentinel;
        out.T_lo = 0.0;
        PiecewiseAffineConvex zero = linear_from_vector(Vec::Zero(system.dim()));
        out.u_eq = normalize(system, zero, cfg.report_quadrature);
        out.report = functional_report(system, kTMaxSentinel, zero, cfg.report_quadrature);
        if (curve.U(0.0) < U_top - tol) out.T_lo = kTMaxSentinel;  // K-unstable: only T = inf
        return out;
    }
    if (U_target < curve.U(0.0) - tol)
        throw OutOfRangeError("energy target below the ground-state energy");

    // monotone bisection for a level crossing of the canonical energy curve
    auto crossing = [&](double level, double lo, double hi) {
        while (curve.U(hi) < level && hi < kTMaxSentinel) hi = std::max(1.0, hi) * 2.0;
        if (curve.U(lo) >= level) return lo;
        if (curve.U(hi) < level) return kTMaxSentinel;
        for (int it = 0; it < 60 && hi - lo > 1e-7 * (1.0 + hi); ++it) {
            double mid = 0.5 * (lo + hi);
            if (curve.U(mid) < level)
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    double T_star = crossing(U_target, 0.0, 1.0);
    // the reported interval collects the temperatures whose canonical energy
    // stays within tol of the target (singleton up to tol under mildness)
    out.T_lo = crossing(U_target - tol, 0.0, T_star);
    out.T_hi = crossing(U_target + tol, T_star, std::max(1.0, 2.0 * T_star));
    const OptResult& opt = curve.at(T_star);
    out.u_eq = opt.u_star;
    out.report = opt.report;
    if (std::abs(opt.report.U - U_target) > 10.0 * tol)
        throw OutOfRangeError("bisection failed to reach the energy target");
    return out;
}

IsothermalVerdict isothermal_check(const ToricSystem& s1, double U1, const ToricSystem& s2,
                                   double U2, const SolverConfig& cfg, double T_tol) {
    IsothermalVerdict v;
    v.first = equilibrium_of_energy(s1, U1, cfg);
    v.second = equilibrium_of_energy(s2, U2, cfg);
    v.overlap_lo = std::max(v.first.T_lo, v.second.T_lo) - T_tol;
    v.overlap_hi = std::min(v.first.T_hi, v.second.T_hi) + T_tol;
    v.isothermal = v.overlap_lo <= v.overlap_hi;
    v.f_additivity_residual = std::numeric_limits<double>::quiet_NaN();
    if (v.isothermal && s1.dim() + s2.dim() <= 3) {
        // a representative common temperature (clamped toward 1 when the
        // overlap is a degenerate all-temperature interval)
        double T = std::min(std::max(1.0, v.overlap_lo), std::max(v.overlap_hi, 0.0));
        T = std::min(T, kTMaxSentinel * 1e-3);
        v.f_additivity_residual = product_canonical_check(s1, s2, T, cfg).f_residual;
    }
    return v;
}

ProductCanonicalResidual product_canonical_check(const ToricSystem& s1, const ToricSystem& s2,
                                                 double T, const SolverConfig& cfg) {
    ProductCanonicalResidual out;
    out.factor1 = canonical_distribution(s1, T, cfg);
    out.factor2 = canonical_distribution(s2, T, cfg);
    ToricSystem prod = product(s1, s2);
    out.composite = canonical_distribution(prod, T, cfg);
    out.f_residual =
        std::abs(out.composite.report.F - out.factor1.report.F - out.factor2.report.F);

    // L1 distance between the composite state and the product of its own
    // marginals, on a tensor quadrature mesh
    QuadMesh m1 = volume_mesh(s1, 6, 2);
    QuadMesh m2 = volume_mesh(s2, 6, 2);
    const int n1 = s1.dim(), n2 = s2.dim();
    const State& u12 = out.composite.u_star;
    std::vector<double> vals(m1.size() * m2.size());
    Vec xy(n1 + n2);
    for (std::size_t i = 0; i < m1.size(); ++i) {
        for (int d = 0; d < n1; ++d) xy(d) = m1.point(i)[d];
        for (std::size_t j = 0; j < m2.size(); ++j) {
            for (int d = 0; d < n2; ++d) xy(n1 + d) = m2.point(j)[d];
            vals[i * m2.size() + j] = u12.density(xy);
        }
    }
    std::vector<double> marg1(m1.size(), 0.0), marg2(m2.size(), 0.0);
    for (std::size_t i = 0; i < m1.size(); ++i)
        for (std::size_t j = 0; j < m2.size(); ++j)
            marg1[i] += m2.weights[j] * vals[i * m2.size() + j];
    for (std::size_t j = 0; j < m2.size(); ++j)
        for (std::size_t i = 0; i < m1.size(); ++i)
            marg2[j] += m1.weights[i] * vals[i * m2.size() + j];
    for (double& v : marg1) v /= s2.volume;
    for (double& v : marg2) v /= s1.volume;
    double dist = 0.0;
    for (std::size_t i = 0; i < m1.size(); ++i)
        for (std::size_t j = 0; j < m2.size(); ++j)
            dist += m1.weights[i] * m2.weights[j] *
                    std::abs(vals[i * m2.size() + j] - marg1[i] * marg2[j]);
    out.l1_marginal_distance = dist;
    return out;
}

HeatBathTable heat_bath_experiment(const ToricSystem& system, const ToricSystem& reservoir,
                                   double U, double T_R, const std::vector<int>& N_list,
                                   const State& u_probe, const SolverConfig& cfg) {
    if (T_R <= 0.0) throw NegativeHeatCapacityError("reservoir temperature must be positive");
    CanonicalCurve curve(system, cfg);
    CanonicalCurve curve_r(reservoir, cfg);

    const double dT = std::min(0.05, 0.25 * T_R);
    double cap = (curve_r.U(T_R + dT) - curve_r.U(T_R - dT)) / (2.0 * dT);
    // positivity must clear the solver noise floor, else the experiment is
    // ill-posed (flat or decreasing reservoir curve)
    if (cap <= cfg.f_tol / dT)
        throw NegativeHeatCapacityError("reservoir heat capacity estimate is not positive");

    HeatBathTable table;
    table.T_R = T_R;
    table.U_probe = internal_energy(system, u_probe, cfg.report_quadrature);
    table.S_probe = entropy(system, u_probe, cfg.report_quadrature);
    double F_probe = table.U_probe - T_R * table.S_probe;
    table.limit = -(curve.F(T_R) - F_probe) / T_R;

    const double U_res = curve_r.U(T_R);
    for (int N : N_list) {
        // monotone root find for the composite energy equation
        auto g = [&](double T) { return curve.U(T) + N * curve_r.U(T) - (U + N * U_res); };
        double lo = 0.0, hi = T_R;
        while (g(hi) < 0.0 && hi < kTMaxSentinel) hi *= 2.0;
        for (int it = 0; it < 60 && hi - lo > 1e-10 * (1.0 + T_R); ++it) {
            double mid = 0.5 * (lo + hi);
            if (g(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        double T_N = 0.5 * (lo + hi);
        double dS = (curve.S(T_N) + N * curve_r.S(T_N)) - (table.S_probe + N * curve_r.S(T_R));
        table.rows.push_back({N, T_N, dS});
    }
    return table;
}

double heat_capacity(const ToricSystem& system, double T, double dT, const SolverConfig& cfg) {
    CanonicalCurve curve(system, cfg);
    return T * (curve.S(T + dT) - curve.S(std::max(T - dT, 0.0))) /
           (dT + std::min(dT, T));
}

}  // namespace muentropy
