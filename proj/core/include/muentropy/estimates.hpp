#pragma once

#include <cstdint>
#include <vector>

#include "muentropy/convex.hpp"
#include "muentropy/geometry.hpp"

namespace muentropy {

// min over a deterministic direction grid of vol(P cut by a hyperplane
// through x); positive on the interior, -> 0 toward the boundary. Throws
// BoundaryPointError within tol of the boundary.
double delta_p(const ToricSystem& system, const Vec& x, int directions = 64,
               double boundary_tol = 1e-9);

// (u(x), int u d_mu / delta_P(x)); the contract is lhs <= rhs.
std::pair<double, double> mean_value_check(const ToricSystem& system,
                                           const PiecewiseAffineConvex& u, const Vec& x,
                                           int directions = 64);

struct EstimateProbe {
    int samples = 0;
    double sup_ratio = 0.0;
    PiecewiseAffineConvex witness;
    std::vector<double> ratios;
};

// sup over random nonnegative PA convex u of ||u||_{L^exponent} / int_bd u,
// an empirical lower bound for the Poincare constant C_{P,q}.
EstimateProbe poincare_probe(const ToricSystem& system, double exponent, int trials,
                             std::uint64_t seed);

// Empirical majorant U(x) = max over sampled u of u(x)/int_bd u d_sigma at
// each query point; the samples mix the seeded random family with vertex
// spike functions at several scales.
std::vector<double> rellich_majorant_probe(const ToricSystem& system,
                                           const std::vector<Vec>& points, int fn_samples,
                                           std::uint64_t seed);

// max_k log C: per-sample implied entropy-bound constants
// exp((int u log u)/n) / int_bd u for normalized u; the theorem bounds them
// by C_{P, n/(n-1)}.
struct EntropyBoundSample {
    double lhs = 0.0;            // int u log u d_mu for the normalized sample
    double jensen_rhs = 0.0;     // n log ||u||_{n/(n-1)}
    double boundary_mass = 0.0;  // int_bd u d_sigma
};
EntropyBoundSample entropy_bound_sample(const ToricSystem& system,
                                        const PiecewiseAffineConvex& u);

}  // namespace muentropy
