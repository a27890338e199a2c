#pragma once

#include <functional>
#include <span>
#include <vector>

#include "muentropy/convex.hpp"
#include "muentropy/geometry.hpp"

namespace muentropy {

// Exact affine-exponent integration lives in the strongly typed
// integrate_*_exp_affine entry points below; this config drives the numeric
// path only.
struct QuadratureConfig {
    int order = 8;        // 1-D Gauss points per axis of the collapsed rule
    int max_subdiv = 12;  // adaptive bisection depth
    double rel_tol = 1e-10;
};

using ScalarField = std::function<double(const Vec&)>;

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Adaptive integral of f against d_mu (interior) or d_sigma (boundary).
// Subdivides by longest-edge bisection until the local error estimate meets
// rel_tol or max_subdiv is reached. Throws NonFiniteError if f stays
// non-finite on nodes at the subdivision limit.
QuadResult integrate_volume_ex(const ToricSystem& system, const ScalarField& f,
                               const QuadratureConfig& cfg = {});
QuadResult integrate_boundary_ex(const ToricSystem& system, const ScalarField& f,
                                 const QuadratureConfig& cfg = {});
double integrate_volume(const ToricSystem& system, const ScalarField& f,
                        const QuadratureConfig& cfg = {});
double integrate_boundary(const ToricSystem& system, const ScalarField& f,
                          const QuadratureConfig& cfg = {});

// Same-dimension pieces of a simplex cut by extra halfspaces (chart + vertex
// enumeration); empty when the cut region is lower-dimensional.
std::vector<Simplex> clip_simplex_by_halfspaces(const Simplex& s,
                                                const std::vector<HalfSpace>& cuts);

// Partition cells along the active-piece arrangement of q, so integrands
// built from q are analytic on every returned cell.
std::vector<Simplex> split_by_active_pieces(const std::vector<Simplex>& cells,
                                            const PiecewiseAffineConvex& q);

// Kink-aware integrals: cells are pre-split along the arrangements of every
// function in `kinks`, after which adaptive refinement sees smooth data.
QuadResult integrate_volume_ex(const ToricSystem& system, const ScalarField& f,
                               std::span<const PiecewiseAffineConvex> kinks,
                               const QuadratureConfig& cfg);
QuadResult integrate_boundary_ex(const ToricSystem& system, const ScalarField& f,
                                 std::span<const PiecewiseAffineConvex> kinks,
                                 const QuadratureConfig& cfg);
double integrate_volume(const ToricSystem& system, const ScalarField& f,
                        std::span<const PiecewiseAffineConvex> kinks,
                        const QuadratureConfig& cfg = {});
double integrate_boundary(const ToricSystem& system, const ScalarField& f,
                          std::span<const PiecewiseAffineConvex> kinks,
                          const QuadratureConfig& cfg = {});

// Divided difference of exp over the given nodes (repeats allowed). Series
// evaluation when the node spread is small, recurrence otherwise.
double exp_divided_difference(std::span<const double> nodes);

// Exact integral of e^l over a k-simplex: k! * vol * exp[l(v_0),...,l(v_k)].
double exact_exp_affine_simplex(const Simplex& simplex, const AffineFn& l);
// Exact integral of a * e^l (a affine): adds one doubled node per corner.
double exact_affine_exp_affine_simplex(const Simplex& simplex, const AffineFn& a,
                                       const AffineFn& l);
// Exact integral of a * b * e^l (a, b affine): two doubled nodes.
double exact_quadratic_exp_affine_simplex(const Simplex& simplex, const AffineFn& a,
                                          const AffineFn& b, const AffineFn& l);

// System-level exact integrals of (affine polynomial) x e^{affine}.
double integrate_volume_exp_affine(const ToricSystem& system, const AffineFn& l);
double integrate_boundary_exp_affine(const ToricSystem& system, const AffineFn& l);
double integrate_volume_affine_exp(const ToricSystem& system, const AffineFn& a,
                                   const AffineFn& l);
double integrate_boundary_affine_exp(const ToricSystem& system, const AffineFn& a,
                                     const AffineFn& l);
double integrate_volume_quadratic_exp(const ToricSystem& system, const AffineFn& a,
                                      const AffineFn& b, const AffineFn& l);

// Fixed node/weight set for repeated integrals of smooth surrogates during
// optimization: every cell of the triangulation is bisected `refine` times
// and carries a collapsed Gauss rule of the given order. Points are stored
// flat (dim-major per node).
struct QuadMesh {
    int dim = 0;
    std::vector<double> points;   // size() * dim
    std::vector<double> weights;  // includes measure densities

    std::size_t size() const { return weights.size(); }
    const double* point(std::size_t i) const { return points.data() + i * dim; }

    double integrate(const ScalarField& f) const;
};

QuadMesh volume_mesh(const ToricSystem& system, int order, int refine);
QuadMesh boundary_mesh(const ToricSystem& system, int order, int refine);

// Gauss-Legendre nodes/weights on [0, 1] (cached per order).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_01(int order);

}  // namespace muentropy
