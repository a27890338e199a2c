#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "muentropy/errors.hpp"

namespace muentropy {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Closed halfspace { x : normal.x + offset >= 0 }.
struct HalfSpace {
    Vec normal;
    double offset = 0.0;

    double value(const Vec& x) const { return normal.dot(x) + offset; }
};

// k-simplex embedded in R^n. Columns of `vertices` are the k+1 corners,
// `measure` is the Euclidean k-volume (1 for a point).
struct Simplex {
    Mat vertices;
    double measure = 0.0;

    int dim() const { return int(vertices.cols()) - 1; }
    int ambient_dim() const { return int(vertices.rows()); }
    Vec barycenter() const { return vertices.rowwise().mean(); }
};

double simplex_measure(const Mat& vertices);

struct Facet {
    int halfspace = -1;
    std::vector<int> vertex_ids;
};

// Compact convex polytope with nonempty interior, kept in mutually consistent
// H- and V-representation. Immutable after construction.
class Polytope {
public:
    Polytope() = default;  // empty; fill via from_halfspaces

    // Enumerates vertices from all n-subsets of facet hyperplanes, drops
    // redundant halfspaces, and attaches vertex sets to the remaining facets.
    // On-hyperplane tests use absolute tolerance `tol`.
    static Polytope from_halfspaces(std::vector<HalfSpace> halfspaces, double tol = 1e-9);

    int dim() const { return dim_; }
    const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }
    const std::vector<Facet>& facets() const { return facets_; }
    int vertex_count() const { return int(vertices_.cols()); }
    Vec vertex(int i) const { return vertices_.col(i); }
    const Mat& vertices() const { return vertices_; }
    double tol() const { return tol_; }

    bool contains(const Vec& x, double tol = 1e-9) const;
    // Distance-like slack: min_i l_i(x); positive strictly inside.
    double inradius_at(const Vec& x) const;
    Vec centroid() const;  // vertex barycenter, an interior point
    double diameter() const;

    // Every vertex on exactly n facets.
    bool is_simple() const;

    // Interior partition into nondegenerate n-simplices. Cones over the
    // boundary triangulation unless the polytope is itself a simplex.
    std::vector<Simplex> triangulate() const;
    // (facet index, (n-1)-simplex) pairs partitioning the boundary,
    // consistent with the interior fan.
    std::vector<std::pair<int, Simplex>> boundary_triangulation() const;

    friend Polytope product(const Polytope& a, const Polytope& b);

private:
    std::vector<Simplex> triangulate_face(const std::vector<int>& vertex_ids, int face_dim) const;

    int dim_ = 0;
    double tol_ = 1e-9;
    std::vector<HalfSpace> halfspaces_;
    std::vector<Facet> facets_;
    Mat vertices_;  // n x V
};

Polytope product(const Polytope& a, const Polytope& b);

// System (P, d_mu, d_sigma): flat interior measure `interior_density` times
// Lebesgue, and per-facet boundary densities relative to Euclidean surface
// measure. Triangulations are cached at construction and shared.
struct ToricSystem {
    Polytope polytope;
    double interior_density = 1.0;
    std::vector<double> facet_densities;

    // caches
    std::vector<Simplex> interior_simplices;
    std::vector<std::pair<int, Simplex>> boundary_simplices;
    double volume = 0.0;            // integral of d_mu
    double boundary_measure = 0.0;  // integral of d_sigma

    int dim() const { return polytope.dim(); }
};

ToricSystem make_system(Polytope polytope, double interior_density,
                        std::vector<double> facet_densities);

// Lattice normalization: interior density 1, facet density 1/|a|_2 for the
// primitive integer normal a, recovered by continued-fraction rounding with
// denominator bound 1e6. The tolerance separates exact rationals (machine
// precision) from quadratic irrationals, whose best convergents under the
// bound stay above ~6e-13. Throws IrrationalNormalError.
ToricSystem lattice_system(const Polytope& polytope, double tol = 3e-13);

// (vol, bdry) totals of the two measures.
std::pair<double, double> total_measures(const ToricSystem& system);

// Composite system: product polytope, product interior measure, boxplus
// boundary measure d_sigma_1 x d_mu_2 + d_mu_1 x d_sigma_2.
ToricSystem product(const ToricSystem& a, const ToricSystem& b);

// Volume of P cut by one extra halfspace (used by the delta_P estimate).
// Returns 0 when the cut region is empty or lower-dimensional.
double clipped_volume(const ToricSystem& system, const HalfSpace& cut);

}  // namespace muentropy
