#pragma once

#include <vector>

#include "muentropy/geometry.hpp"
#include "muentropy/rng.hpp"

namespace muentropy {

struct AffineFn {
    Vec gradient;
    double constant = 0.0;

    double operator()(const Vec& x) const { return gradient.dot(x) + constant; }
};

// q(x) = max_i l_i(x), the working representation of candidate optimizers
// and test configurations. Convex by construction.
class PiecewiseAffineConvex {
public:
    PiecewiseAffineConvex() = default;
    explicit PiecewiseAffineConvex(std::vector<AffineFn> pieces) : pieces_(std::move(pieces)) {}

    const std::vector<AffineFn>& pieces() const { return pieces_; }
    int dim() const { return pieces_.empty() ? 0 : int(pieces_[0].gradient.size()); }
    bool empty() const { return pieces_.empty(); }

    double operator()(const Vec& x) const;
    int active_piece(const Vec& x) const;

    PiecewiseAffineConvex shifted(double c) const;  // q + c
    // max(q, other's pieces)
    PiecewiseAffineConvex merged_with(const PiecewiseAffineConvex& other) const;
    // drop pieces that are nowhere active on P (within tol)
    PiecewiseAffineConvex pruned(const Polytope& P, double tol = 1e-12) const;

private:
    std::vector<AffineFn> pieces_;
};

// q(x) = <xi, x>
PiecewiseAffineConvex linear_from_vector(const Vec& xi);

// Smooth surrogate (1/beta) log sum_i exp(beta l_i); converges to the base
// from above, within (log m)/beta, and stays convex (log-sum-exp of affines).
struct SmoothedConvex {
    PiecewiseAffineConvex base;
    double sharpness = 1.0;

    double operator()(const Vec& x) const;
};

// Exact minimum of a PA convex function over P, via vertex enumeration of
// the lifted polytope { (x,t) : x in P, l_i(x) <= t <= cap }.
double pa_min_over(const Polytope& P, const PiecewiseAffineConvex& q);

// Convexity certificate by random midpoint sampling: max over trials of
// q((x+y)/2) - (q(x)+q(y))/2 (should be <= 0 up to roundoff).
double midpoint_convexity_defect(const PiecewiseAffineConvex& q, const Polytope& P, Rng& rng,
                                 int trials);

// Nonnegative random PA convex function: piece count uniform in {1..8},
// gradients N(0, 3^2), constants shifted so the exact minimum over P is 0.
PiecewiseAffineConvex random_nonneg_convex(const Polytope& P, Rng& rng);

// Uniform sample from P by rejection inside the bounding box.
Vec sample_point(const Polytope& P, Rng& rng);

}  // namespace muentropy
