#pragma once

#include <utility>
#include <vector>

#include "muentropy/convex.hpp"
#include "muentropy/quadrature.hpp"

namespace muentropy {

// Normalized log-convex density: log u(x) = logsumexp_k (w_k + q_k(x)).
// Single-term states come from normalize(); mixtures concatenate terms with
// log-weights, so the normalization int u d_mu = int d_mu is preserved
// exactly and log-convexity holds by construction.
class State {
public:
    State() = default;
    explicit State(std::vector<std::pair<double, PiecewiseAffineConvex>> terms)
        : terms_(std::move(terms)) {}

    const std::vector<std::pair<double, PiecewiseAffineConvex>>& terms() const { return terms_; }
    bool single_term() const { return terms_.size() == 1; }
    // q with the normalizer folded in (only for single-term states)
    const PiecewiseAffineConvex& q() const { return terms_[0].second; }
    double log_normalizer() const { return -terms_[0].first; }

    double log_density(const Vec& x) const;
    double density(const Vec& x) const { return std::exp(log_density(x)); }

    // arrangement generators for kink-aware quadrature
    std::vector<PiecewiseAffineConvex> kinks() const {
        std::vector<PiecewiseAffineConvex> out;
        out.reserve(terms_.size());
        for (const auto& [w, q] : terms_) out.push_back(q);
        return out;
    }

private:
    std::vector<std::pair<double, PiecewiseAffineConvex>> terms_;
};

// u(q) = (int d_mu / int e^q d_mu) e^q; gauge-invariant under q -> q + c.
State normalize(const ToricSystem& system, const PiecewiseAffineConvex& q,
                const QuadratureConfig& cfg = {});

// cached mass of the state (should equal the system volume)
double state_mass(const ToricSystem& system, const State& u, const QuadratureConfig& cfg = {});

// pointwise (1-t) u0 + t u1; stays normalized and log-convex
State mixture(const State& u0, const State& u1, double t);

// L1 distance between two states over the system, on a fixed mesh
double l1_distance(const ToricSystem& system, const State& a, const State& b, int order = 6,
                   int refine = 3);

// Supremum of affine minorants of q|_boundary, approximated on a
// deterministic gradient grid against boundary samples. Result >= q on the
// interior up to sampling error and equals q at boundary samples.
PiecewiseAffineConvex tight_envelope(const ToricSystem& system, const PiecewiseAffineConvex& q,
                                     int grid);

struct VertexTruncation {
    PiecewiseAffineConvex q;
    Vec touch0, touch1;  // contact points on the two edges at v
    AffineFn plane;      // the supporting plane through (v, h)
};

// n = 2 only: replace q inside the triangle (v, p0, p1) by the supporting
// plane through (v, h) that touches q along both edges at v. Throws
// SlopeConditionError when no such plane stays below q on P.
VertexTruncation vertex_truncate_ex(const ToricSystem& system, const PiecewiseAffineConvex& q,
                                    const Vec& v, double h);
PiecewiseAffineConvex vertex_truncate(const ToricSystem& system, const PiecewiseAffineConvex& q,
                                      const Vec& v, double h);

}  // namespace muentropy
