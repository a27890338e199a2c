#pragma once

#include "muentropy/quadrature.hpp"
#include "muentropy/state.hpp"

namespace muentropy {

// lambda = -2*pi*T throughout
inline double lambda_from_temperature(double T) { return -2.0 * M_PI * T; }
inline double temperature_from_lambda(double lambda) { return -lambda / (2.0 * M_PI); }

// log int_P e^{-n} d_mu = -n + log int_P d_mu, the constant in the
// entropy/sigma conversion
inline double log_exp_minus_n_mass(const ToricSystem& system) {
    return -double(system.dim()) + std::log(system.volume);
}

// S(u) = -(1/vol) int u log u d_mu, in [-inf, 0], zero only at u == 1
double entropy(const ToricSystem& system, const State& u, const QuadratureConfig& cfg = {});
// U(u) = (1/vol) int_boundary u d_sigma, in (0, inf]
double internal_energy(const ToricSystem& system, const State& u, const QuadratureConfig& cfg = {});
// F(T, u) = U - T S; +inf when S = -inf
double free_energy(const ToricSystem& system, double T, const State& u,
                   const QuadratureConfig& cfg = {});

// sigma(q) = int (n+q) e^q / int e^q - log int e^q
double sigma_functional(const ToricSystem& system, const PiecewiseAffineConvex& q,
                        const QuadratureConfig& cfg = {});
// na_mu(q) = -2 pi int_bd e^q d_sigma / int e^q d_mu
double na_mu(const ToricSystem& system, const PiecewiseAffineConvex& q,
             const QuadratureConfig& cfg = {});
// na_mu_lambda = na_mu + lambda sigma (or -inf)
double na_mu_lambda(const ToricSystem& system, double lambda, const PiecewiseAffineConvex& q,
                    const QuadratureConfig& cfg = {});

// Futaki invariant of q at weight <xi> and slope parameter lambda; linear in
// q, vanishing on constants.
double futaki(const ToricSystem& system, double lambda, const Vec& xi,
              const PiecewiseAffineConvex& q, const QuadratureConfig& cfg = {});
// Same first-variation functional with a general PA base Q in place of <xi>:
// d/dt na_mu_lambda(Q + t q) |_0 = -futaki_at(Q, q).
double futaki_at(const ToricSystem& system, double lambda, const PiecewiseAffineConvex& base,
                 const PiecewiseAffineConvex& q, const QuadratureConfig& cfg = {});
// Futaki on a general integrable field (lambda = 0 path used by the
// exponential identity check); kinks pre-split the quadrature cells.
double futaki_general(const ToricSystem& system, double lambda, const Vec& xi,
                      const ScalarField& f, std::span<const PiecewiseAffineConvex> kinks = {},
                      const QuadratureConfig& cfg = {});
// na_mu_lambda evaluated on a general field (finite-difference checks probe
// non-convex directions t < 0 through this).
double na_mu_lambda_field(const ToricSystem& system, double lambda, const ScalarField& q,
                          std::span<const PiecewiseAffineConvex> kinks = {},
                          const QuadratureConfig& cfg = {});
// mean weighted scalar term s_bar (exact divided-difference quadrature)
double s_bar(const ToricSystem& system, double lambda, const Vec& xi);

// DF(q) = Fut^lambda_0(q), independent of lambda
double donaldson_futaki(const ToricSystem& system, const PiecewiseAffineConvex& q,
                        const QuadratureConfig& cfg = {});

// | Fut_xi(e^{q-<xi>}) - (A_q/A_xi)(na_mu(<xi>) - na_mu(q)) |
double fut_exp_identity_residual(const ToricSystem& system, const Vec& xi,
                                 const PiecewiseAffineConvex& q, const QuadratureConfig& cfg = {});

// One row of functional values for a PA function at temperature T.
struct FunctionalReport {
    double T = 0.0;
    double lambda = 0.0;
    double S = 0.0;
    double U = 0.0;
    double F = 0.0;
    double na_mu = 0.0;
    double sigma = 0.0;
    double na_mu_lambda = 0.0;
};

FunctionalReport functional_report(const ToricSystem& system, double T,
                                   const PiecewiseAffineConvex& q,
                                   const QuadratureConfig& cfg = {});

}  // namespace muentropy
