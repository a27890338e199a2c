#include "muentropy/functionals.hpp"

#include <cmath>
#include <limits>

namespace muentropy {

namespace {

double vertex_max(const Polytope& P, const PiecewiseAffineConvex& q) {
    double m = -std::numeric_limits<double>::infinity();
    for (int v = 0; v < P.vertex_count(); ++v) m = std::max(m, q(P.vertex(v)));
    return m;
}

// t*e^t with the t -> -inf limit pinned to 0
double xlogx_of_log(double t) {
    if (t < -690.0) return 0.0;  // e^t below 1e-300
    return t * std::exp(t);
}

}  // namespace

double entropy(const ToricSystem& system, const State& u, const QuadratureConfig& cfg) {
    auto kinks = u.kinks();
    double val = integrate_volume(
        system, [&](const Vec& x) { return xlogx_of_log(u.log_density(x)); }, kinks, cfg);
    return -val / system.volume;
}

double internal_energy(const ToricSystem& system, const State& u, const QuadratureConfig& cfg) {
    auto kinks = u.kinks();
    double val = integrate_boundary(
        system, [&](const Vec& x) { return u.density(x); }, kinks, cfg);
    return val / system.volume;
}

double free_energy(const ToricSystem& system, double T, const State& u,
                   const QuadratureConfig& cfg) {
    double S = entropy(system, u, cfg);
    if (!std::isfinite(S)) return std::numeric_limits<double>::infinity();
    return internal_energy(system, u, cfg) - T * S;
}

namespace {

struct ExpMoments {
    double shift = 0.0;  // all integrals carry weight e^{q - shift}
    double mass = 0.0;   // int e^{q-shift} d_mu
    double bdry = 0.0;   // int_bd e^{q-shift} d_sigma
    double qmom = 0.0;   // int (q-shift) e^{q-shift} d_mu
};

ExpMoments exp_moments(const ToricSystem& system, const PiecewiseAffineConvex& q,
                       const QuadratureConfig& cfg) {
    ExpMoments m;
    m.shift = vertex_max(system.polytope, q);
    std::vector<PiecewiseAffineConvex> kinks{q};
    m.mass = integrate_volume(
        system, [&](const Vec& x) { return std::exp(q(x) - m.shift); }, kinks, cfg);
    m.bdry = integrate_boundary(
        system, [&](const Vec& x) { return std::exp(q(x) - m.shift); }, kinks, cfg);
    m.qmom = integrate_volume(
        system, [&](const Vec& x) { return xlogx_of_log(q(x) - m.shift); }, kinks, cfg);
    return m;
}

}  // namespace

double sigma_functional(const ToricSystem& system, const PiecewiseAffineConvex& q,
                        const QuadratureConfig& cfg) {
    ExpMoments m = exp_moments(system, q, cfg);
    // sigma(q) = n + int q e^q/int e^q - log int e^q, shift-invariant form
    return double(system.dim()) + m.qmom / m.mass - std::log(m.mass);
}

double na_mu(const ToricSystem& system, const PiecewiseAffineConvex& q,
             const QuadratureConfig& cfg) {
    ExpMoments m = exp_moments(system, q, cfg);
    return -2.0 * M_PI * m.bdry / m.mass;
}

double na_mu_lambda(const ToricSystem& system, double lambda, const PiecewiseAffineConvex& q,
                    const QuadratureConfig& cfg) {
    if (lambda == 0.0) return na_mu(system, q, cfg);
    double s = sigma_functional(system, q, cfg);
    if (!std::isfinite(s)) return -std::numeric_limits<double>::infinity();
    return na_mu(system, q, cfg) + lambda * s;
}

double futaki_at(const ToricSystem& system, double lambda, const PiecewiseAffineConvex& base,
                 const PiecewiseAffineConvex& q, const QuadratureConfig& cfg) {
    // shift the base; the invariant is gauge-independent
    double M = vertex_max(system.polytope, base);
    std::vector<PiecewiseAffineConvex> kinks{base, q};
    auto wq = [&](const Vec& x) { return std::exp(base(x) - M); };
    double A = integrate_volume(system, wq, kinks, cfg);
    double B = integrate_boundary(system, wq, kinks, cfg);
    double P1 = integrate_volume(
        system, [&](const Vec& x) { return q(x) * wq(x); }, kinks, cfg);
    double Pb = integrate_boundary(
        system, [&](const Vec& x) { return q(x) * wq(x); }, kinks, cfg);
    double W = integrate_volume(
        system, [&](const Vec& x) { return (base(x) - M) * wq(x); }, kinks, cfg);
    double R = integrate_volume(
        system, [&](const Vec& x) { return q(x) * (base(x) - M) * wq(x); }, kinks, cfg);
    double sbar = (2.0 * M_PI * B - lambda * W) / A;
    return (2.0 * M_PI * Pb - lambda * R) / A - sbar * P1 / A;
}

double futaki(const ToricSystem& system, double lambda, const Vec& xi,
              const PiecewiseAffineConvex& q, const QuadratureConfig& cfg) {
    return futaki_at(system, lambda, linear_from_vector(xi), q, cfg);
}

double s_bar(const ToricSystem& system, double lambda, const Vec& xi) {
    AffineFn l{xi, 0.0};
    double A = integrate_volume_exp_affine(system, l);
    double B = integrate_boundary_exp_affine(system, l);
    double W = integrate_volume_affine_exp(system, l, l);
    return (2.0 * M_PI * B - lambda * W) / A;
}

double futaki_general(const ToricSystem& system, double lambda, const Vec& xi,
                      const ScalarField& f, std::span<const PiecewiseAffineConvex> kinks,
                      const QuadratureConfig& cfg) {
    auto w = [&](const Vec& x) { return std::exp(xi.dot(x)); };
    double A = integrate_volume(system, w, kinks, cfg);
    double B = integrate_boundary(system, w, kinks, cfg);
    double P1 = integrate_volume(
        system, [&](const Vec& x) { return f(x) * w(x); }, kinks, cfg);
    double Pb = integrate_boundary(
        system, [&](const Vec& x) { return f(x) * w(x); }, kinks, cfg);
    double W = integrate_volume(
        system, [&](const Vec& x) { return xi.dot(x) * w(x); }, kinks, cfg);
    double R = integrate_volume(
        system, [&](const Vec& x) { return f(x) * xi.dot(x) * w(x); }, kinks, cfg);
    double sbar = (2.0 * M_PI * B - lambda * W) / A;
    return (2.0 * M_PI * Pb - lambda * R) / A - sbar * P1 / A;
}

double na_mu_lambda_field(const ToricSystem& system, double lambda, const ScalarField& q,
                          std::span<const PiecewiseAffineConvex> kinks,
                          const QuadratureConfig& cfg) {
    double A = integrate_volume(
        system, [&](const Vec& x) { return std::exp(q(x)); }, kinks, cfg);
    double B = integrate_boundary(
        system, [&](const Vec& x) { return std::exp(q(x)); }, kinks, cfg);
    double result = -2.0 * M_PI * B / A;
    if (lambda != 0.0) {
        double N = integrate_volume(
            system, [&](const Vec& x) { return (system.dim() + q(x)) * std::exp(q(x)); }, kinks,
            cfg);
        result += lambda * (N / A - std::log(A));
    }
    return result;
}

double donaldson_futaki(const ToricSystem& system, const PiecewiseAffineConvex& q,
                        const QuadratureConfig& cfg) {
    std::vector<PiecewiseAffineConvex> kinks{q};
    double qb = integrate_boundary(system, [&](const Vec& x) { return q(x); }, kinks, cfg);
    double qv = integrate_volume(system, [&](const Vec& x) { return q(x); }, kinks, cfg);
    return (2.0 * M_PI / system.volume) *
           (qb - system.boundary_measure / system.volume * qv);
}

double fut_exp_identity_residual(const ToricSystem& system, const Vec& xi,
                                 const PiecewiseAffineConvex& q, const QuadratureConfig& cfg) {
    // both sides are linear in e^q, so evaluate them in the shifted gauge
    // q - M and scale back once
    double M = vertex_max(system.polytope, q);
    std::vector<PiecewiseAffineConvex> kinks{q};
    auto eq = [&](const Vec& x) { return std::exp(q(x) - M); };
    double Aq = integrate_volume(system, eq, kinks, cfg);
    AffineFn lxi{xi, 0.0};
    double Axi = integrate_volume_exp_affine(system, lxi);
    double lhs = futaki_general(
        system, 0.0, xi, [&](const Vec& x) { return std::exp(q(x) - M - xi.dot(x)); }, kinks, cfg);
    double rhs = (Aq / Axi) * (na_mu(system, linear_from_vector(xi), cfg) - na_mu(system, q, cfg));
    return std::abs(lhs - rhs) * std::exp(M);
}

FunctionalReport functional_report(const ToricSystem& system, double T,
                                   const PiecewiseAffineConvex& q,
                                   const QuadratureConfig& cfg) {
    ExpMoments m = exp_moments(system, q, cfg);
    FunctionalReport r;
    r.T = T;
    r.lambda = lambda_from_temperature(T);
    r.U = m.bdry / m.mass;
    // S(u(q)) = -int q e^q/int e^q - log(vol/int e^q), in shifted form
    r.S = -(m.qmom / m.mass) - std::log(system.volume) + std::log(m.mass);
    r.F = std::isfinite(r.S) ? r.U - T * r.S : std::numeric_limits<double>::infinity();
    r.na_mu = -2.0 * M_PI * r.U;
    r.sigma = -r.S - log_exp_minus_n_mass(system);
    r.na_mu_lambda = std::isfinite(r.sigma)
                         ? r.na_mu + r.lambda * r.sigma
                         : -std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace muentropy
