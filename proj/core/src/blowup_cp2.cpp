#include "muentropy/blowup_cp2.hpp"

#include <cmath>

#include "muentropy/functionals.hpp"
#include "muentropy/quadrature.hpp"

namespace muentropy {

ToricSystem blowup_cp2_system() {
    auto hs = [](double a, double b, double c) {
        Vec n(2);
        n << a, b;
        return HalfSpace{n, c};
    };
    Polytope p = Polytope::from_halfspaces(
        {hs(0, 1, 1), hs(-1, -1, 1), hs(1, 0, 1), hs(1, 1, 1)});
    return lattice_system(p);
}

Vec blowup_cp2_eta() {
    Vec eta(2);
    eta << 1.0, 1.0;
    return eta;
}

namespace {

constexpr double kSeriesCut = 0.25;
constexpr int kTerms = 26;

// coefficients of p(x) e^{s x} as a truncated power series
void poly_times_exp(const double* poly, int deg, double s, double* out) {
    double expc[kTerms + 1];
    expc[0] = 1.0;
    for (int k = 1; k <= kTerms; ++k) expc[k] = expc[k - 1] * s / k;
    for (int k = 0; k <= kTerms; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= deg && j <= k; ++j) acc += poly[j] * expc[k - j];
        out[k] = acc;
    }
}

double series_eval(const double* coeff, int from, double x) {
    // sum_{k >= from} coeff[k] x^{k-from}
    double acc = 0.0;
    for (int k = kTerms; k >= from; --k) acc = acc * x + coeff[k];
    return acc;
}

}  // namespace

double blowup_cp2_volume_integral(double x) {
    if (std::abs(x) > kSeriesCut)
        return ((-x + 1.0) * std::exp(-x) + (3.0 * x - 1.0) * std::exp(x)) / (x * x);
    // ((1-x)e^{-x} + (3x-1)e^{x}) / x^2, removable at 0
    double a[kTerms + 1], b[kTerms + 1];
    const double p1[2] = {1.0, -1.0};
    const double p2[2] = {-1.0, 3.0};
    poly_times_exp(p1, 1, -1.0, a);
    poly_times_exp(p2, 1, 1.0, b);
    for (int k = 0; k <= kTerms; ++k) a[k] += b[k];
    return series_eval(a, 2, x);
}

double blowup_cp2_boundary_integral(double x) {
    if (std::abs(x) > kSeriesCut)
        return -((2.0 - x) * std::exp(-x) - (3.0 * x + 2.0) * std::exp(x)) / x;
    double a[kTerms + 1], b[kTerms + 1];
    const double p1[2] = {2.0, -1.0};
    const double p2[2] = {2.0, 3.0};
    poly_times_exp(p1, 1, -1.0, a);
    poly_times_exp(p2, 1, 1.0, b);
    for (int k = 0; k <= kTerms; ++k) a[k] = -(a[k] - b[k]);
    return series_eval(a, 1, x);
}

double blowup_cp2_weighted_integral(double x) {
    if (std::abs(x) > kSeriesCut)
        return ((x * x - 2.0) * std::exp(-x) + (3.0 * x * x - 4.0 * x + 2.0) * std::exp(x)) /
               (x * x);
    double a[kTerms + 1], b[kTerms + 1];
    const double p1[3] = {-2.0, 0.0, 1.0};
    const double p2[3] = {2.0, -4.0, 3.0};
    poly_times_exp(p1, 2, -1.0, a);
    poly_times_exp(p2, 2, 1.0, b);
    for (int k = 0; k <= kTerms; ++k) a[k] += b[k];
    return series_eval(a, 2, x);
}

double blowup_cp2_na_mu(double x) {
    return -2.0 * M_PI * blowup_cp2_boundary_integral(x) / blowup_cp2_volume_integral(x);
}

double blowup_cp2_sigma(double x) {
    double A = blowup_cp2_volume_integral(x);
    return 2.0 + blowup_cp2_weighted_integral(x) / A - std::log(A);
}

double blowup_cp2_na_mu_lambda(double x, double lambda) {
    return blowup_cp2_na_mu(x) + lambda * blowup_cp2_sigma(x);
}

double blowup_cp2_lambda_of_x(double x) {
    // Fut^lambda_{x eta}(<eta>) = a - lambda b with exact moments
    ToricSystem sys = blowup_cp2_system();
    Vec eta = blowup_cp2_eta();
    AffineFn l{x * eta, 0.0};
    AffineFn le{eta, 0.0};
    double A = integrate_volume_exp_affine(sys, l);
    double B = integrate_boundary_exp_affine(sys, l);
    double Pb = integrate_boundary_affine_exp(sys, le, l);
    double P1 = integrate_volume_affine_exp(sys, le, l);
    double W = integrate_volume_affine_exp(sys, l, l);
    double R = integrate_volume_quadratic_exp(sys, le, l, l);
    double a = 2.0 * M_PI * (Pb / A - (B / A) * (P1 / A));
    double b = R / A - (W / A) * (P1 / A);
    return a / b;
}

double blowup_cp2_optimal_x(double lambda, double lo, double hi, double tol) {
    // coarse bracket scan, then golden section
    auto f = [&](double x) { return blowup_cp2_na_mu_lambda(x, lambda); };
    const int scan = 200;
    double best = lo, bval = f(lo);
    for (int i = 1; i <= scan; ++i) {
        double x = lo + (hi - lo) * i / scan;
        double v = f(x);
        if (v > bval) {
            bval = v;
            best = x;
        }
    }
    double a = std::max(lo, best - (hi - lo) / scan);
    double b = std::min(hi, best + (hi - lo) / scan);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (b - a > tol) {
        if (f(c) > f(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace muentropy
