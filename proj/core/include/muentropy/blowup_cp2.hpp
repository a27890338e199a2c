#pragma once

#include "muentropy/geometry.hpp"

namespace muentropy {

// Worked example: the anticanonical system of the one-point blow-up of CP^2.
// Its moment polytope is the quadrilateral with vertices (0,-1), (2,-1),
// (-1,2), (-1,0); eta = (1,1) spans the symmetry diagonal.

ToricSystem blowup_cp2_system();
Vec blowup_cp2_eta();

// Reference closed forms for the x<eta> family (series near x = 0 where the
// rational expressions are 0/0):
//   volume_integral(x)   = int_P e^{x<eta>} d_mu
//   boundary_integral(x) = int_bd e^{x<eta>} d_sigma
//   weighted_integral(x) = int_P x<eta> e^{x<eta>} d_mu
double blowup_cp2_volume_integral(double x);
double blowup_cp2_boundary_integral(double x);
double blowup_cp2_weighted_integral(double x);

// na_mu(x<eta>) and sigma(x<eta>) assembled from the closed forms
double blowup_cp2_na_mu(double x);
double blowup_cp2_sigma(double x);
double blowup_cp2_na_mu_lambda(double x, double lambda);

// lambda(x): the slope parameter for which x<eta> is critical along the
// diagonal, from Fut^lambda_{x eta}(<eta>) = 0 (affine in lambda, so a ratio
// of two quadratures).
double blowup_cp2_lambda_of_x(double x);

// 1-D golden-section maximizer of na_mu_lambda(x<eta>) over a bracket; the
// independent oracle for the vector solver.
double blowup_cp2_optimal_x(double lambda, double lo = -3.0, double hi = 0.5,
                            double tol = 1e-12);

}  // namespace muentropy
