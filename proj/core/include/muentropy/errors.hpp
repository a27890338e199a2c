#pragma once

#include <stdexcept>
#include <string>

namespace muentropy {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Geometry: halfspace intersection is empty, lower-dimensional, or unbounded.
struct EmptyOrUnboundedError : Error { using Error::Error; };
// Geometry: facet contact set has affine dimension below n-1.
struct DegenerateError : Error { using Error::Error; };
// Lattice normalization: a facet normal has no small rational multiple.
struct IrrationalNormalError : Error { using Error::Error; };
// Quadrature: integrand evaluated to NaN/inf after the subdivision limit.
struct NonFiniteError : Error { using Error::Error; };
// Vertex truncation: no supporting plane through (v, h) stays below q.
struct SlopeConditionError : Error { using Error::Error; };
// Estimates: query point lies on (or within tol of) the boundary.
struct BoundaryPointError : Error { using Error::Error; };
// Thermo: energy target outside the reachable canonical range.
struct OutOfRangeError : Error { using Error::Error; };
// Heat bath: reservoir has non-positive estimated heat capacity at T_R.
struct NegativeHeatCapacityError : Error { using Error::Error; };

}  // namespace muentropy
