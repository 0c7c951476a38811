#pragma once

// Coordinate transformations shared by the BBOB functions.

#include <span>

#include "metabbo/matrix.hpp"

namespace metabbo::problems::detail {

/// Oscillation transform, elementwise.
double osz(double x);
void osz(std::span<double> x);

/// Asymmetry transform with exponent beta.
void asy(std::span<double> x, double beta);

/// Multiplies by the diagonal conditioning matrix with entries
/// alpha^(0.5 * i / (D - 1)).
void scale_condition(std::span<double> x, double alpha);

/// sum of max(0, |x_i| - 5)^2
double boundary_penalty(std::span<const double> x);

}  // namespace metabbo::problems::detail
