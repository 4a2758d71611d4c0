#pragma once

// Thin adaptive-quadrature wrappers (GSL workspaces behind std::function).
// All routines throw std::runtime_error when the integrator reports failure
// other than a benign roundoff warning.

#include <functional>
#include <utility>
#include <vector>

namespace fieldsim {

using RealFn = std::function<double(double)>;

double integrate_finite(const RealFn& f, double a, double b,
                        double epsabs = 0.0, double epsrel = 1e-10);

double integrate_upper_infinite(const RealFn& f, double a,
                                double epsabs = 0.0, double epsrel = 1e-10);

double integrate_real_line(const RealFn& f, double epsabs = 0.0,
                           double epsrel = 1e-10);

// Like integrate_finite but with interior break points (singular or
// non-smooth abscissae).
double integrate_with_breaks(const RealFn& f, std::vector<double> points,
                             double epsabs = 0.0, double epsrel = 1e-10);

// Fixed-order Gauss-Legendre nodes/weights on [a, b].
std::vector<std::pair<double, double>> gauss_legendre(int order, double a,
                                                      double b);

}  // namespace fieldsim
