#ifndef MSH_QUADRATURE_HPP
#define MSH_QUADRATURE_HPP

#include <cmath>
#include <functional>

#include "msh/errors.hpp"

namespace msh {

/// Adaptive Simpson on [a,b]. Recursion splits until the local Richardson
/// estimate meets tol; depth capped so a pathological integrand terminates.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-12, int max_depth = 40);

/// Adaptive Simpson bootstrapped on `panels` equal panels. Oscillatory
/// integrands sampled at points commensurate with their period can fool the
/// whole-interval convergence estimate; panelizing below the oscillation
/// length removes that failure mode.
double integrate_adaptive_panels(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12, int panels = 64);

/// Composite midpoint with n panels (spectrally accurate for smooth periodic
/// integrands over a full period).
double integrate_midpoint(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace msh

#endif
