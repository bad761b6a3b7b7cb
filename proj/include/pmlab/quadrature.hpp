#ifndef PMLAB_QUADRATURE_HPP
#define PMLAB_QUADRATURE_HPP

#include <functional>

namespace pmlab {

// Adaptive Simpson on [a,b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// Fixed 16-point Gauss-Legendre, composite over npanels panels.  Used as the
// second, independent rule when two quadrature routes are compared.
double gauss_panels(const std::function<double(double)>& f, double a, double b,
                    int npanels);

}  // namespace pmlab

#endif
