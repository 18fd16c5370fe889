#ifndef FAULTCAST_MATH_QUADRATURE_HPP
#define FAULTCAST_MATH_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace faultcast::math {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Nodes/weights via Newton iteration on Legendre polynomials.
const GaussLegendreRule& gauss_legendre(int n);

// Fixed-order Gauss-Legendre integral of f over [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 64);

// Adaptive Simpson on [a, b]; used by the quadrature-based test oracles
// as an implementation-independent route.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-9, int max_depth = 40);

}  // namespace faultcast::math

#endif
