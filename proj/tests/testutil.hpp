// Shared helpers for the test suites: independent numerical oracles
// (quadrature, finite differences) kept deliberately separate from the
// library implementations they check.
#ifndef NETGROW_TESTS_TESTUTIL_HPP_
#define NETGROW_TESTS_TESTUTIL_HPP_

#include <cmath>
#include <functional>
#include <vector>

namespace testutil {

// Composite Gauss-Legendre quadrature (5-point rule on uniform panels).
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 400) {
    static const double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                    0.5384693101056831, 0.9061798459386640};
    static const double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                      0.4786286704993665, 0.2369268850561891};
    double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        double mid = a + (p + 0.5) * h;
        for (int i = 0; i < 5; ++i) {
            total += weights[i] * f(mid + 0.5 * h * nodes[i]);
        }
    }
    return total * 0.5 * h;
}

// Central finite difference of a scalar function of one coordinate.
inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_error(double a, double b, double floor = 1e-3) {
    double scale = std::max({std::fabs(a), std::fabs(b), floor});
    return std::fabs(a - b) / scale;
}

}  // namespace testutil

#endif  // NETGROW_TESTS_TESTUTIL_HPP_
