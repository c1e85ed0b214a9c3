// quadrature.hpp
//
// Gauss-Jacobi rules for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1],
// built from the orthonormal three-term recurrence. Small rules come from the
// Jacobi matrix eigenvalues (Golub-Welsch), large ones from Newton iteration on
// asymptotic initial guesses. Weights are Christoffel numbers 1 / sum p_j(x)^2.
#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace speclab {

struct QuadratureRule {
    // nodes strictly decreasing (theta = acos(x) increasing)
    std::vector<double> nodes;
    std::vector<double> weights;
    double alpha = 0.0;
    double beta = 0.0;

    std::size_t size() const { return nodes.size(); }
    // polynomials of this degree or lower are integrated exactly
    int degree() const { return 2 * static_cast<int>(nodes.size()) - 1; }
};

// Total mass 2^{a+b+1} B(a+1, b+1).
long double jacobi_mass(double alpha, double beta);

// Recurrence coefficients of the orthonormal Jacobi polynomials:
// x p_j = b_{j+1} p_{j+1} + a_j p_j + b_j p_{j-1}.
long double jacobi_a(int j, double alpha, double beta);
long double jacobi_b(int j, double alpha, double beta);

// Orthonormal p_0..p_n at x, returned as p_n; `sum_sq` receives sum_{j<n} p_j(x)^2.
long double jacobi_orthonormal(int n, double alpha, double beta, long double x, long double* sum_sq = nullptr);

// n-point rule; alpha, beta > -1.
QuadratureRule gauss_jacobi(int n, double alpha, double beta);

// Shared rule from a process-wide cache.
std::shared_ptr<const QuadratureRule> cached_gauss_jacobi(int n, double alpha, double beta);

// Smallest rule exact for polynomials of the given degree.
int points_for_degree(int degree);

}  // namespace speclab
