#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "lacuna/errors.hpp"

namespace lacuna {

// Fourier-side cutoff with support exactly ]1/lambda, lambda[ and
// chi_hat(1) = 1.  Zero outside the support.
double chi_hat(double lambda, double tau);

// Fourier-side cutoff with support ]-1/2, 1/2[ and psi_hat(0) = 1.
double psi_hat(double sigma);

// The real-space kernels inherit only Gevrey-type decay exp(-c sqrt|z|)
// from these bumps, so the tabulation window has to be generous; narrow
// bands (lambda near 1) push the asymptotic regime further out.
double default_truncation_radius(double lambda);

// Band-limited kernel chi = F^{-1} chi_hat tabulated on [-Z, Z].
// Immutable after construction (build once, read many).
struct BumpKernel {
    double lambda = 0.0;
    double normalization = 0.0; // additive constant in the exponent, chi_hat(1)=1
    int quadrature_nodes = 0;   // tau-side trapezoid intervals
    double truncation_radius = 0.0;
    double grid_step = 0.0;
    std::vector<std::complex<double>> table; // chi(z_i), z_i = -Z + i*step

    double moment0 = 0.0;    // |trapezoid integral of chi|
    double moment1 = 0.0;    // |trapezoid integral of z chi|
    double max_abs = 0.0;
    double decay_ratio = 0.0; // max |chi| over |z| >= Z/2, relative to max_abs
    double outer_mass = 0.0;  // integral of |chi| over |z| >= Z/2

    double z_at(std::size_t i) const { return -truncation_radius + grid_step * static_cast<double>(i); }
};

// Real even kernel psi = F^{-1} psi_hat; same tabulation scheme.
struct GapKernel {
    double normalization = 0.0; // psi_hat(0)
    int quadrature_nodes = 0;
    double truncation_radius = 0.0;
    double grid_step = 0.0;
    std::vector<double> table;

    double integral = 0.0; // trapezoid integral, should be psi_hat(0) = 1
    double max_abs = 0.0;
    double decay_ratio = 0.0;

    double z_at(std::size_t i) const { return -truncation_radius + grid_step * static_cast<double>(i); }
};

// Tabulates chi by trapezoid quadrature of the inverse Fourier integral
// over the compact support (spectrally accurate: the integrand vanishes to
// all orders at the endpoints).  Validates the vanishing moments and the
// tail decay before returning.  Z = 0 picks default_truncation_radius.
BumpKernel build_kernel(double lambda, int M = 4096, double Z = 0.0);

GapKernel build_gap_kernel(int M = 4096, double Z = 512.0);

} // namespace lacuna
