#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "lacuna/series.hpp"

namespace lacuna {

enum class ScaleRule { inverse_b_k, inverse_delta_b_k, dyadic };

struct QuotientTrace {
    double t0 = 0.0;
    std::vector<double> scales;                  // strictly decreasing h values
    std::vector<std::complex<double>> quotients; // (f(t0+h) - f(t0)) / h
    std::vector<double> band_values;             // |a_k| b_k or |a_k| delta_b_k; empty for dyadic
};

struct HolderFit {
    double alpha_hat = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS of the log-log fit residuals
    double h_min = 0.0;
    double h_max = 0.0;
    int grid_points = 0;
};

// One-sided difference quotients at scales h_k given by the rule, paired
// with the theoretical band values whose failure to vanish signals
// non-differentiability.  For the dyadic rule k plays the role of the
// exponent m in h = 2^-m.  Entries that would repeat a scale (gap
// sequences can tie consecutive delta_b) are dropped to keep the scales
// strictly decreasing.
QuotientTrace difference_quotients(const SeriesSpec& spec, double t0,
                                   ScaleRule rule, std::int64_t k_from,
                                   std::int64_t k_to, double eps = 1e-12);

// empirical sup of |f(t+h) - f(t)| over an equispaced grid; a lower bound
// on the true modulus of continuity (grid coarseness is not corrected).
// The truncation index for f is capped where phases stop being
// representable; the effective tail is then tail_bound at the cap.
double oscillation(const SeriesSpec& spec, double h, double t0, double t1,
                   int points, double eps);

// least-squares fit of log oscillation against log h over geometrically
// spaced levels in [h_min, h_max]
HolderFit holder_estimate(const SeriesSpec& spec, double h_min, double h_max,
                          int levels, double t0, double t1, int points,
                          double eps);

// Symmetric difference quotient (phi(t+h/2) - phi(t-h/2))/h of the
// normalized quadratic sine series phi(t) = sum sin(pi j^2 t)/(pi j^2)
// at t = r/s, r and s odd.  phi is differentiable exactly at such points
// with phi' = -1/2, approached at rate O(h^{1/2}).  Phases are reduced
// exactly through the rational structure of t, so N is not limited by the
// 2^53 phase gate.
double riemann_derivative_probe(std::int64_t r, std::int64_t s, double h,
                                std::int64_t N);

// partial sum minus its first term, i.e. summation from start_index + 1;
// `terms` counts the terms of the full partial sum
std::vector<SamplePoint> deviation_from_first_term(const SeriesSpec& spec,
                                                   double t0, double t1,
                                                   int points,
                                                   std::int64_t terms);

} // namespace lacuna
