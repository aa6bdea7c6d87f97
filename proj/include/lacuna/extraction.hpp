#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "lacuna/kernels.hpp"
#include "lacuna/series.hpp"

namespace lacuna {

struct QuadParams {
    int tau_nodes = 0;
    double radius = 0.0;
    double step = 0.0;
    double f_eval_tail = 0.0; // tail bound of the truncated f used inside
    double est_error = 0.0;   // grid-doubling difference + leakage estimate
};

struct ExtractionReport {
    std::int64_t k = 0;
    double t0 = 0.0;
    std::complex<double> expected{0.0, 0.0}; // variant-adjusted a_k e^{i b_k t0}
    std::complex<double> analytic{0.0, 0.0};
    std::optional<std::complex<double>> quadrature;
    double residual_analytic = 0.0;
    std::optional<double> residual_quadrature;
    double tail_eps = 0.0;
    std::optional<QuadParams> quad_params;
};

// Frequency-side collapse: sum of a_j e^{i b_j t0} chi_hat(b_j / b_k).
// Under the ratio precondition only j = k survives, so the result equals
// the variant-adjusted a_k e^{i b_k t0} exactly up to the tail.
// Throws LambdaTooWide when some ratio b_j/b_k (j != k) falls inside the
// kernel support -- the signal to switch to extract_gap.
std::complex<double> extract_analytic(const SeriesSpec& spec, const BumpKernel& kernel,
                                      std::int64_t k, double t0, double eps);

// same collapse through chi_hat alone; the tabulated kernel is only needed
// for the quadrature route
std::complex<double> extract_analytic(const SeriesSpec& spec, double lambda,
                                      std::int64_t k, double t0, double eps);

// Real-space route: trapezoid of chi(z) f(t0 - z/b_k) over the tabulated
// grid, with the error controlled by comparing against the half-resolution
// grid.  Agreement with extract_analytic is the module's central oracle.
std::complex<double> extract_quadrature(const SeriesSpec& spec, const BumpKernel& kernel,
                                        std::int64_t k, double t0, double eps);

struct GapExtraction {
    std::complex<double> value{0.0, 0.0};
    // log |delta_b_k * value|, the dilation-scaled magnitude entering the
    // Lipschitz criterion (kept in log space against overflow)
    double scaled_log_magnitude = 0.0;
};

// Gap-dilated collapse: sum of a_j e^{i b_j t0} psi_hat((b_j - b_k)/delta_b_k).
// Needs no frequency-ratio condition.
GapExtraction extract_gap(const SeriesSpec& spec, const GapKernel& kernel,
                          std::int64_t k, double t0, double eps);

// variant-adjusted expected coefficient a_k e^{i b_k t0} (times 1/2 or
// 1/(2i) for the real/imaginary projections)
std::complex<double> expected_coefficient(const SeriesSpec& spec, std::int64_t k,
                                          double t0);

std::vector<ExtractionReport> extraction_sweep(const SeriesSpec& spec,
                                               const BumpKernel& kernel,
                                               std::int64_t k_from, std::int64_t k_to,
                                               double t0, double eps,
                                               bool with_quadrature = true);

std::vector<ExtractionReport> extraction_sweep(const SeriesSpec& spec,
                                               const GapKernel& kernel,
                                               std::int64_t k_from, std::int64_t k_to,
                                               double t0, double eps);

// largest admissible support parameter for the spec: the smallest frequency
// ratio over the truncation window, clamped to at most 2; refuses ratios
// too close to 1 (use the gap method there)
double default_lambda(const SeriesSpec& spec, double eps);

} // namespace lacuna
