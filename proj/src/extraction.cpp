#include "lacuna/extraction.hpp"

#include <algorithm>
#include <cmath>

#include "lacuna/summation.hpp"

namespace lacuna {

namespace {

std::complex<double> variant_factor(Variant v) {
    switch (v) {
        case Variant::complex_sum: return {1.0, 0.0};
        case Variant::real_part: return {0.5, 0.0};
        case Variant::imag_part: return {0.0, -0.5}; // 1/(2i)
    }
    return {1.0, 0.0};
}

// scan window end for the ratio precondition
std::int64_t scan_end(const SeriesSpec& spec, double eps) {
    try {
        return truncation_index(spec, eps);
    } catch (const CapExceeded&) {
        // slowly converging tails (the gap-method regime); the ratio scan
        // below will reject these against any admissible lambda anyway
        return spec.start_index() + 4096;
    }
}

// throws LambdaTooWide on the first window ratio below lambda
void check_ratio_precondition(const SeriesSpec& spec, double lambda,
                              std::int64_t j_end) {
    double log_lambda = std::log(lambda);
    double prev = log_frequency(spec, spec.start_index());
    for (std::int64_t j = spec.start_index() + 1; j <= j_end + 1; ++j) {
        double cur = log_frequency(spec, j);
        if (cur - prev < log_lambda - 1e-13)
            throw LambdaTooWide(
                "frequency ratio b_" + std::to_string(j) + "/b_" +
                std::to_string(j - 1) +
                " lies inside the kernel support; use the gap method "
                "(extract_gap / --method gap)");
        prev = cur;
    }
}

struct Window {
    std::int64_t lo, hi;
};

// indices with b_j inside ]b_k/lambda, lambda*b_k[ (contains k; under the
// ratio precondition it is exactly {k})
Window support_window(const SeriesSpec& spec, double lambda, std::int64_t k,
                      std::int64_t j_end) {
    double log_k = log_frequency(spec, k);
    double log_lambda = std::log(lambda);
    Window w{k, k};
    while (w.lo > spec.start_index() &&
           log_frequency(spec, w.lo - 1) > log_k - log_lambda)
        --w.lo;
    while (w.hi < j_end && log_frequency(spec, w.hi + 1) < log_k + log_lambda)
        ++w.hi;
    return w;
}

} // namespace

double default_lambda(const SeriesSpec& spec, double eps) {
    // below ~1.05 the band-limited kernel cannot be tabulated on any
    // practical window (exp(-c sqrt z) tails with c -> 0), so the
    // frequency route is refused in favour of the gap method
    constexpr double kMinPractical = 1.05;
    std::int64_t j_end = scan_end(spec, eps);
    double min_log = std::numeric_limits<double>::infinity();
    double prev = log_frequency(spec, spec.start_index());
    std::int64_t quick_end = std::min(j_end, spec.start_index() + 4096);
    auto scan_to = [&](std::int64_t from, std::int64_t to) {
        for (std::int64_t j = from; j <= to; ++j) {
            double cur = log_frequency(spec, j);
            min_log = std::min(min_log, cur - prev);
            prev = cur;
        }
    };
    scan_to(spec.start_index() + 1, quick_end + 1);
    double lambda = std::min(2.0, std::exp(min_log));
    if (!(lambda > kMinPractical))
        throw LambdaTooWide("smallest frequency ratio " + std::to_string(lambda) +
                            " too close to 1 for the frequency-side kernel; "
                            "use the gap method (extract_gap / --method gap)");
    if (j_end > quick_end) {
        scan_to(quick_end + 2, j_end + 1);
        lambda = std::min(2.0, std::exp(min_log));
        if (!(lambda > kMinPractical))
            throw LambdaTooWide("frequency ratios approach 1 within the "
                                "truncation window; use the gap method");
    }
    return lambda;
}

std::complex<double> expected_coefficient(const SeriesSpec& spec, std::int64_t k,
                                          double t0) {
    SeriesEvaluator ev(spec, k);
    if (ev.phase_safe_limit(std::abs(t0)) < k)
        throw PhasePrecisionLoss("b_k |t0| >= 2^53");
    return ev.term_value(k, t0) * variant_factor(spec.variant());
}

std::complex<double> extract_analytic(const SeriesSpec& spec, double lambda,
                                      std::int64_t k, double t0, double eps) {
    if (k < spec.start_index()) throw IndexBelowStart("k below start_index");
    if (!(eps > 0.0)) throw OutOfRange("eps must be positive");
    if (!(lambda > 1.0)) throw BadLambda("lambda must be > 1");

    // quick scan first so steep families fail fast with the right error
    check_ratio_precondition(spec, lambda,
                             std::min(scan_end(spec, eps),
                                      spec.start_index() + 64));
    std::int64_t j_end = scan_end(spec, eps);
    check_ratio_precondition(spec, lambda, j_end);
    if (k > j_end) throw OutOfRange("k beyond the truncation window");

    Window w = support_window(spec, lambda, k, j_end);
    SeriesEvaluator ev(spec, w.hi);
    if (ev.phase_safe_limit(std::abs(t0)) < w.hi)
        throw PhasePrecisionLoss("b_j |t0| >= 2^53 inside the support window");

    // ratios through the log-space table; chi_hat vanishes to all orders at
    // the support boundary, so one-ulp wobble there is harmless
    std::complex<double> vf = variant_factor(spec.variant());
    ComplexSum acc;
    for (std::int64_t j = w.lo; j <= w.hi; ++j) {
        double ratio = std::exp(ev.log_b(j) - ev.log_b(k));
        if (j == k) ratio = 1.0;
        double weight = chi_hat(lambda, ratio);
        if (weight == 0.0) continue;
        acc.add(ev.term_value(j, t0) * vf * weight);
    }
    return acc.value();
}

std::complex<double> extract_analytic(const SeriesSpec& spec, const BumpKernel& kernel,
                                      std::int64_t k, double t0, double eps) {
    return extract_analytic(spec, kernel.lambda, k, t0, eps);
}

std::complex<double> extract_quadrature(const SeriesSpec& spec, const BumpKernel& kernel,
                                        std::int64_t k, double t0, double eps) {
    if (k < spec.start_index()) throw IndexBelowStart("k below start_index");
    if (!(eps > 0.0)) throw OutOfRange("eps must be positive");

    std::int64_t j_end = scan_end(spec, eps);
    check_ratio_precondition(spec, kernel.lambda, j_end);

    double b_k = std::exp(log_frequency(spec, k));
    if (!std::isfinite(b_k * kernel.truncation_radius))
        throw OutOfRange("b_k * truncation_radius not representable");

    // truncation for the f evaluations: requested tail, capped by the
    // largest index whose phase stays representable across the z grid
    double t_abs_max = std::abs(t0) + kernel.truncation_radius / b_k;
    double eps_f = std::min(eps * 0.1, 1e-9);
    std::int64_t N;
    try {
        N = truncation_index(spec, eps_f);
    } catch (const CapExceeded&) {
        N = 10'000'000;
    }
    SeriesEvaluator ev(spec, N);
    std::int64_t safe = ev.phase_safe_limit(t_abs_max);
    if (safe < spec.start_index())
        throw QuadratureBudgetExceeded("no term phase representable over the grid");
    N = std::min(N, safe);
    double f_tail = spec.has_tail_rule() || spec.family() != Family::custom
                        ? tail_bound(spec, N)
                        : std::numeric_limits<double>::infinity();

    const dd t0_dd(t0);
    const dd bk_dd(b_k);
    const std::size_t nodes = kernel.table.size();
    const double h = kernel.grid_step;

    Variant var = spec.variant();
    ComplexSum fine, coarse;
    for (std::size_t i = 0; i < nodes; ++i) {
        // t = t0 - z_i / b_k carried in double-double: high-frequency terms
        // of f need the phase b_j t coherent to ~1e-16 for their transform
        // to cancel in the quadrature
        dd t = sub(t0_dd, div(dd(kernel.z_at(i)), bk_dd));
        std::complex<double> fv = ev.range_sum_dd(t, spec.start_index(), N);
        switch (var) {
            case Variant::real_part: fv = {fv.real(), 0.0}; break;
            case Variant::imag_part: fv = {fv.imag(), 0.0}; break;
            case Variant::complex_sum: break;
        }
        double w = (i == 0 || i == nodes - 1) ? 0.5 * h : h;
        std::complex<double> contrib = kernel.table[i] * fv;
        fine.add(w * contrib);
        if (i % 2 == 0) {
            double w2 = (i == 0 || i == nodes - 1) ? h : 2.0 * h;
            coarse.add(w2 * contrib);
        }
    }

    std::complex<double> result = fine.value();
    double est = std::abs(result - coarse.value()) + f_tail * kernel.outer_mass +
                 1e-14;
    if (est > eps)
        throw QuadratureBudgetExceeded(
            "estimated quadrature error " + std::to_string(est) +
            " above requested eps " + std::to_string(eps));
    return result;
}

GapExtraction extract_gap(const SeriesSpec& spec, const GapKernel& kernel,
                          std::int64_t k, double t0, double eps) {
    if (k < spec.start_index()) throw IndexBelowStart("k below start_index");
    if (!(eps > 0.0)) throw OutOfRange("eps must be positive");

    SequenceSample sk = term(spec, k);
    SeriesEvaluator ev(spec, k + 1);
    if (ev.phase_safe_limit(std::abs(t0)) < std::min(k + 1, ev.j_hi()))
        throw PhasePrecisionLoss("b_j |t0| >= 2^53 near k");

    // psi_hat((b_j - b_k)/delta_b_k) is nonzero only for
    // b_k - delta_b_k/2 < b_j < b_k + delta_b_k/2; by the minimum-gap
    // definition and monotonicity that window holds j = k alone, so the
    // immediate neighbours already evaluate to exactly zero.  Negative
    // frequencies of the Re/Im variants sit at (-b_j - b_k)/delta_b_k
    // <= -1 and never touch the support either.
    std::complex<double> vf = variant_factor(spec.variant());
    ComplexSum acc;
    for (std::int64_t j = std::max(spec.start_index(), k - 1); j <= k + 1; ++j) {
        double weight;
        if (j == k) {
            weight = kernel.normalization; // psi_hat(0)
        } else {
            double sigma = sub(dd(std::exp(ev.log_b(j))), dd(sk.b)).to_double() /
                           sk.delta_b;
            weight = psi_hat(sigma);
        }
        if (weight == 0.0) continue;
        acc.add(ev.term_value(j, t0) * vf * weight);
    }
    GapExtraction out;
    out.value = acc.value();
    out.scaled_log_magnitude = std::log(std::abs(out.value)) + sk.log_delta_b;
    return out;
}

namespace {

template <typename Fn>
std::vector<ExtractionReport> sweep_impl(const SeriesSpec& spec, std::int64_t k_from,
                                         std::int64_t k_to, double t0, double eps,
                                         Fn&& fill) {
    if (k_from < spec.start_index() && k_from <= k_to)
        throw IndexBelowStart("k range below start_index");
    std::vector<ExtractionReport> out;
    for (std::int64_t k = k_from; k <= k_to; ++k) {
        ExtractionReport r;
        r.k = k;
        r.t0 = t0;
        r.tail_eps = eps;
        r.expected = expected_coefficient(spec, k, t0);
        fill(k, r);
        r.residual_analytic = std::abs(r.analytic - r.expected);
        if (r.quadrature)
            r.residual_quadrature = std::abs(*r.quadrature - r.expected);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace

std::vector<ExtractionReport> extraction_sweep(const SeriesSpec& spec,
                                               const BumpKernel& kernel,
                                               std::int64_t k_from, std::int64_t k_to,
                                               double t0, double eps,
                                               bool with_quadrature) {
    return sweep_impl(spec, k_from, k_to, t0, eps, [&](std::int64_t k, ExtractionReport& r) {
        r.analytic = extract_analytic(spec, kernel, k, t0, eps);
        if (with_quadrature) {
            r.quadrature = extract_quadrature(spec, kernel, k, t0, eps);
            QuadParams qp;
            qp.tau_nodes = kernel.quadrature_nodes;
            qp.radius = kernel.truncation_radius;
            qp.step = kernel.grid_step;
            qp.f_eval_tail = std::min(eps * 0.1, 1e-9);
            qp.est_error = std::abs(*r.quadrature - r.analytic);
            r.quad_params = qp;
        }
    });
}

std::vector<ExtractionReport> extraction_sweep(const SeriesSpec& spec,
                                               const GapKernel& kernel,
                                               std::int64_t k_from, std::int64_t k_to,
                                               double t0, double eps) {
    return sweep_impl(spec, k_from, k_to, t0, eps, [&](std::int64_t k, ExtractionReport& r) {
        r.analytic = extract_gap(spec, kernel, k, t0, eps).value;
    });
}

} // namespace lacuna
