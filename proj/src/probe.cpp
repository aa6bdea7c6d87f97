#include "lacuna/probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lacuna/parallel.hpp"
#include "lacuna/summation.hpp"

namespace lacuna {

namespace {

std::complex<double> project(const SeriesSpec& spec, std::complex<double> v) {
    switch (spec.variant()) {
        case Variant::real_part: return {v.real(), 0.0};
        case Variant::imag_part: return {v.imag(), 0.0};
        case Variant::complex_sum: return v;
    }
    return v;
}

// truncation index for target eps, capped where phases at |t| <= t_abs
// stop being representable
std::int64_t capped_index(const SeriesSpec& spec, double eps, double t_abs,
                          std::int64_t* out_n = nullptr) {
    std::int64_t N;
    try {
        N = truncation_index(spec, eps);
    } catch (const CapExceeded&) {
        N = 10'000'000;
    }
    SeriesEvaluator probe(spec, N);
    std::int64_t safe = probe.phase_safe_limit(t_abs);
    if (safe < spec.start_index())
        throw PhasePrecisionLoss("no term phase representable at this |t|");
    if (out_n) *out_n = std::min(N, safe);
    return std::min(N, safe);
}

} // namespace

QuotientTrace difference_quotients(const SeriesSpec& spec, double t0,
                                   ScaleRule rule, std::int64_t k_from,
                                   std::int64_t k_to, double eps) {
    if (rule != ScaleRule::dyadic && k_from < spec.start_index())
        throw IndexBelowStart("k range below start_index");
    if (rule == ScaleRule::dyadic && k_from < 0)
        throw OutOfRange("dyadic exponents must be nonnegative");

    QuotientTrace tr;
    tr.t0 = t0;
    if (k_to < k_from) return tr;

    // scales and band values
    std::vector<double> scales, bands;
    for (std::int64_t k = k_from; k <= k_to; ++k) {
        switch (rule) {
            case ScaleRule::inverse_b_k: {
                SequenceSample s = term(spec, k);
                scales.push_back(std::exp(-s.log_b));
                bands.push_back(std::exp(s.log_amp + s.log_b));
                break;
            }
            case ScaleRule::inverse_delta_b_k: {
                SequenceSample s = term(spec, k);
                scales.push_back(std::exp(-s.log_delta_b));
                bands.push_back(std::exp(s.log_amp + s.log_delta_b));
                break;
            }
            case ScaleRule::dyadic:
                scales.push_back(std::ldexp(1.0, -static_cast<int>(k)));
                break;
        }
    }

    double h_max = *std::max_element(scales.begin(), scales.end());
    double t_abs = std::abs(t0) + h_max;
    std::int64_t N = capped_index(spec, eps, t_abs);
    SeriesEvaluator ev(spec, N);
    std::complex<double> f0 = project(spec, ev.range_sum(t0, spec.start_index(), N));

    for (std::size_t i = 0; i < scales.size(); ++i) {
        double h = scales[i];
        if (!(h > 0.0) || !std::isfinite(h)) continue;
        if (!tr.scales.empty() && !(h < tr.scales.back())) continue; // keep strict decrease
        std::complex<double> fh =
            project(spec, ev.range_sum(t0 + h, spec.start_index(), N));
        tr.scales.push_back(h);
        tr.quotients.push_back((fh - f0) / h);
        if (rule != ScaleRule::dyadic) tr.band_values.push_back(bands[i]);
    }
    return tr;
}

namespace {

double oscillation_on(const SeriesEvaluator& ev, std::int64_t N, double h,
                      double t0, double t1, int points) {
    const SeriesSpec& spec = ev.spec();
    std::vector<double> diffs(static_cast<std::size_t>(points));
    double span = t1 - t0;
    parallel_for(points, [&](long long i) {
        double t = t0 + span * (static_cast<double>(i) / static_cast<double>(points));
        auto a = project(spec, ev.range_sum(t, spec.start_index(), N));
        auto b = project(spec, ev.range_sum(t + h, spec.start_index(), N));
        diffs[static_cast<std::size_t>(i)] = std::abs(b - a);
    });
    double m = 0.0;
    for (double d : diffs) m = std::max(m, d);
    return m;
}

} // namespace

double oscillation(const SeriesSpec& spec, double h, double t0, double t1,
                   int points, double eps) {
    if (h < 0.0) throw OutOfRange("h must be nonnegative");
    if (h == 0.0) return 0.0;
    if (!(t0 < t1) || points < 2) throw OutOfRange("bad t grid");
    std::int64_t N = capped_index(spec, eps, std::max(std::abs(t0), std::abs(t1)) + h);
    SeriesEvaluator ev(spec, N);
    return oscillation_on(ev, N, h, t0, t1, points);
}

HolderFit holder_estimate(const SeriesSpec& spec, double h_min, double h_max,
                          int levels, double t0, double t1, int points,
                          double eps) {
    if (!(h_min > 0.0) || !(h_min < h_max)) throw OutOfRange("need 0 < h_min < h_max");
    if (levels < 6) throw OutOfRange("need at least 6 levels");
    if (!(t0 < t1) || points < 2) throw OutOfRange("bad t grid");

    std::int64_t N = capped_index(spec, eps,
                                  std::max(std::abs(t0), std::abs(t1)) + h_max);
    SeriesEvaluator ev(spec, N);

    std::vector<double> lx(static_cast<std::size_t>(levels)),
        ly(static_cast<std::size_t>(levels));
    double lmin = std::log(h_min), lmax = std::log(h_max);
    for (int l = 0; l < levels; ++l) {
        double lh = lmax + (lmin - lmax) * (static_cast<double>(l) /
                                            static_cast<double>(levels - 1));
        double h = std::exp(lh);
        double om = oscillation_on(ev, N, h, t0, t1, points);
        if (!(om > 0.0) || !std::isfinite(om))
            throw DegenerateFit("oscillation underflowed at h=" + std::to_string(h));
        lx[static_cast<std::size_t>(l)] = lh;
        ly[static_cast<std::size_t>(l)] = std::log(om);
    }

    double n = static_cast<double>(levels);
    double mx = 0.0, my = 0.0;
    for (int l = 0; l < levels; ++l) { mx += lx[l]; my += ly[l]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int l = 0; l < levels; ++l) {
        sxx += (lx[l] - mx) * (lx[l] - mx);
        sxy += (lx[l] - mx) * (ly[l] - my);
    }
    HolderFit fit;
    fit.alpha_hat = sxy / sxx;
    fit.intercept = my - fit.alpha_hat * mx;
    double ss = 0.0;
    for (int l = 0; l < levels; ++l) {
        double rres = ly[l] - (fit.intercept + fit.alpha_hat * lx[l]);
        ss += rres * rres;
    }
    fit.residual = std::sqrt(ss / n);
    fit.h_min = h_min;
    fit.h_max = h_max;
    fit.grid_points = points;
    if (fit.alpha_hat < -0.5 || fit.alpha_hat > 1.5)
        throw DegenerateFit("fitted exponent outside the sanity band [-0.5, 1.5]");
    return fit;
}

namespace {

// phi(r/s + dt) truncated at N, phases reduced exactly: pi j^2 (r/s + dt)
// splits into pi (j^2 r mod 2s)/s plus pi (j^2 dt mod 2), both in [-pi, pi]
// up to one fold
double riemann_phi(std::int64_t r, std::int64_t s, double dt, std::int64_t N) {
    const double inv_pi = 1.0 / ddc::pi.hi;
    const std::int64_t m2s = 2 * s;
    CompensatedSum acc;
    for (std::int64_t j = 1; j <= N; ++j) {
        std::int64_t m = ((j % m2s) * (j % m2s)) % m2s; // j^2 mod 2s
        m = (m * (r % m2s)) % m2s;
        dd frac = (dt == 0.0) ? dd(0.0) : reduce_two(mul(dd_square_of_int(j), dt));
        dd u = reduce_two(add(frac, static_cast<double>(m) / static_cast<double>(s)));
        dd ph = mul(ddc::pi, u);
        double sj = std::sin(ph.hi) + ph.lo * std::cos(ph.hi);
        double jj = static_cast<double>(j) * static_cast<double>(j);
        acc.add(sj * inv_pi / jj);
    }
    return acc.value();
}

} // namespace

double riemann_derivative_probe(std::int64_t r, std::int64_t s, double h,
                                std::int64_t N) {
    if (r % 2 == 0 || s % 2 == 0 || s <= 0)
        throw OutOfRange("r and s must be odd (s positive)");
    if (s > 94'906'265LL) throw OutOfRange("s too large for exact modular squaring");
    if (!(h > 0.0)) throw OutOfRange("h must be positive");
    if (N > 3'000'000'000LL) throw OutOfRange("N too large for exact squaring");
    double trunc = 2.0 / (h * static_cast<double>(N) * ddc::pi.hi);
    if (!(trunc <= 0.01))
        throw PreconditionTruncation(
            "quotient truncation bound 2/(h N pi) = " + std::to_string(trunc) +
            " exceeds 0.01; increase N or h");
    double fp = riemann_phi(r, s, +0.5 * h, N);
    double fm = riemann_phi(r, s, -0.5 * h, N);
    return (fp - fm) / h;
}

std::vector<SamplePoint> deviation_from_first_term(const SeriesSpec& spec,
                                                   double t0, double t1,
                                                   int points,
                                                   std::int64_t terms) {
    if (terms < 2) throw OutOfRange("need terms >= 2");
    if (!(t0 < t1) || points < 2) throw OutOfRange("bad t grid");
    std::int64_t N = spec.start_index() + terms - 1;
    SeriesEvaluator ev(spec, N);
    std::vector<SamplePoint> out(static_cast<std::size_t>(points));
    double span = t1 - t0;
    parallel_for(points, [&](long long i) {
        double t = (i == points - 1)
                       ? t1
                       : t0 + span * (static_cast<double>(i) /
                                      static_cast<double>(points - 1));
        auto v = ev.range_sum(t, spec.start_index() + 1, N);
        out[static_cast<std::size_t>(i)] = {t, v.real(), v.imag()};
    });
    return out;
}

} // namespace lacuna
