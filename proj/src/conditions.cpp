#include "lacuna/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lacuna {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogDoubleMax = 709.0;

// largest J1' <= J1 with log b_{J1'+1} still within double range
std::int64_t clip_window(const SeriesSpec& spec, std::int64_t J0, std::int64_t J1) {
    if (log_frequency(spec, J1 + 1) <= kLogDoubleMax) return J1;
    std::int64_t lo = J0, hi = J1; // log b_{lo+1} fine, log b_{hi+1} overflows
    if (log_frequency(spec, J0 + 1) > kLogDoubleMax)
        throw WindowTooSmall("frequencies overflow double range at the window start");
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (log_frequency(spec, mid + 1) <= kLogDoubleMax ? lo : hi) = mid;
    }
    return lo;
}

struct WindowData {
    std::int64_t J0, J1;
    std::vector<SequenceSample> samples; // [J0, J1]
    std::vector<double> log_ratio;       // log(b_{j+1}/b_j), j in [J0, J1-1]
};

WindowData collect(const SeriesSpec& spec, std::int64_t J0, std::int64_t J1) {
    if (J0 < spec.start_index())
        throw IndexBelowStart("window below start_index");
    if (!(J1 > J0 + 16))
        throw WindowTooSmall("need J1 > J0 + 16");
    J1 = clip_window(spec, J0, J1);
    if (!(J1 > J0 + 16))
        throw WindowTooSmall("window too small after overflow clipping");

    WindowData w;
    w.J0 = J0;
    w.J1 = J1;
    w.samples.reserve(static_cast<std::size_t>(J1 - J0 + 1));
    for (std::int64_t j = J0; j <= J1; ++j) w.samples.push_back(term(spec, j));
    w.log_ratio.reserve(w.samples.size() - 1);
    for (std::size_t i = 0; i + 1 < w.samples.size(); ++i)
        w.log_ratio.push_back(w.samples[i + 1].log_b - w.samples[i].log_b);
    return w;
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
}

struct LogProducts {
    std::vector<double> vals; // log(|a_j| * scale_j)
    double sup, tailmax;      // over the window / over the last quarter
};

LogProducts log_products(const WindowData& w, bool use_gap) {
    LogProducts p;
    p.vals.reserve(w.samples.size());
    for (const auto& s : w.samples)
        p.vals.push_back(s.log_amp + (use_gap ? s.log_delta_b : s.log_b));
    p.sup = -kInf;
    p.tailmax = -kInf;
    std::size_t tail_from = p.vals.size() - p.vals.size() / 4;
    for (std::size_t i = 0; i < p.vals.size(); ++i) {
        p.sup = std::max(p.sup, p.vals[i]);
        if (i >= tail_from) p.tailmax = std::max(p.tailmax, p.vals[i]);
    }
    return p;
}

bool convexity_evidence(const WindowData& w) {
    // relative second differences of phi(j) = j/|a_j| = exp(log j - log_amp)
    const auto& s = w.samples;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        double L0 = std::log(static_cast<double>(s[i - 1].j)) - s[i - 1].log_amp;
        double L1 = std::log(static_cast<double>(s[i].j)) - s[i].log_amp;
        double L2 = std::log(static_cast<double>(s[i + 1].j)) - s[i + 1].log_amp;
        double d = std::exp(L2 - L1) + std::exp(L0 - L1) - 2.0;
        double tol = 1e-12 * (std::exp(L2 - L1) + std::exp(L0 - L1) + 2.0);
        if (d < -tol) return false;
    }
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i + 1].log_amp > s[i].log_amp + 1e-12) return false;
    return true;
}

std::optional<double> c1_tail(const SeriesSpec& spec, std::int64_t J1) {
    const auto& P = spec.params();
    double n = static_cast<double>(J1);
    switch (spec.family()) {
        case Family::f_theta: {
            if (!(P.theta > 1.0)) return std::nullopt;
            double r = std::exp2(1.0 - P.theta);
            return std::pow(r, n + 1.0) / (1.0 - r);
        }
        case Family::weierstrass_cos:
        case Family::weierstrass_sin: {
            if (!(P.b < P.a)) return std::nullopt;
            double r = P.b / P.a;
            return std::pow(r, n + 1.0) / (1.0 - r);
        }
        case Family::power: {
            if (!(P.q < P.p - 1.0)) return std::nullopt;
            // integral comparison for sum j^{q-p}
            return std::pow(n, P.q - P.p + 1.0) / (P.p - 1.0 - P.q);
        }
        default:
            return std::nullopt; // divergent for the remaining built-ins,
                                 // unknown for custom rules
    }
}

Verdict symbolic_verdict(const SeriesSpec& spec) {
    const auto& P = spec.params();
    switch (spec.family()) {
        case Family::f_theta:
            if (P.theta > 1.0) return Verdict::c1;
            return P.theta < 1.0 ? Verdict::nowhere_differentiable_non_lipschitz
                                 : Verdict::nowhere_differentiable;
        case Family::weierstrass_cos:
        case Family::weierstrass_sin:
            if (P.b < P.a) return Verdict::c1;
            return P.b > P.a ? Verdict::nowhere_differentiable_non_lipschitz
                             : Verdict::nowhere_differentiable;
        case Family::darboux:
            return Verdict::nowhere_differentiable_non_lipschitz;
        case Family::gap_example:
            return Verdict::nowhere_differentiable;
        case Family::power:
            if (P.q < P.p - 1.0) return Verdict::c1;
            if (P.q > P.p + 1.0) return Verdict::nowhere_differentiable_non_lipschitz;
            if (P.q == P.p + 1.0) return Verdict::nowhere_differentiable;
            return Verdict::inconclusive; // transition band [p-1, p+1)
        case Family::riemann:
            return Verdict::inconclusive;
        case Family::iterated_log:
            return Verdict::nowhere_differentiable;
        case Family::custom:
            return Verdict::inconclusive; // unreachable, heuristic path
    }
    return Verdict::inconclusive;
}

// finite-window reading of "a_j delta_b_j does not tend to 0": the last
// quarter still reaches half the window sup (in log space); an additional
// clearly positive growth trend upgrades to the non-Lipschitz verdict
Verdict heuristic_verdict(const WindowData& w, const LogProducts& gap,
                          const LogProducts& ab, double ratio_min) {
    const double log_half = -0.6931471805599453;
    std::vector<double> js;
    js.reserve(gap.vals.size());
    for (const auto& s : w.samples) js.push_back(static_cast<double>(s.j));

    auto classify = [&](const LogProducts& p) -> Verdict {
        if (p.tailmax < p.sup + log_half) return Verdict::inconclusive;
        double slope = ols_slope(js, p.vals);
        double span = slope * (js.back() - js.front());
        if (slope > 1e-3 && span > 0.5 * 0.6931471805599453)
            return Verdict::nowhere_differentiable_non_lipschitz;
        return Verdict::nowhere_differentiable;
    };

    Verdict v = classify(gap);
    if (v != Verdict::inconclusive) return v;
    // frequency-side products only count with log-separated frequencies
    if (ratio_min > 1.0 + 1e-9) return classify(ab);
    return Verdict::inconclusive;
}

} // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::c1: return "C1";
        case Verdict::nowhere_differentiable: return "nowhere_differentiable";
        case Verdict::nowhere_differentiable_non_lipschitz:
            return "nowhere_differentiable_non_lipschitz";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

const char* verdict_basis_name(VerdictBasis b) {
    return b == VerdictBasis::symbolic_family_rule ? "symbolic_family_rule"
                                                   : "finite_window_heuristic";
}

ConditionReport hypothesis_scan(const SeriesSpec& spec, std::int64_t J0,
                                std::int64_t J1) {
    WindowData w = collect(spec, J0, J1);

    ConditionReport r;
    r.window_lo = w.J0;
    r.window_hi = w.J1;

    double min_lr = kInf;
    for (double lr : w.log_ratio) min_lr = std::min(min_lr, lr);
    r.ratio_min = std::exp(min_lr);
    {
        std::vector<double> js(w.log_ratio.size());
        for (std::size_t i = 0; i < js.size(); ++i)
            js[i] = static_cast<double>(w.J0 + static_cast<std::int64_t>(i));
        r.ratio_trend = ols_slope(js, w.log_ratio);
    }

    LogProducts ab = log_products(w, false);
    LogProducts gap = log_products(w, true);
    r.ab_sup = std::exp(ab.sup);
    r.ab_tailmax = std::exp(ab.tailmax);
    r.gap_sup = std::exp(gap.sup);
    r.gap_tailmax = std::exp(gap.tailmax);

    r.convexity_ok = convexity_evidence(w);
    r.c1_bound = c1_tail(spec, w.J1);

    try {
        auto [af, ag] = holder_upper_bounds(spec, J0, J1);
        r.holder_alpha_freq = af;
        r.holder_alpha_gap = ag;
    } catch (const DegenerateRegression&) {
        r.holder_alpha_freq = std::numeric_limits<double>::quiet_NaN();
        r.holder_alpha_gap = std::numeric_limits<double>::quiet_NaN();
    }

    if (spec.family() == Family::custom) {
        r.verdict = heuristic_verdict(w, gap, ab, r.ratio_min);
        r.verdict_basis = VerdictBasis::finite_window_heuristic;
    } else {
        r.verdict = symbolic_verdict(spec);
        r.verdict_basis = VerdictBasis::symbolic_family_rule;
    }
    if (r.verdict == Verdict::c1 && !r.c1_bound)
        r.verdict = Verdict::inconclusive; // C1 claims need a finite bound
    return r;
}

ConvexityResult convexity_check(const SeriesSpec& spec, std::int64_t J0,
                                std::int64_t J1) {
    WindowData w = collect(spec, J0, J1);

    // structural precondition: b_j = j/|a_j| to 1e-12 relative
    for (const auto& s : w.samples) {
        double log_phi = std::log(static_cast<double>(s.j)) - s.log_amp;
        if (std::abs(s.log_b - log_phi) > 2e-12)
            throw NotApplicable("frequencies are not j/|a_j| for this spec");
    }

    ConvexityResult res;
    res.convex = true;
    res.min_gap_product = kInf;
    const auto& s = w.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && i + 1 < s.size()) {
            double L0 = std::log(static_cast<double>(s[i - 1].j)) - s[i - 1].log_amp;
            double L1 = std::log(static_cast<double>(s[i].j)) - s[i].log_amp;
            double L2 = std::log(static_cast<double>(s[i + 1].j)) - s[i + 1].log_amp;
            double d = std::exp(L2 - L1) + std::exp(L0 - L1) - 2.0;
            double tol = 1e-12 * (std::exp(L2 - L1) + std::exp(L0 - L1) + 2.0);
            if (d < -tol) {
                res.convex = false;
                res.witness = s[i].j;
                break;
            }
        }
        if (i + 1 < s.size() && s[i + 1].log_amp > s[i].log_amp + 1e-12) {
            res.convex = false;
            res.witness = s[i + 1].j;
            break;
        }
    }
    if (res.convex) {
        for (const auto& smp : w.samples)
            res.min_gap_product =
                std::min(res.min_gap_product, std::exp(smp.log_amp + smp.log_delta_b));
        if (!(res.min_gap_product >= 1.0 - 1e-9))
            throw DomainError("convexity holds but |a_j| delta_b_j < 1; "
                              "inconsistent samples");
    }
    return res;
}

std::pair<double, double> holder_upper_bounds(const SeriesSpec& spec,
                                              std::int64_t J0, std::int64_t J1) {
    const auto& P = spec.params();
    switch (spec.family()) {
        case Family::f_theta:
            return {P.theta, P.theta};
        case Family::weierstrass_cos:
        case Family::weierstrass_sin: {
            // delta_b_j = (1 - 1/b) b^j scales like b^j, so both routes agree
            double v = std::log(P.a) / std::log(P.b);
            return {v, v};
        }
        case Family::darboux:
            return {1.0, 1.0};
        case Family::gap_example:
            return {1.0, 1.0};
        case Family::power:
            return {P.p / P.q, P.p / (P.q - 1.0)};
        case Family::riemann:
            return {1.0, 2.0}; // p = q = 2 closed forms
        case Family::iterated_log:
            return {0.5, 1.0};
        case Family::custom:
            break;
    }

    // least-squares estimate of lim log(1/|a_j|)/log b_j and the gap variant
    WindowData w = collect(spec, J0, J1);
    double lb_min = kInf, lb_max = -kInf;
    for (const auto& s : w.samples) {
        lb_min = std::min(lb_min, s.log_b);
        lb_max = std::max(lb_max, s.log_b);
    }
    if (lb_max - lb_min < 2.0 * std::log(10.0))
        throw DegenerateRegression("frequencies span fewer than 2 decades");
    std::vector<double> xb, xg, y;
    for (const auto& s : w.samples) {
        xb.push_back(s.log_b);
        xg.push_back(s.log_delta_b);
        y.push_back(-s.log_amp);
    }
    return {ols_slope(xb, y), ols_slope(xg, y)};
}

GlobalHolder global_holder_power(double p, double q) {
    if (!(p > 1.0) || !(q > p - 1.0))
        throw OutOfRange("need p > 1 and q > p - 1");
    return {(p - 1.0) / q, 1.0 / q};
}

} // namespace lacuna
