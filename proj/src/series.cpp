#include "lacuna/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lacuna/parallel.hpp"
#include "lacuna/summation.hpp"

namespace lacuna {

namespace {

constexpr double kPhaseGate = 9007199254740992.0; // 2^53
constexpr double kInf = std::numeric_limits<double>::infinity();

// E_n = exp^n(1); thresholds where the n-fold logarithm turns positive.
// E_3 carried as a double-double (its fractional part matters for the
// distance j - E_3 that controls Log_4 near the start index).
constexpr dd kE2{15.154262241479264, -7.179620621124426e-17};
constexpr dd kE3{3814279.1047602207, -1.477812531994809e-10};

std::int64_t iterated_log_start(int n) {
    switch (n) {
        case 2: return static_cast<std::int64_t>(std::floor(ddc::e.hi)) + 1;  // 3
        case 3: return static_cast<std::int64_t>(std::floor(kE2.hi)) + 1;     // 16
        case 4: return static_cast<std::int64_t>(std::floor(kE3.hi)) + 1;     // 3814280
        default: return -1;
    }
}

// Log_1..Log_n of j in double-double.  The chain is what keeps Log_n
// meaningful near E_{n-1}: at n = 4 the innermost value sits ~6e-9 above
// the fixed point 1 and plain doubles would surrender half their digits.
void iterated_log_chain(std::int64_t j, int n, dd* L) {
    L[1] = dd_log(dd(static_cast<double>(j)));
    for (int k = 2; k <= n; ++k) L[k] = dd_log(L[k - 1]);
}

struct TermData {
    double log_amp = 0.0;
    double phase = 0.0;
    double log_b = 0.0;
    dd freq;            // b_j, or j^2 for the pi-scaled family
};

dd dd_factorial(std::int64_t m) {
    dd acc(1.0);
    for (std::int64_t k = 2; k <= m; ++k) {
        if (acc.hi > 1e306) return dd(kInf);
        acc = mul(acc, static_cast<double>(k));
    }
    return acc;
}

} // namespace

struct SeriesAccess {
    static SeriesSpec make(Family f, Variant v, std::int64_t start,
                           SeriesSpec::Params params, CustomRule rule = {}) {
        SeriesSpec s;
        s.family_ = f;
        s.variant_ = v;
        s.start_ = start;
        s.params_ = params;
        s.rule_ = std::move(rule);
        return s;
    }
};

const char* family_name(Family f) {
    switch (f) {
        case Family::f_theta: return "f_theta";
        case Family::weierstrass_cos: return "weierstrass_cos";
        case Family::weierstrass_sin: return "weierstrass_sin";
        case Family::darboux: return "darboux";
        case Family::gap_example: return "gap_example";
        case Family::power: return "power";
        case Family::riemann: return "riemann";
        case Family::iterated_log: return "iterated_log";
        case Family::custom: return "custom";
    }
    return "?";
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::complex_sum: return "complex";
        case Variant::real_part: return "real_part";
        case Variant::imag_part: return "imag_part";
    }
    return "?";
}

namespace {

TermData term_data(const SeriesSpec& spec, std::int64_t j) {
    const auto& P = spec.params();
    TermData d;
    switch (spec.family()) {
        case Family::f_theta: {
            d.log_amp = -P.theta * static_cast<double>(j) * ddc::ln2.hi;
            d.log_b = static_cast<double>(j) * ddc::ln2.hi;
            d.freq = (j <= 1023) ? dd(std::ldexp(1.0, static_cast<int>(j)))
                                 : dd(kInf);
            break;
        }
        case Family::weierstrass_cos:
        case Family::weierstrass_sin: {
            d.log_amp = -static_cast<double>(j) * std::log(P.a);
            d.log_b = static_cast<double>(j) * std::log(P.b);
            d.freq = (d.log_b < 709.0) ? dd_powi(dd(P.b), j) : dd(kInf);
            break;
        }
        case Family::darboux: {
            // a_j = 1/j! = (j+1)/(j+1)!, so log_amp + log_b gives
            // log(j+1) exactly and the product law |a_j| b_j = j+1 is
            // preserved at the level of the stored logarithms
            d.log_b = std::lgamma(static_cast<double>(j + 2));
            d.log_amp = std::log(static_cast<double>(j + 1)) - d.log_b;
            d.freq = (d.log_b < 709.0) ? dd_factorial(j + 1) : dd(kInf);
            break;
        }
        case Family::gap_example: {
            std::int64_t m = j / 2;
            double lna = std::log(P.a);
            d.log_amp = -static_cast<double>(j) * lna;
            dd even = dd_powi(dd(P.a), 2 * m);
            if (j % 2 == 0) {
                d.log_b = 2.0 * static_cast<double>(m) * lna;
                d.freq = even;
            } else {
                double ap = std::pow(P.a, -P.p);
                d.log_b = 2.0 * static_cast<double>(m) * lna + std::log1p(ap);
                d.freq = mul(even, add(dd_pow(dd(P.a), -P.p), 1.0));
            }
            if (d.log_b >= 709.0) d.freq = dd(kInf);
            break;
        }
        case Family::power: {
            double lj = std::log(static_cast<double>(j));
            d.log_amp = -P.p * lj;
            d.log_b = P.q * lj;
            d.freq = dd_pow(dd(static_cast<double>(j)), P.q);
            break;
        }
        case Family::riemann: {
            double lj = std::log(static_cast<double>(j));
            d.log_amp = -2.0 * lj;
            d.log_b = std::log(ddc::pi.hi) + 2.0 * lj;
            d.freq = dd_square_of_int(j); // in units of pi
            break;
        }
        case Family::iterated_log: {
            int n = P.n;
            dd L[5];
            iterated_log_chain(j, n, L);
            dd S(0.0);
            for (int k = 1; k < n; ++k) S = add(S, dd_log(L[k]));
            S = add(S, mul(dd_log(L[n]), P.a));
            double lj = std::log(static_cast<double>(j));
            d.log_amp = -(lj + S.to_double());
            d.log_b = lj - d.log_amp; // b_j = j / |a_j| exactly
            dd f = dd_square_of_int(j);
            for (int k = 1; k < n; ++k) f = mul(f, L[k]);
            d.freq = mul(f, dd_pow(L[n], P.a));
            break;
        }
        case Family::custom: {
            auto [la, ph] = spec.rule().amplitude(j);
            double b = spec.rule().frequency(j);
            if (!std::isfinite(b) || b <= 0.0)
                throw DomainError("custom frequency not finite/positive at j=" +
                                  std::to_string(j));
            // log-amplitude -inf encodes a vanishing term; NaN or +inf do not
            if (std::isnan(la) || la == std::numeric_limits<double>::infinity())
                throw DomainError("custom amplitude invalid at j=" +
                                  std::to_string(j));
            d.log_amp = la;
            d.phase = ph;
            d.log_b = std::log(b);
            d.freq = dd(b);
            break;
        }
    }
    return d;
}

double amp_value(const SeriesSpec& spec, std::int64_t j, double log_amp) {
    // prefer directly rounded powers over exp(log) where a closed form exists
    const auto& P = spec.params();
    switch (spec.family()) {
        case Family::f_theta:
            return std::exp2(-P.theta * static_cast<double>(j));
        case Family::weierstrass_cos:
        case Family::weierstrass_sin:
            return std::pow(P.a, -static_cast<double>(j));
        case Family::gap_example:
            return std::pow(P.a, -static_cast<double>(j));
        case Family::power:
            return std::pow(static_cast<double>(j), -P.p);
        case Family::riemann:
            return 1.0 / (static_cast<double>(j) * static_cast<double>(j));
        default:
            return std::exp(log_amp);
    }
}

} // namespace

double log_frequency(const SeriesSpec& spec, std::int64_t j) {
    if (j < spec.start_index())
        throw IndexBelowStart("j=" + std::to_string(j) + " < start_index " +
                              std::to_string(spec.start_index()));
    return term_data(spec, j).log_b;
}

SequenceSample term(const SeriesSpec& spec, std::int64_t j) {
    if (j < spec.start_index())
        throw IndexBelowStart("j=" + std::to_string(j) + " < start_index " +
                              std::to_string(spec.start_index()));
    TermData d = term_data(spec, j);
    if (!std::isfinite(d.log_b))
        throw DomainError("b_j not finite/positive at j=" + std::to_string(j));

    bool first = (j == spec.start_index());
    TermData prev;
    if (!first) prev = term_data(spec, j - 1);
    TermData next = term_data(spec, j + 1);

    // lazy re-check of strict monotonicity around j
    double log_prev = first ? -kInf : prev.log_b;
    if (!(log_prev < d.log_b) || !(d.log_b < next.log_b))
        throw DomainError("frequencies not strictly increasing at j=" +
                          std::to_string(j));

    // gaps in log space; b_{start-1} := 0 makes the lower gap b_j itself
    double log_gap_lo =
        first ? d.log_b : d.log_b + std::log1p(-std::exp(log_prev - d.log_b));
    double log_gap_hi = next.log_b + std::log1p(-std::exp(d.log_b - next.log_b));
    double log_delta = std::min(log_gap_lo, log_gap_hi);

    SequenceSample s;
    s.j = j;
    s.log_amp = d.log_amp;
    s.phase = d.phase;
    s.log_b = d.log_b;
    s.log_delta_b = log_delta;

    dd b = spec.pi_scaled_phase() ? mul(d.freq, ddc::pi) : d.freq;
    s.b = b.to_double();
    if (std::isfinite(s.b) && std::isfinite(next.freq.hi)) {
        dd bn = spec.pi_scaled_phase() ? mul(next.freq, ddc::pi) : next.freq;
        double gap_hi = sub(bn, b).to_double();
        double gap_lo = s.b;
        if (!first) {
            dd bp = spec.pi_scaled_phase() ? mul(prev.freq, ddc::pi) : prev.freq;
            gap_lo = sub(b, bp).to_double();
        }
        s.delta_b = std::min(gap_lo, gap_hi);
    } else {
        s.delta_b = std::exp(log_delta);
    }
    return s;
}

double tail_bound(const SeriesSpec& spec, std::int64_t N) {
    if (N < spec.start_index())
        throw IndexBelowStart("N=" + std::to_string(N) + " < start_index");
    const auto& P = spec.params();
    double n = static_cast<double>(N);
    switch (spec.family()) {
        case Family::f_theta:
            return std::exp2(-P.theta * (n + 1.0)) / (1.0 - std::exp2(-P.theta));
        case Family::weierstrass_cos:
        case Family::weierstrass_sin:
        case Family::gap_example:
            return std::pow(P.a, -n) / (P.a - 1.0);
        case Family::darboux:
            // sum_{j>N} 1/j! <= 2/(N+1)!
            return std::exp(ddc::ln2.hi - std::lgamma(n + 2.0));
        case Family::power:
            // integral comparison, sum_{j>N} j^-p <= N^{1-p}/(p-1)
            return std::pow(n, 1.0 - P.p) / (P.p - 1.0);
        case Family::riemann:
            return 1.0 / n;
        case Family::iterated_log: {
            dd L[5];
            iterated_log_chain(N, P.n, L);
            return dd_pow(L[P.n], 1.0 - P.a).to_double() / (P.a - 1.0);
        }
        case Family::custom: {
            if (!spec.rule().tail_bound)
                throw NoBoundAvailable("custom spec has no tail bound rule");
            double v = spec.rule().tail_bound(N);
            if (!(v >= 0.0))
                throw DomainError("custom tail bound negative/NaN");
            return v;
        }
    }
    return kInf;
}

std::int64_t truncation_index(const SeriesSpec& spec, double eps,
                              std::int64_t n_max) {
    if (!(eps > 0.0)) throw OutOfRange("eps must be positive");
    std::int64_t start = spec.start_index();
    if (tail_bound(spec, start) <= eps) return start;

    // doubling until the bound passes, then bisect the exact threshold
    std::int64_t lo = start, hi = start;
    std::int64_t step = 1;
    for (;;) {
        hi = start + step;
        if (hi > n_max) {
            if (tail_bound(spec, n_max) <= eps) {
                hi = n_max;
                break;
            }
            throw CapExceeded("no N <= " + std::to_string(n_max) +
                              " reaches tail eps " + std::to_string(eps));
        }
        if (tail_bound(spec, hi) <= eps) break;
        lo = hi;
        step *= 2;
    }
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (tail_bound(spec, mid) <= eps)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// SeriesEvaluator

SeriesEvaluator::SeriesEvaluator(const SeriesSpec& spec, std::int64_t j_hi)
    : spec_(spec),
      j_lo_(spec.start_index()),
      j_hi_(std::max(j_hi, spec.start_index())),
      pi_scaled_(spec.pi_scaled_phase()) {
    std::size_t count = static_cast<std::size_t>(j_hi_ - j_lo_ + 1);
    freq_.resize(count);
    amp_.resize(count);
    log_amp_.resize(count);
    phase_.resize(count);
    log_b_.resize(count);

    if (spec.family() == Family::darboux) {
        // incremental factorial keeps table construction linear
        dd f = dd_factorial(j_lo_ + 1);
        for (std::int64_t j = j_lo_; j <= j_hi_; ++j) {
            std::size_t i = static_cast<std::size_t>(j - j_lo_);
            double lb = std::lgamma(static_cast<double>(j + 2));
            log_b_[i] = lb;
            log_amp_[i] = std::log(static_cast<double>(j + 1)) - lb;
            phase_[i] = 0.0;
            amp_[i] = std::exp(log_amp_[i]);
            freq_[i] = f;
            if (f.hi > 1e306)
                f = dd(kInf);
            else
                f = mul(f, static_cast<double>(j + 2));
        }
        return;
    }

    for (std::int64_t j = j_lo_; j <= j_hi_; ++j) {
        std::size_t i = static_cast<std::size_t>(j - j_lo_);
        TermData d = term_data(spec_, j);
        freq_[i] = d.freq;
        log_amp_[i] = d.log_amp;
        phase_[i] = d.phase;
        log_b_[i] = d.log_b;
        amp_[i] = amp_value(spec_, j, d.log_amp);
    }
}

std::size_t SeriesEvaluator::idx(std::int64_t j) const {
    return static_cast<std::size_t>(j - j_lo_);
}

std::int64_t SeriesEvaluator::phase_safe_limit(double t_abs) const {
    if (t_abs == 0.0) return j_hi_;
    // frequencies are monotone; find the last safe index by binary search
    auto safe = [&](std::int64_t j) {
        double scale = pi_scaled_ ? freq_[idx(j)].hi * ddc::pi.hi : freq_[idx(j)].hi;
        return scale * t_abs < kPhaseGate;
    };
    if (safe(j_hi_)) return j_hi_;
    if (!safe(j_lo_)) return j_lo_ - 1;
    std::int64_t lo = j_lo_, hi = j_hi_;
    while (hi - lo > 1) {
        std::int64_t mid = lo + (hi - lo) / 2;
        (safe(mid) ? lo : hi) = mid;
    }
    return lo;
}

std::complex<double> SeriesEvaluator::term_value(std::int64_t j, double t) const {
    std::size_t i = idx(j);
    double a = amp_[i];
    if (a == 0.0) return {0.0, 0.0};
    dd r;
    if (t == 0.0) {
        r = dd(0.0);
    } else if (pi_scaled_) {
        r = mul(ddc::pi, reduce_two(mul(freq_[i], t)));
    } else {
        r = reduce_two_pi(mul(freq_[i], t));
    }
    if (phase_[i] != 0.0) r = add(r, phase_[i]);
    std::complex<double> u = cis_reduced(r);
    return {a * u.real(), a * u.imag()};
}

std::complex<double> SeriesEvaluator::range_sum_dd(const dd& t, std::int64_t j0,
                                                   std::int64_t j1) const {
    if (j0 < j_lo_ || j1 > j_hi_)
        throw OutOfRange("range outside evaluator table");
    if (j1 < j0) return {0.0, 0.0};
    std::int64_t limit = phase_safe_limit(std::abs(t.hi));
    if (limit < j1)
        throw PhasePrecisionLoss(
            "b_j |t| >= 2^53 for j=" + std::to_string(limit + 1) +
            "; phase not representable");
    const bool t_zero = (t.hi == 0.0 && t.lo == 0.0);
    ComplexSum acc;
    for (std::int64_t j = j0; j <= j1; ++j) {
        std::size_t i = idx(j);
        double a = amp_[i];
        if (a == 0.0) continue;
        dd r;
        if (t_zero) {
            r = dd(0.0);
        } else if (pi_scaled_) {
            r = mul(ddc::pi, reduce_two(mul(freq_[i], t)));
        } else {
            r = reduce_two_pi(mul(freq_[i], t));
        }
        if (phase_[i] != 0.0) r = add(r, phase_[i]);
        std::complex<double> u = cis_reduced(r);
        acc.add({a * u.real(), a * u.imag()});
    }
    return acc.value();
}

std::complex<double> SeriesEvaluator::range_sum(double t, std::int64_t j0,
                                                std::int64_t j1) const {
    return range_sum_dd(dd(t), j0, j1);
}

// ---------------------------------------------------------------------------

EvalResult eval_partial(const SeriesSpec& spec, double t, std::int64_t N) {
    if (N < spec.start_index())
        throw IndexBelowStart("N below start_index");
    SeriesEvaluator ev(spec, N);
    std::complex<double> v = ev.range_sum(t, spec.start_index(), N);
    switch (spec.variant()) {
        case Variant::real_part: v = {v.real(), 0.0}; break;
        case Variant::imag_part: v = {v.imag(), 0.0}; break;
        case Variant::complex_sum: break;
    }
    EvalResult r;
    r.value = v;
    r.terms_used = N - spec.start_index() + 1;
    if (spec.family() == Family::custom && !spec.has_tail_rule())
        r.tail_bound = kInf; // rigorous, if useless
    else
        r.tail_bound = tail_bound(spec, N);
    return r;
}

std::vector<SamplePoint> sample(const SeriesSpec& spec, double t0, double t1,
                                int points, double eps,
                                std::optional<std::int64_t> term_override) {
    if (!(t0 < t1)) throw OutOfRange("need t0 < t1");
    if (points < 2) throw OutOfRange("need points >= 2");
    std::int64_t N;
    if (term_override) {
        if (*term_override < 1) throw OutOfRange("term override must be >= 1");
        N = spec.start_index() + *term_override - 1;
    } else {
        N = truncation_index(spec, eps);
    }
    SeriesEvaluator ev(spec, N);
    std::vector<SamplePoint> out(static_cast<std::size_t>(points));
    double span = t1 - t0;
    parallel_for(points, [&](long long i) {
        double t = (i == points - 1)
                       ? t1
                       : t0 + span * (static_cast<double>(i) /
                                      static_cast<double>(points - 1));
        auto v = ev.range_sum(t, spec.start_index(), N);
        out[static_cast<std::size_t>(i)] = {t, v.real(), v.imag()};
    });
    for (int i = 1; i < points; ++i)
        if (!(out[i].t > out[i - 1].t))
            throw DomainError("sample grid not strictly increasing");
    return out;
}

// ---------------------------------------------------------------------------
// construction & validation

namespace {

void spot_check_frequencies(const SeriesSpec& spec) {
    double prev = -kInf;
    for (std::int64_t j = spec.start_index(); j < spec.start_index() + 16; ++j) {
        double lb = term_data(spec, j).log_b;
        if (!std::isfinite(lb))
            throw InvalidSpec("frequency not finite/positive at j=" +
                              std::to_string(j));
        if (!(lb > prev))
            throw InvalidSpec("frequencies not strictly increasing at j=" +
                              std::to_string(j));
        prev = lb;
    }
}

void check_summable(const SeriesSpec& spec) {
    if (spec.family() == Family::custom && !spec.has_tail_rule())
        return; // nothing to verify against; tail queries will refuse
    double t = tail_bound(spec, spec.start_index());
    if (!std::isfinite(t))
        throw InvalidSpec("sum of |a_j| does not converge for these parameters");
}

SeriesSpec finish(SeriesSpec s) {
    spot_check_frequencies(s);
    check_summable(s);
    return s;
}

} // namespace

bool SeriesSpec::has_tail_rule() const {
    return static_cast<bool>(rule_.tail_bound);
}

SeriesSpec SeriesSpec::f_theta(double theta, bool allow_out_of_range) {
    if (!(theta > 0.0))
        throw InvalidSpec("f_theta requires theta > 0");
    if (!allow_out_of_range && !(theta <= 1.0))
        throw InvalidSpec("f_theta requires theta in ]0,1] (pass the override "
                          "flag to explore theta > 1)");
    Params p;
    p.theta = theta;
    return finish(SeriesAccess::make(Family::f_theta, Variant::complex_sum, 0, p));
}

namespace {
SeriesSpec make_weierstrass(Family fam, Variant var, double a, double b,
                            bool allow_out_of_range) {
    if (!(a > 1.0)) throw InvalidSpec("weierstrass requires a > 1");
    if (!(b > 1.0)) throw InvalidSpec("weierstrass requires b > 1");
    if (!allow_out_of_range && !(b >= a))
        throw InvalidSpec("weierstrass requires b >= a (pass the override "
                          "flag to explore b < a)");
    SeriesSpec::Params p;
    p.a = a;
    p.b = b;
    return SeriesAccess::make(fam, var, 0, p);
}
} // namespace

SeriesSpec SeriesSpec::weierstrass_cos(double a, double b, bool allow_out_of_range) {
    return finish(make_weierstrass(Family::weierstrass_cos, Variant::real_part,
                                   a, b, allow_out_of_range));
}

SeriesSpec SeriesSpec::weierstrass_sin(double a, double b, bool allow_out_of_range) {
    return finish(make_weierstrass(Family::weierstrass_sin, Variant::imag_part,
                                   a, b, allow_out_of_range));
}

SeriesSpec SeriesSpec::darboux() {
    return finish(SeriesAccess::make(Family::darboux, Variant::imag_part, 0, {}));
}

SeriesSpec SeriesSpec::gap_example(double a, double p) {
    if (!(a > 1.0)) throw InvalidSpec("gap_example requires a > 1");
    if (!(1.0 + std::pow(a, -p) < a * a))
        throw InvalidSpec("gap_example requires 1 + a^-p < a^2");
    Params prm;
    prm.a = a;
    prm.p = p;
    return finish(SeriesAccess::make(Family::gap_example, Variant::complex_sum, 0, prm));
}

SeriesSpec SeriesSpec::power(double p, double q) {
    if (!(p > 1.0)) throw InvalidSpec("power requires p > 1");
    if (!(q > 0.0)) throw InvalidSpec("power requires q > 0");
    Params prm;
    prm.p = p;
    prm.q = q;
    return finish(SeriesAccess::make(Family::power, Variant::complex_sum, 1, prm));
}

SeriesSpec SeriesSpec::riemann() {
    return finish(SeriesAccess::make(Family::riemann, Variant::imag_part, 1, {}));
}

SeriesSpec SeriesSpec::iterated_log(int n, double a) {
    if (n < 2) throw InvalidSpec("iterated_log requires n >= 2");
    if (n > 4)
        throw InvalidSpec("iterated_log start index floor(E_{n-1})+1 exceeds "
                          "the representable range for n > 4");
    if (!(a > 1.0)) throw InvalidSpec("iterated_log requires a > 1");
    Params prm;
    prm.n = n;
    prm.a = a;
    return finish(SeriesAccess::make(Family::iterated_log, Variant::imag_part,
                                     iterated_log_start(n), prm));
}

SeriesSpec SeriesSpec::custom(std::int64_t start_index, CustomRule rule,
                              Variant variant) {
    if (!rule.amplitude || !rule.frequency)
        throw InvalidSpec("custom spec needs amplitude and frequency rules");
    return finish(SeriesAccess::make(Family::custom, variant, start_index,
                                     {}, std::move(rule)));
}

SeriesSpec SeriesSpec::with_variant(Variant v) const {
    SeriesSpec s = *this;
    s.variant_ = v;
    return s;
}

std::string SeriesSpec::describe() const {
    std::ostringstream os;
    os << family_name(family_);
    switch (family_) {
        case Family::f_theta: os << "(theta=" << params_.theta << ")"; break;
        case Family::weierstrass_cos:
        case Family::weierstrass_sin:
            os << "(a=" << params_.a << ", b=" << params_.b << ")";
            break;
        case Family::gap_example:
            os << "(a=" << params_.a << ", p=" << params_.p << ")";
            break;
        case Family::power:
            os << "(p=" << params_.p << ", q=" << params_.q << ")";
            break;
        case Family::iterated_log:
            os << "(n=" << params_.n << ", a=" << params_.a << ")";
            break;
        default: break;
    }
    return os.str();
}

} // namespace lacuna
