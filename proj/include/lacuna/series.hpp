#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lacuna/dd.hpp"
#include "lacuna/errors.hpp"

namespace lacuna {

enum class Family {
    f_theta,
    weierstrass_cos,
    weierstrass_sin,
    darboux,
    gap_example,
    power,
    riemann,
    iterated_log,
    custom,
};

enum class Variant { complex_sum, real_part, imag_part };

const char* family_name(Family f);
const char* variant_name(Variant v);

// Rules for a user-defined series.  Amplitudes are supplied in log/phase
// form (log|a_j|, arg a_j) so factorial-scale magnitudes survive; the tail
// rule, when present, must bound sum_{j>N} |a_j|.
struct CustomRule {
    std::function<std::pair<double, double>(std::int64_t)> amplitude;
    std::function<double(std::int64_t)> frequency;
    std::function<double(std::int64_t)> tail_bound; // optional
};

// Immutable description of a lacunary series sum a_j e^{i b_j t}.
// Construction validates parameter ranges, summability of |a_j| and
// monotone positive frequencies on a spot-check window; frequency sanity
// is re-checked lazily on term access.
class SeriesSpec {
public:
    struct Params {
        double theta = 0.0; // f_theta
        double a = 0.0;     // weierstrass / gap_example / iterated_log
        double b = 0.0;     // weierstrass
        double p = 0.0;     // power / gap_example exponent
        double q = 0.0;     // power
        int n = 0;          // iterated_log depth
    };

    static SeriesSpec f_theta(double theta, bool allow_out_of_range = false);
    static SeriesSpec weierstrass_cos(double a, double b, bool allow_out_of_range = false);
    static SeriesSpec weierstrass_sin(double a, double b, bool allow_out_of_range = false);
    static SeriesSpec darboux();
    static SeriesSpec gap_example(double a, double p);
    static SeriesSpec power(double p, double q);
    static SeriesSpec riemann();
    static SeriesSpec iterated_log(int n, double a);
    static SeriesSpec custom(std::int64_t start_index, CustomRule rule,
                             Variant variant = Variant::complex_sum);

    SeriesSpec with_variant(Variant v) const;

    Family family() const { return family_; }
    Variant variant() const { return variant_; }
    std::int64_t start_index() const { return start_; }
    const Params& params() const { return params_; }
    const CustomRule& rule() const { return rule_; }
    bool has_tail_rule() const;

    // true when frequencies are exact multiples of pi (phases are then
    // reduced modulo 2 before the final multiplication by pi)
    bool pi_scaled_phase() const { return family_ == Family::riemann; }

    std::string describe() const;

private:
    SeriesSpec() = default;

    Family family_ = Family::custom;
    Variant variant_ = Variant::complex_sum;
    std::int64_t start_ = 0;
    Params params_;
    CustomRule rule_;

    friend struct SeriesAccess;
};

// One term's bookkeeping.  log_b / log_delta_b stay finite far beyond the
// double range of b itself; the plain fields overflow to +inf there.
struct SequenceSample {
    std::int64_t j = 0;
    double log_amp = 0.0; // log |a_j|
    double phase = 0.0;   // arg a_j
    double b = 0.0;       // frequency, radians per unit t
    double delta_b = 0.0; // min(b_j - b_{j-1}, b_{j+1} - b_j), b_{start-1} := 0
    double log_b = 0.0;
    double log_delta_b = 0.0;
};

struct EvalResult {
    std::complex<double> value{0.0, 0.0};
    std::int64_t terms_used = 0;
    double tail_bound = 0.0; // upper bound on sum_{j>N} |a_j|
};

struct SamplePoint {
    double t = 0.0;
    double re = 0.0;
    double im = 0.0;
};

SequenceSample term(const SeriesSpec& spec, std::int64_t j);

// log b_j without representability limits (internal building block for
// window clipping and ratio scans; no DomainError on double overflow)
double log_frequency(const SeriesSpec& spec, std::int64_t j);

double tail_bound(const SeriesSpec& spec, std::int64_t N);

std::int64_t truncation_index(const SeriesSpec& spec, double eps,
                              std::int64_t n_max = 10'000'000);

EvalResult eval_partial(const SeriesSpec& spec, double t, std::int64_t N);

std::vector<SamplePoint> sample(const SeriesSpec& spec, double t0, double t1,
                                int points, double eps,
                                std::optional<std::int64_t> term_override = std::nullopt);

// Precomputed per-term data for repeated evaluations over a j-range.
// Immutable after construction; concurrent reads are safe.
class SeriesEvaluator {
public:
    SeriesEvaluator(const SeriesSpec& spec, std::int64_t j_hi);

    const SeriesSpec& spec() const { return spec_; }
    std::int64_t j_lo() const { return j_lo_; }
    std::int64_t j_hi() const { return j_hi_; }

    // complex-valued partial sum over j in [j0, j1]; throws
    // PhasePrecisionLoss when some evaluated b_j |t| >= 2^53
    std::complex<double> range_sum(double t, std::int64_t j0, std::int64_t j1) const;

    // same with t carried in double-double (for t formed from products or
    // quotients whose rounding would decohere high-frequency phases)
    std::complex<double> range_sum_dd(const dd& t, std::int64_t j0, std::int64_t j1) const;

    // largest N in [j_lo, j_hi] whose phase b_N * t_abs stays below 2^53,
    // or j_lo - 1 if none
    std::int64_t phase_safe_limit(double t_abs) const;

    double amp(std::int64_t j) const { return amp_[idx(j)]; }
    double amp_phase(std::int64_t j) const { return phase_[idx(j)]; }
    double log_amp(std::int64_t j) const { return log_amp_[idx(j)]; }
    double log_b(std::int64_t j) const { return log_b_[idx(j)]; }
    const dd& phase_base(std::int64_t j) const { return freq_[idx(j)]; }

    std::complex<double> term_value(std::int64_t j, double t) const;

private:
    std::size_t idx(std::int64_t j) const;

    SeriesSpec spec_;
    std::int64_t j_lo_ = 0;
    std::int64_t j_hi_ = 0;
    bool pi_scaled_ = false;
    std::vector<dd> freq_; // b_j, or b_j / pi for pi-scaled families
    std::vector<double> amp_, log_amp_, phase_, log_b_;
};

} // namespace lacuna
