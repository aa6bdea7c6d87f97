#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lacuna/series.hpp"

namespace lacuna {

enum class Verdict {
    c1,
    nowhere_differentiable,
    nowhere_differentiable_non_lipschitz,
    inconclusive,
};

enum class VerdictBasis { symbolic_family_rule, finite_window_heuristic };

const char* verdict_name(Verdict v);
const char* verdict_basis_name(VerdictBasis b);

struct ConditionReport {
    std::int64_t window_lo = 0;
    std::int64_t window_hi = 0; // after clipping against double overflow of b

    double ratio_min = 0.0;   // min b_{j+1}/b_j over the window
    double ratio_trend = 0.0; // least-squares slope of log ratio vs j

    double ab_sup = 0.0;      // sup |a_j| b_j over the window
    double ab_tailmax = 0.0;  // max over the last quarter of the window
    double gap_sup = 0.0;     // same for |a_j| delta_b_j
    double gap_tailmax = 0.0;

    bool convexity_ok = false; // second differences of j/|a_j| >= 0 and |a_j| nonincreasing

    std::optional<double> c1_bound; // tail of sum |a_j| b_j; empty = divergent/unknown

    double holder_alpha_freq = 0.0;
    double holder_alpha_gap = 0.0;

    Verdict verdict = Verdict::inconclusive;
    VerdictBasis verdict_basis = VerdictBasis::finite_window_heuristic;
};

// Fills the numeric evidence fields from term samples over [J0, J1]
// (clipped where b_j leaves the double range) and assigns the verdict:
// closed-form rules for the built-in families, a finite-window heuristic
// for custom rules ("does not tend to 0" read as tail max >= 0.5 * sup).
ConditionReport hypothesis_scan(const SeriesSpec& spec, std::int64_t J0,
                                std::int64_t J1);

struct ConvexityResult {
    bool convex = false;
    std::optional<std::int64_t> witness; // first violating j when not convex
    double min_gap_product = 0.0;        // min |a_j| delta_b_j over the window
};

// Checks second differences of phi(j) = j/|a_j| and monotone decay of
// |a_j|; requires b_j = j/|a_j| structurally (NotApplicable otherwise).
// A convex result implies |a_j| delta_b_j >= 1 on the window, which is
// verified before returning.
ConvexityResult convexity_check(const SeriesSpec& spec, std::int64_t J0,
                                std::int64_t J1);

// asymptotic exponents alpha* with sup |a_j| b_j^alpha < infinity
// (first) and sup |a_j| (delta_b_j)^alpha < infinity (second); closed
// forms for built-ins, log-log regression for custom rules
std::pair<double, double> holder_upper_bounds(const SeriesSpec& spec,
                                              std::int64_t J0, std::int64_t J1);

struct GlobalHolder {
    double alpha = 0.0;          // (p-1)/q
    double split_exponent = 0.0; // optimal N ~ |h|^{-theta}, theta = 1/q
};

// proven global Holder order for the polynomial family, valid for p > 1,
// q > p-1
GlobalHolder global_holder_power(double p, double q);

} // namespace lacuna
