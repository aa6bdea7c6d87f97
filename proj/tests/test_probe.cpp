#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "lacuna/conditions.hpp"
#include "lacuna/extraction.hpp"
#include "lacuna/probe.hpp"

using namespace lacuna;

namespace {

CustomRule n_term_rule(int n) {
    CustomRule r;
    r.amplitude = [n](std::int64_t j) {
        return std::pair{j < n ? 0.0 : -std::numeric_limits<double>::infinity(), 0.0};
    };
    r.frequency = [](std::int64_t j) { return std::ldexp(1.0, static_cast<int>(j)); };
    r.tail_bound = [n](std::int64_t N) { return N >= n - 1 ? 0.0 : static_cast<double>(n); };
    return r;
}

} // namespace

TEST_CASE("difference quotients: dyadic band for f_theta(1)") {
    auto tr = difference_quotients(SeriesSpec::f_theta(1.0), 0.0,
                                   ScaleRule::inverse_b_k, 4, 16);
    REQUIRE(tr.scales.size() == 13);
    for (double b : tr.band_values) CHECK(b == 1.0); // 2^{(1-theta)k} with theta = 1
    for (std::size_t i = 1; i < tr.scales.size(); ++i)
        CHECK(tr.scales[i] < tr.scales[i - 1]);
}

TEST_CASE("difference quotients: smooth single term converges to i e^{i t0}") {
    auto spec = SeriesSpec::custom(0, n_term_rule(1));
    auto tr = difference_quotients(spec, 0.0, ScaleRule::dyadic, 4, 20);
    REQUIRE(tr.scales.size() == 17);
    CHECK(tr.band_values.empty());
    std::complex<double> target{0.0, 1.0}; // derivative of e^{it} at 0
    double last = std::abs(tr.quotients.back() - target);
    double first = std::abs(tr.quotients.front() - target);
    CHECK(last <= 1e-5);
    CHECK(last < first);
}

TEST_CASE("difference quotients: divergence signature of weierstrass_sin(2, 2.5)") {
    auto spec = SeriesSpec::weierstrass_sin(2.0, 2.5);
    auto tr = difference_quotients(spec, 0.0, ScaleRule::dyadic, 4, 20);
    REQUIRE(tr.scales.size() == 17);
    // |quotients| strictly increase over the dyadic range m = 6..18
    for (std::size_t i = 3; i <= 14; ++i)
        CHECK(std::abs(tr.quotients[i]) < std::abs(tr.quotients[i + 1]));
}

TEST_CASE("difference quotients: band values match extraction magnitudes") {
    auto spec = SeriesSpec::f_theta(1.0);
    auto tr = difference_quotients(spec, 0.0, ScaleRule::inverse_b_k, 4, 10);
    BumpKernel kernel = build_kernel(2.0);
    for (std::size_t i = 0; i < tr.scales.size(); ++i) {
        std::int64_t k = 4 + static_cast<std::int64_t>(i);
        double bk = 1.0 / tr.scales[i];
        auto v = extract_analytic(spec, kernel, k, 0.0, 1e-12);
        CHECK(std::abs(v) * bk == doctest::Approx(tr.band_values[i]).epsilon(1e-10));
    }
}

TEST_CASE("oscillation basics") {
    auto spec = SeriesSpec::f_theta(0.5);
    CHECK(oscillation(spec, 0.0, 0.0, 6.28, 128, 1e-8) == 0.0);

    // nested grid refinement can only grow the empirical sup
    double coarse = oscillation(spec, 1e-3, 0.0, 6.28, 512, 1e-8);
    double fine = oscillation(spec, 1e-3, 0.0, 6.28, 1024, 1e-8);
    CHECK(fine >= coarse);
    CHECK(coarse > 0.0);
}

TEST_CASE("oscillation of the quadratic sine series scales like sqrt(h)") {
    auto spec = SeriesSpec::riemann();
    double h = std::ldexp(1.0, -12);
    double om = oscillation(spec, h, 0.0, 2.0, 1024, 1e-4);
    CHECK(om <= 2.5 * std::sqrt(h));
    CHECK(om >= 0.2 * std::sqrt(h));
}

TEST_CASE("holder estimate: f_theta(0.5)") {
    auto fit = holder_estimate(SeriesSpec::f_theta(0.5), std::ldexp(1.0, -16),
                               std::ldexp(1.0, -6), 11, 0.0,
                               2.0 * 3.14159265358979323846, 512, 1e-8);
    CHECK(fit.alpha_hat == doctest::Approx(0.5).epsilon(0.2)); // 0.5 +- 0.1
    CHECK(std::abs(fit.alpha_hat - 0.5) <= 0.1);
    CHECK(fit.residual < 0.2);
    CHECK(fit.grid_points == 512);
}

TEST_CASE("holder estimate: smooth single term is Lipschitz") {
    auto spec = SeriesSpec::custom(0, n_term_rule(1));
    auto fit = holder_estimate(spec, std::ldexp(1.0, -14), std::ldexp(1.0, -6), 9,
                               0.0, 6.28, 256, 1e-8);
    CHECK(std::abs(fit.alpha_hat - 1.0) <= 0.05);
}

TEST_CASE("holder estimate: preconditions") {
    auto spec = SeriesSpec::f_theta(0.5);
    CHECK_THROWS_AS(holder_estimate(spec, 1e-2, 1e-3, 8, 0.0, 1.0, 64, 1e-8), OutOfRange);
    CHECK_THROWS_AS(holder_estimate(spec, 1e-4, 1e-2, 5, 0.0, 1.0, 64, 1e-8), OutOfRange);
}

TEST_CASE("riemann derivative probe") {
    double q = riemann_derivative_probe(1, 1, 1e-3, 1'000'000);
    CHECK(std::abs(q - (-0.5)) <= 0.05);

    CHECK_THROWS_AS(riemann_derivative_probe(2, 1, 1e-3, 1'000'000), OutOfRange);
    CHECK_THROWS_AS(riemann_derivative_probe(1, 4, 1e-3, 1'000'000), OutOfRange);
    CHECK_THROWS_AS(riemann_derivative_probe(1, 1, 1e-4, 1000), PreconditionTruncation);
}

TEST_CASE("deviation from first term") {
    // single-term series: the deviation is identically zero
    auto one = SeriesSpec::custom(0, n_term_rule(1));
    auto rows = deviation_from_first_term(one, 0.0, 1.0, 9, 2);
    for (const auto& r : rows) {
        CHECK(r.re == 0.0);
        CHECK(r.im == 0.0);
    }

    // two-term series: deviation equals the second term alone
    auto two = SeriesSpec::custom(0, n_term_rule(2));
    rows = deviation_from_first_term(two, 0.0, 1.0, 9, 2);
    for (const auto& r : rows) {
        CHECK(r.re == doctest::Approx(std::cos(2.0 * r.t)).epsilon(1e-14));
        CHECK(r.im == doctest::Approx(std::sin(2.0 * r.t)).epsilon(1e-14));
    }

    CHECK_THROWS_AS(deviation_from_first_term(one, 0.0, 1.0, 9, 1), OutOfRange);
}

TEST_CASE("deviation drops exactly the first term") {
    auto spec = SeriesSpec::iterated_log(4, 2.0);
    const std::int64_t terms = 3;
    auto rows = deviation_from_first_term(spec, 0.0, 5.0, 5, terms);
    std::int64_t N = spec.start_index() + terms - 1;
    SeriesEvaluator ev(spec, N);
    for (const auto& r : rows) {
        // the summation starts one index past the start (j >= 3814281 here)
        auto want = ev.range_sum(r.t, spec.start_index() + 1, N);
        CHECK(std::abs(std::complex<double>{r.re, r.im} - want) == 0.0);
    }
}

TEST_CASE("empirical exponent never exceeds the theoretical gap bound by much") {
    for (const auto& s : {SeriesSpec::f_theta(0.5), SeriesSpec::f_theta(1.0)}) {
        auto fit = holder_estimate(s, std::ldexp(1.0, -16), std::ldexp(1.0, -6), 9,
                                   0.0, 6.28, 256, 1e-8);
        auto [af, ag] = holder_upper_bounds(s, s.start_index(), s.start_index() + 64);
        CHECK(fit.alpha_hat <= ag + 0.1);
    }
}
