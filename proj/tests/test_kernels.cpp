#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lacuna/kernels.hpp"

using namespace lacuna;

TEST_CASE("chi_hat: normalization and support") {
    CHECK(chi_hat(2.0, 1.0) == 1.0);
    CHECK(chi_hat(2.0, 1.5) == 1.0); // exp(2 - 1/(0.5 * 1.0))
    CHECK(chi_hat(2.0, 2.0) == 0.0);
    CHECK(chi_hat(2.0, 0.5) == 0.0);
    CHECK(chi_hat(2.0, 3.0) == 0.0);
    CHECK(chi_hat(2.0, 0.2) == 0.0);
    CHECK(chi_hat(2.0, -1.0) == 0.0);
    CHECK(chi_hat(2.0, 0.75) == doctest::Approx(0.30119421191220210).epsilon(1e-14));

    // chi_hat(1) = 1 holds for every lambda by construction
    for (double lam : {1.2, 1.5, 1.0001, 7.0}) CHECK(chi_hat(lam, 1.0) == 1.0);

    CHECK_THROWS_AS(chi_hat(1.0, 1.0), BadLambda);
    CHECK_THROWS_AS(chi_hat(0.5, 1.0), BadLambda);
}

TEST_CASE("psi_hat: normalization and support") {
    CHECK(psi_hat(0.0) == 1.0);
    CHECK(psi_hat(0.5) == 0.0);
    CHECK(psi_hat(-0.5) == 0.0);
    CHECK(psi_hat(0.7) == 0.0);
    CHECK(psi_hat(0.25) == doctest::Approx(0.26359713811572677).epsilon(1e-14));
    for (double s : {0.1, 0.25, 0.49}) CHECK(psi_hat(s) == psi_hat(-s));
}

TEST_CASE("bump kernel build: moments, decay, normalization") {
    BumpKernel k = build_kernel(2.0);
    CHECK(k.lambda == 2.0);
    CHECK(k.normalization == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(k.truncation_radius == 1024.0);
    CHECK(k.moment0 <= 1e-10);
    CHECK(k.moment1 <= 1e-10);
    CHECK(k.decay_ratio <= 1e-8);
    CHECK(k.max_abs == doctest::Approx(0.15226417576182308).epsilon(1e-9));
    CHECK(k.table.size() == static_cast<std::size_t>(2 * 1024 * 32) + 1);
}

TEST_CASE("bump kernel: tau-quadrature self-convergence under M doubling") {
    BumpKernel a = build_kernel(2.0, 4096);
    BumpKernel b = build_kernel(2.0, 8192);
    REQUIRE(a.table.size() == b.table.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.table.size(); ++i)
        worst = std::max(worst, std::abs(a.table[i] - b.table[i]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("bump kernel: narrow band still validates at the default radius") {
    BumpKernel k = build_kernel(1.2);
    CHECK(k.moment0 <= 1e-10);
    CHECK(k.moment1 <= 1e-10);
    CHECK(k.decay_ratio <= 1e-8);
}

TEST_CASE("bump kernel: undersized window is rejected") {
    CHECK_THROWS_AS(build_kernel(2.0, 4096, 64.0), MomentCheckFailed);
    CHECK_THROWS_AS(build_kernel(1.05, 4096, 256.0), Error);
}

TEST_CASE("bump kernel: parameter validation") {
    CHECK_THROWS_AS(build_kernel(2.0, 100), OutOfRange);  // not a power of two
    CHECK_THROWS_AS(build_kernel(2.0, 32), OutOfRange);   // below 64
    CHECK_THROWS_AS(build_kernel(0.9), BadLambda);
}

TEST_CASE("gap kernel build") {
    GapKernel k = build_gap_kernel();
    CHECK(k.normalization == 1.0);
    CHECK(std::abs(k.integral - 1.0) <= 1e-8);
    CHECK(k.decay_ratio <= 1e-8);
    // psi is real and even
    std::size_t n = k.table.size();
    for (std::size_t i = 0; i < n / 2; i += 97)
        CHECK(k.table[i] == doctest::Approx(k.table[n - 1 - i]).epsilon(1e-10));
    // peak at the center
    CHECK(k.table[n / 2] == doctest::Approx(k.max_abs).epsilon(1e-12));
}
