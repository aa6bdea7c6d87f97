#include "lacuna/kernels.hpp"

#include <cmath>

#include "lacuna/parallel.hpp"

namespace lacuna {

namespace {

constexpr double kMomentTol = 1e-10;
constexpr double kDecayTol = 1e-8;
// step chosen so that both the tabulated grid and its 2x coarsening keep
// the alias spacings 2*pi/h away from dyadic/triadic frequency ratios
constexpr double kGridStep = 1.0 / 32.0;

// normalization written with the same subexpressions as the generic
// denominator so chi_hat(lambda, 1) is exactly 1
double chi_norm(double lambda) {
    return 1.0 / ((lambda - 1.0) * (1.0 - 1.0 / lambda));
}

void check_power_of_two(int M) {
    if (M < 64 || (M & (M - 1)) != 0)
        throw OutOfRange("quadrature node count must be a power of two >= 64");
}

// inverse-transform row: (1/2pi) sum_m w_m g(tau_m) e^{i z tau_m}, with a
// rotation recurrence over m resynced every 64 steps
std::complex<double> inverse_row(double z, double tau0, double dtau,
                                 const std::vector<double>& wg) {
    std::complex<double> acc{0.0, 0.0};
    std::complex<double> rot{std::cos(z * tau0), std::sin(z * tau0)};
    const std::complex<double> step{std::cos(z * dtau), std::sin(z * dtau)};
    const std::size_t M = wg.size();
    for (std::size_t m = 0; m < M; ++m) {
        if ((m & 63u) == 0 && m)
            rot = {std::cos(z * (tau0 + dtau * static_cast<double>(m))),
                   std::sin(z * (tau0 + dtau * static_cast<double>(m)))};
        acc += wg[m] * rot;
        rot *= step;
    }
    return acc / (2.0 * 3.14159265358979323846);
}

} // namespace

double chi_hat(double lambda, double tau) {
    if (!(lambda > 1.0)) throw BadLambda("lambda must be > 1");
    double inv = 1.0 / lambda;
    if (!(tau > inv) || !(tau < lambda)) return 0.0;
    double g = 1.0 / ((lambda - tau) * (tau - inv));
    return std::exp(chi_norm(lambda) - g);
}

double psi_hat(double sigma) {
    if (!(std::abs(sigma) < 0.5)) return 0.0;
    return std::exp(4.0 - 1.0 / (0.25 - sigma * sigma));
}

double default_truncation_radius(double lambda) {
    if (lambda >= 1.15) return 1024.0;
    if (lambda >= 1.08) return 2048.0;
    return 4096.0;
}

BumpKernel build_kernel(double lambda, int M, double Z) {
    if (!(lambda > 1.0)) throw BadLambda("lambda must be > 1");
    check_power_of_two(M);
    if (Z == 0.0) Z = default_truncation_radius(lambda);
    if (!(Z > 0.0)) throw OutOfRange("truncation radius must be positive");

    BumpKernel k;
    k.lambda = lambda;
    k.normalization = chi_norm(lambda);
    k.quadrature_nodes = M;
    k.truncation_radius = Z;
    k.grid_step = kGridStep;

    const double tau0 = 1.0 / lambda;
    const double dtau = (lambda - tau0) / static_cast<double>(M);
    std::vector<double> wg(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        double w = (m == 0 || m == M) ? 0.5 * dtau : dtau;
        wg[static_cast<std::size_t>(m)] = w * chi_hat(lambda, tau0 + dtau * m);
    }

    const std::size_t nodes = static_cast<std::size_t>(std::llround(2.0 * Z / kGridStep)) + 1;
    k.table.resize(nodes);
    parallel_for(static_cast<long long>(nodes), [&](long long i) {
        k.table[static_cast<std::size_t>(i)] =
            inverse_row(k.z_at(static_cast<std::size_t>(i)), tau0, dtau, wg);
    });

    // validation: moments, peak, tail decay
    std::complex<double> m0{0.0, 0.0}, m1{0.0, 0.0};
    double peak = 0.0, outer = 0.0, outer_mass = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        double w = (i == 0 || i == nodes - 1) ? 0.5 * kGridStep : kGridStep;
        double z = k.z_at(i);
        m0 += w * k.table[i];
        m1 += w * z * k.table[i];
        double a = std::abs(k.table[i]);
        peak = std::max(peak, a);
        if (std::abs(z) >= Z / 2.0) {
            outer = std::max(outer, a);
            outer_mass += w * a;
        }
    }
    k.moment0 = std::abs(m0);
    k.moment1 = std::abs(m1);
    k.max_abs = peak;
    k.decay_ratio = outer / peak;
    k.outer_mass = outer_mass;

    if (k.moment0 > kMomentTol || k.moment1 > kMomentTol)
        throw MomentCheckFailed("kernel moments " + std::to_string(k.moment0) +
                                ", " + std::to_string(k.moment1) +
                                " exceed 1e-10 (Z too small for this lambda?)");
    if (k.decay_ratio > kDecayTol)
        throw DecayCheckFailed("kernel tail ratio " + std::to_string(k.decay_ratio) +
                               " exceeds 1e-8; increase Z or use the gap method");
    return k;
}

GapKernel build_gap_kernel(int M, double Z) {
    check_power_of_two(M);
    if (!(Z > 0.0)) throw OutOfRange("truncation radius must be positive");

    GapKernel k;
    k.normalization = psi_hat(0.0);
    k.quadrature_nodes = M;
    k.truncation_radius = Z;
    k.grid_step = kGridStep;

    const double sig0 = -0.5;
    const double dsig = 1.0 / static_cast<double>(M);
    std::vector<double> wg(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) {
        double w = (m == 0 || m == M) ? 0.5 * dsig : dsig;
        wg[static_cast<std::size_t>(m)] = w * psi_hat(sig0 + dsig * m);
    }

    const std::size_t nodes = static_cast<std::size_t>(std::llround(2.0 * Z / kGridStep)) + 1;
    k.table.resize(nodes);
    parallel_for(static_cast<long long>(nodes), [&](long long i) {
        // psi is real: psi_hat is even, so the imaginary part cancels
        k.table[static_cast<std::size_t>(i)] =
            inverse_row(k.z_at(static_cast<std::size_t>(i)), sig0, dsig, wg).real();
    });

    double integ = 0.0, peak = 0.0, outer = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        double w = (i == 0 || i == nodes - 1) ? 0.5 * kGridStep : kGridStep;
        integ += w * k.table[i];
        double a = std::abs(k.table[i]);
        peak = std::max(peak, a);
        if (std::abs(k.z_at(i)) >= Z / 2.0) outer = std::max(outer, a);
    }
    k.integral = integ;
    k.max_abs = peak;
    k.decay_ratio = outer / peak;

    if (std::abs(k.integral - k.normalization) > 1e-8)
        throw MomentCheckFailed("gap kernel integral " + std::to_string(k.integral) +
                                " deviates from psi_hat(0)");
    if (k.decay_ratio > kDecayTol)
        throw DecayCheckFailed("gap kernel tail ratio exceeds 1e-8; increase Z");
    return k;
}

} // namespace lacuna
