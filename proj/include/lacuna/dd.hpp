#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace lacuna {

// Double-double arithmetic (~31 significant digits).  Error-free transforms
// after Dekker and Shewchuk; exp/log follow the approach of the QD library.
// Used for exact-as-possible oscillator phases b_j*t and for evaluating
// iterated logarithms close to their fixed points, where plain doubles lose
// half their digits to cancellation.
struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
};

inline dd two_sum(double a, double b) {
    double s = a + b;
    double v = s - a;
    return {s, (a - (s - v)) + (b - v)};
}

// requires |a| >= |b| or a == 0
inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline dd add(const dd& a, const dd& b) {
    dd s = two_sum(a.hi, b.hi);
    dd t = two_sum(a.lo, b.lo);
    dd r = quick_two_sum(s.hi, s.lo + t.hi);
    return quick_two_sum(r.hi, r.lo + t.lo);
}

inline dd add(const dd& a, double b) {
    dd s = two_sum(a.hi, b);
    return quick_two_sum(s.hi, s.lo + a.lo);
}

inline dd neg(const dd& a) { return {-a.hi, -a.lo}; }
inline dd sub(const dd& a, const dd& b) { return add(a, neg(b)); }
inline dd sub(const dd& a, double b) { return add(a, -b); }

inline dd mul(const dd& a, const dd& b) {
    dd p = two_prod(a.hi, b.hi);
    return quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

inline dd mul(const dd& a, double b) {
    dd p = two_prod(a.hi, b);
    return quick_two_sum(p.hi, p.lo + a.lo * b);
}

inline dd div(const dd& a, const dd& b) {
    double q1 = a.hi / b.hi;
    dd r = sub(a, mul(b, q1));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, q2));
    double q3 = r.hi / b.hi;
    return add(quick_two_sum(q1, q2), q3);
}

inline dd div(const dd& a, double b) { return div(a, dd(b)); }

inline dd dd_sqrt(const dd& a) {
    if (a.hi == 0.0) return dd(0.0);
    double s = std::sqrt(a.hi);
    dd r = sub(a, two_prod(s, s));
    return add(dd(s), r.hi / (2.0 * s));
}

inline dd ldexp(const dd& a, int n) {
    return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)};
}

namespace ddc {
inline constexpr dd pi{3.141592653589793116e+00, 1.2246467991473531772e-16};
inline constexpr dd two_pi{6.283185307179586232e+00, 2.4492935982947063545e-16};
// third word of 2*pi, for phase reduction with n up to 2^53
inline constexpr double two_pi_t2 = -5.9895396194366793116e-33;
inline constexpr dd ln2{6.9314718055994530942e-01, 2.3190468138462995584e-17};
inline constexpr dd e{2.7182818284590452354e+00, 1.4456468917292501774e-16};
} // namespace ddc

// exp by 2^k-fold argument halving of the Taylor series, k = 9 (QD scheme)
inline dd dd_exp(const dd& a) {
    static const dd inv_fact[] = {
        {1.66666666666666657e-01, 9.25185853854297066e-18},  // 1/3!
        {4.16666666666666644e-02, 2.31296463462770270e-18},  // 1/4!
        {8.33333333333333322e-03, 1.15648231731385135e-19},  // 1/5!
        {1.38888888888888894e-03, -5.30054395437357706e-20}, // 1/6!
        {1.98412698412698413e-04, 1.72095582934207053e-22},  // 1/7!
        {2.48015873015873016e-05, 2.15119478667758816e-23},  // 1/8!
        {2.75573192239858925e-06, -1.85839327404647208e-22}, // 1/9!
        {2.75573192239858883e-07, 2.37677146222502973e-23},  // 1/10!
        {2.50521083854417202e-08, -1.44881407093591197e-24}, // 1/11!
    };
    constexpr double k = 512.0; // 2^9

    if (a.hi <= -709.0) return dd(0.0);
    if (a.hi >= 709.0) return dd(std::numeric_limits<double>::infinity());
    if (a.hi == 0.0 && a.lo == 0.0) return dd(1.0);

    double m = std::floor(a.hi / ddc::ln2.hi + 0.5);
    dd r = mul(sub(a, mul(ddc::ln2, m)), 1.0 / k);

    // Taylor for exp(r)-1 with |r| <= ln2/1024
    dd p = mul(r, r);
    dd s = add(r, mul(p, 0.5));
    p = mul(p, r);
    dd t = mul(p, inv_fact[0]);
    int i = 0;
    const double thresh = 1.0e-35;
    do {
        s = add(s, t);
        p = mul(p, r);
        ++i;
        t = mul(p, inv_fact[i]);
    } while (std::abs(t.hi) > thresh && i < 8);
    s = add(s, t);

    for (int j = 0; j < 9; ++j) s = add(mul(s, s), mul(s, 2.0)); // unhalve
    s = add(s, 1.0);
    return ldexp(s, static_cast<int>(m));
}

// Newton iteration on exp; two steps reach full double-double precision
inline dd dd_log(const dd& a) {
    dd x(std::log(a.hi));
    x = sub(add(x, mul(a, dd_exp(neg(x)))), 1.0);
    x = sub(add(x, mul(a, dd_exp(neg(x)))), 1.0);
    return x;
}

inline dd dd_powi(dd base, long long e) {
    if (e == 0) return dd(1.0);
    bool inv = e < 0;
    unsigned long long n = inv ? static_cast<unsigned long long>(-e)
                               : static_cast<unsigned long long>(e);
    dd acc(1.0);
    while (n) {
        if (n & 1ull) acc = mul(acc, base);
        n >>= 1;
        if (n) base = mul(base, base);
    }
    return inv ? div(dd(1.0), acc) : acc;
}

// base^q for real q > 0 exponents; uses powi for integer and half-integer q
inline dd dd_pow(const dd& base, double q) {
    double qi = std::nearbyint(q);
    if (qi == q && std::abs(q) < 1e15)
        return dd_powi(base, static_cast<long long>(qi));
    double q2 = std::nearbyint(2.0 * q);
    if (q2 == 2.0 * q && std::abs(q2) < 1e15)
        return dd_powi(dd_sqrt(base), static_cast<long long>(q2));
    return dd_exp(mul(dd_log(base), q));
}

// exact dd for n^2; requires |n| <= 3037000499 so n^2 fits in int64
inline dd dd_square_of_int(long long n) {
    double h = static_cast<double>(n) * static_cast<double>(n);
    // recover the exact remainder through int64; h rounds n^2 to 53 bits
    long long rem = n * n - static_cast<long long>(h);
    return quick_two_sum(h, static_cast<double>(rem));
}

// r = x mod 2*pi, folded into [-pi, pi].  Valid for |x| < 2^53; the 3-word
// 2*pi keeps the absolute error below ~1e-33 * n.
inline dd reduce_two_pi(const dd& x) {
    constexpr double inv_two_pi = 0.15915494309189534561;
    double n = std::nearbyint(x.hi * inv_two_pi);
    dd r = x;
    if (n != 0.0) {
        r = add(r, neg(two_prod(n, ddc::two_pi.hi)));
        r = add(r, neg(two_prod(n, ddc::two_pi.lo)));
        r = add(r, -n * ddc::two_pi_t2);
    }
    while (r.hi > ddc::pi.hi) r = sub(r, ddc::two_pi);
    while (r.hi < -ddc::pi.hi) r = add(r, ddc::two_pi);
    return r;
}

// r = x mod 2, folded into [-1, 1]; exact (binary modulus).  Two rounds of
// subtraction: the first can leave a residual up to ulp(x.hi)/2 when x.hi
// is too coarse to resolve integers.
inline dd reduce_two(const dd& x) {
    dd r = x;
    for (int pass = 0; pass < 2; ++pass) {
        double n = std::nearbyint(0.5 * r.hi);
        if (n != 0.0) r = add(r, -2.0 * n);
    }
    while (r.hi > 1.0) r = add(r, -2.0);
    while (r.hi < -1.0) r = add(r, 2.0);
    return r;
}

// e^{i r} for a reduced phase |r| <= pi; first-order correction in r.lo
inline std::complex<double> cis_reduced(const dd& r) {
    double s = std::sin(r.hi);
    double c = std::cos(r.hi);
    return {c - r.lo * s, s + r.lo * c};
}

} // namespace lacuna
