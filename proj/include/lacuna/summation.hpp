#pragma once

#include <complex>

namespace lacuna {

// Neumaier-compensated accumulator: the running compensation also captures
// the case |x| > |sum|, so term ordering barely matters.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    void add_compensated(const CompensatedSum& other) {
        add(other.sum_);
        comp_ += other.comp_;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexSum {
public:
    void add(const std::complex<double>& z) {
        re_.add(z.real());
        im_.add(z.imag());
    }

    void add_compensated(const ComplexSum& other) {
        re_.add_compensated(other.re_);
        im_.add_compensated(other.im_);
    }

    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_, im_;
};

} // namespace lacuna
