#pragma once

#include <cmath>
#include <limits>
#include <utility>

namespace zerotemp::detail {

/// log(e^x + e^y)
inline double log_add_exp(double x, double y) {
    if (x < y) std::swap(x, y);
    if (y == -std::numeric_limits<double>::infinity()) return x;
    return x + std::log1p(std::exp(y - x));
}

/// log(1 - e^{-z}) for z > 0.
inline double log_one_minus_exp_neg(double z) { return std::log(-std::expm1(-z)); }

/// Sum of terms given by their logs; compensated summation after alignment to the running maximum.
class LogSum {
public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term > top_) {
            const double scale = std::exp(top_ - log_term);
            sum_ *= scale;
            comp_ *= scale;
            top_ = log_term;
        }
        const double x = std::exp(log_term - top_);
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double log_value() const {
        if (top_ == -std::numeric_limits<double>::infinity()) return top_;
        return top_ + std::log(sum_ + comp_);
    }

private:
    double top_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace zerotemp::detail
