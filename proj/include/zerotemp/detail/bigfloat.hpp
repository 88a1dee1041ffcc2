#pragma once

#include <mpfr.h>

#include <utility>

namespace zerotemp::detail {

/// Owning MPFR value with an explicit precision; no global precision state is touched.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec, double v = 0.0) {
        mpfr_init2(x_, prec);
        mpfr_set_d(x_, v, MPFR_RNDN);
    }
    BigFloat(const BigFloat& o) {
        mpfr_init2(x_, mpfr_get_prec(o.x_));
        mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(x_, mpfr_get_prec(o.x_));
        mpfr_swap(x_, o.x_);
    }
    /// Assignment adopts the precision of the source.
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            if (mpfr_get_prec(x_) != mpfr_get_prec(o.x_)) mpfr_set_prec(x_, mpfr_get_prec(o.x_));
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(x_, o.x_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(x_); }

    mpfr_ptr get() noexcept { return x_; }
    mpfr_srcptr get() const noexcept { return x_; }
    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(x_); }

    /// exp(v) exactly rounded at this precision.
    static BigFloat exp_of(mpfr_prec_t prec, double v) {
        BigFloat r(prec, v);
        mpfr_exp(r.x_, r.x_, MPFR_RNDN);
        return r;
    }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

    /// Natural log returned as a double; -inf for zero.
    double log_double() const {
        BigFloat r(precision());
        mpfr_log(r.x_, x_, MPFR_RNDN);
        return r.to_double();
    }

    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }

    BigFloat& operator+=(const BigFloat& o) {
        mpfr_add(x_, x_, o.x_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator-=(const BigFloat& o) {
        mpfr_sub(x_, x_, o.x_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator*=(const BigFloat& o) {
        mpfr_mul(x_, x_, o.x_, MPFR_RNDN);
        return *this;
    }
    BigFloat& operator/=(const BigFloat& o) {
        mpfr_div(x_, x_, o.x_, MPFR_RNDN);
        return *this;
    }
    /// this += a * b
    void fma_add(const BigFloat& a, const BigFloat& b) { mpfr_fma(x_, a.x_, b.x_, x_, MPFR_RNDN); }
    /// this -= a * b
    void fms_sub(const BigFloat& a, const BigFloat& b) {
        BigFloat t(precision());
        mpfr_mul(t.x_, a.x_, b.x_, MPFR_RNDN);
        mpfr_sub(x_, x_, t.x_, MPFR_RNDN);
    }

    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
    friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
    friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }
    friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.x_, b.x_) != 0; }
    friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.x_, b.x_) != 0; }
    friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.x_, b.x_) != 0; }

    friend BigFloat log(const BigFloat& a) {
        BigFloat r(a.precision());
        mpfr_log(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend BigFloat abs(const BigFloat& a) {
        BigFloat r(a.precision());
        mpfr_abs(r.x_, a.x_, MPFR_RNDN);
        return r;
    }

private:
    mpfr_t x_;
};

}  // namespace zerotemp::detail
