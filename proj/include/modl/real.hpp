#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace modl {

// Default working precision in bits. CLI --prec-bits overrides it at startup.
mpfr_prec_t default_prec();
void set_default_prec(mpfr_prec_t bits);

// RAII wrapper over mpfr_t. Every value carries its own precision; binary
// operations round to the larger of the two operand precisions.
class Real {
public:
    Real() : Real(default_prec()) {}
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
    Real& operator=(const Real& o) {
        if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
        return *this;
    }
    Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
    ~Real() { mpfr_clear(v_); }

    static Real of(double x, mpfr_prec_t prec = default_prec());
    static Real of_si(long x, mpfr_prec_t prec = default_prec());
    static Real of(const mpz_class& z, mpfr_prec_t prec = default_prec());
    static Real of(const mpq_class& q, mpfr_prec_t prec = default_prec());
    static Real from_str(const std::string& s, mpfr_prec_t prec = default_prec(), int base = 10);

    static Real pi(mpfr_prec_t prec = default_prec());
    static Real pos_inf(mpfr_prec_t prec = 32);

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

    // Decimal string, round-trip lossy; for display.
    std::string str(std::size_t digits = 20) const;
    // Hex significand/exponent form ("0x1.8p+3" style); exact round trip.
    std::string hex_str() const;
    static Real from_hex(const std::string& s, mpfr_prec_t prec);

    friend int cmp(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_); }
    bool operator<(const Real& o) const { return mpfr_less_p(v_, o.v_) != 0; }
    bool operator<=(const Real& o) const { return mpfr_lessequal_p(v_, o.v_) != 0; }
    bool operator>(const Real& o) const { return mpfr_greater_p(v_, o.v_) != 0; }
    bool operator>=(const Real& o) const { return mpfr_greaterequal_p(v_, o.v_) != 0; }
    bool operator==(const Real& o) const { return mpfr_equal_p(v_, o.v_) != 0; }

private:
    mpfr_t v_;
};

mpfr_prec_t op_prec(const Real& a, const Real& b);

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator-(const Real& a);

Real add_prec(const Real& a, const Real& b, mpfr_prec_t prec);
Real sub_prec(const Real& a, const Real& b, mpfr_prec_t prec);
Real mul_prec(const Real& a, const Real& b, mpfr_prec_t prec);
Real div_prec(const Real& a, const Real& b, mpfr_prec_t prec);

Real abs(const Real& a);
Real sqrt(const Real& a);
Real exp(const Real& a);
Real log(const Real& a);
Real cos(const Real& a);
Real sin(const Real& a);
Real pow_si(const Real& a, long e);
Real pow(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

// x * 2^e
Real ldexp2(const Real& x, long e);
// 2^-(prec(a)) * |a|: one unit of relative rounding at a's precision.
Real ulp_of(const Real& a);

Real mpfr_lngamma_real(const Real& x);          // log Gamma(x), x > 0
Real mpfr_zeta_real(const Real& s);             // zeta(s)
Real sqrt_pow_z(const mpz_class& n, long e, mpfr_prec_t prec); // sqrt(n^e)

// Value with a propagated absolute error bound (first-order interval
// discipline: every operation widens err by the incoming bounds plus the
// local rounding contribution).
struct ErrBoundedReal {
    Real value;
    Real err; // nonnegative, low precision

    ErrBoundedReal() : value(), err(Real(32)) {}
    explicit ErrBoundedReal(Real v) : value(std::move(v)), err(Real(32)) {}
    ErrBoundedReal(Real v, Real e) : value(std::move(v)), err(std::move(e)) {}

    static ErrBoundedReal exact(const Real& v);
    static ErrBoundedReal exact_si(long v, mpfr_prec_t prec = default_prec());

    double err_d() const { return err.to_double(); }
};

ErrBoundedReal operator+(const ErrBoundedReal& a, const ErrBoundedReal& b);
ErrBoundedReal operator-(const ErrBoundedReal& a, const ErrBoundedReal& b);
ErrBoundedReal operator*(const ErrBoundedReal& a, const ErrBoundedReal& b);
ErrBoundedReal operator/(const ErrBoundedReal& a, const ErrBoundedReal& b);
ErrBoundedReal operator-(const ErrBoundedReal& a);
ErrBoundedReal scale(const ErrBoundedReal& a, const Real& c); // exact scalar
ErrBoundedReal sqrt(const ErrBoundedReal& a);

} // namespace modl
