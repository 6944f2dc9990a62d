#include "modl/real.hpp"

#include <atomic>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace modl {

namespace {
std::atomic<mpfr_prec_t> g_default_prec{128};
const mpfr_prec_t kErrPrec = 32;
} // namespace

mpfr_prec_t default_prec() { return g_default_prec.load(); }
void set_default_prec(mpfr_prec_t bits) {
    if (bits < 16 || bits > (1 << 22)) throw std::invalid_argument("prec_bits out of range");
    g_default_prec.store(bits);
}

Real Real::of(double x, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
}
Real Real::of_si(long x, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_si(r.v_, x, MPFR_RNDN);
    return r;
}
Real Real::of(const mpz_class& z, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_z(r.v_, z.get_mpz_t(), MPFR_RNDN);
    return r;
}
Real Real::of(const mpq_class& q, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_q(r.v_, q.get_mpq_t(), MPFR_RNDN);
    return r;
}
Real Real::from_str(const std::string& s, mpfr_prec_t prec, int base) {
    Real r(prec);
    if (mpfr_set_str(r.v_, s.c_str(), base, MPFR_RNDN) != 0)
        throw std::invalid_argument("Real::from_str: cannot parse '" + s + "'");
    return r;
}

Real Real::pi(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
}
Real Real::pos_inf(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_inf(r.v_, 1);
    return r;
}

std::string Real::str(std::size_t digits) const {
    char fmt[32];
    std::snprintf(fmt, sizeof fmt, "%%.%zuRg", digits);
    char* out = nullptr;
    if (mpfr_asprintf(&out, fmt, v_) < 0) throw std::runtime_error("mpfr_asprintf failed");
    std::string s(out);
    mpfr_free_str(out);
    return s;
}

std::string Real::hex_str() const {
    char* out = nullptr;
    if (mpfr_asprintf(&out, "%Ra", v_) < 0) throw std::runtime_error("mpfr_asprintf failed");
    std::string s(out);
    mpfr_free_str(out);
    return s;
}

Real Real::from_hex(const std::string& s, mpfr_prec_t prec) {
    return from_str(s, prec, 16);
}

mpfr_prec_t op_prec(const Real& a, const Real& b) {
    return std::max(a.prec(), b.prec());
}

#define MODL_BINOP(name, fn)                                   \
    Real name##_prec(const Real& a, const Real& b, mpfr_prec_t prec) { \
        Real r(prec);                                          \
        fn(r.raw(), a.raw(), b.raw(), MPFR_RNDN);              \
        return r;                                              \
    }

MODL_BINOP(add, mpfr_add)
MODL_BINOP(sub, mpfr_sub)
MODL_BINOP(mul, mpfr_mul)
MODL_BINOP(div, mpfr_div)
#undef MODL_BINOP

Real operator+(const Real& a, const Real& b) { return add_prec(a, b, op_prec(a, b)); }
Real operator-(const Real& a, const Real& b) { return sub_prec(a, b, op_prec(a, b)); }
Real operator*(const Real& a, const Real& b) { return mul_prec(a, b, op_prec(a, b)); }
Real operator/(const Real& a, const Real& b) { return div_prec(a, b, op_prec(a, b)); }

Real operator-(const Real& a) {
    Real r(a.prec());
    mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

#define MODL_UNOP(name, fn)              \
    Real name(const Real& a) {           \
        Real r(a.prec());                \
        fn(r.raw(), a.raw(), MPFR_RNDN); \
        return r;                        \
    }

MODL_UNOP(abs, mpfr_abs)
MODL_UNOP(sqrt, mpfr_sqrt)
MODL_UNOP(exp, mpfr_exp)
MODL_UNOP(log, mpfr_log)
MODL_UNOP(cos, mpfr_cos)
MODL_UNOP(sin, mpfr_sin)
#undef MODL_UNOP

Real pow_si(const Real& a, long e) {
    Real r(a.prec());
    mpfr_pow_si(r.raw(), a.raw(), e, MPFR_RNDN);
    return r;
}
Real pow(const Real& a, const Real& b) {
    Real r(op_prec(a, b));
    mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

Real ldexp2(const Real& x, long e) {
    Real r(x.prec());
    mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
    return r;
}

Real ulp_of(const Real& a) {
    if (a.is_zero()) {
        Real tiny(kErrPrec);
        mpfr_set_ui_2exp(tiny.raw(), 1, -4 * static_cast<long>(a.prec()), MPFR_RNDN);
        return tiny;
    }
    Real r(kErrPrec);
    mpfr_abs(r.raw(), a.raw(), MPFR_RNDU);
    mpfr_mul_2si(r.raw(), r.raw(), -static_cast<long>(a.prec()), MPFR_RNDU);
    return r;
}

Real mpfr_lngamma_real(const Real& x) {
    if (x.sign() <= 0) throw std::domain_error("log_gamma: x must be positive");
    Real r(x.prec());
    mpfr_lngamma(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}

Real mpfr_zeta_real(const Real& s) {
    Real r(s.prec());
    mpfr_zeta(r.raw(), s.raw(), MPFR_RNDN);
    return r;
}

Real sqrt_pow_z(const mpz_class& n, long e, mpfr_prec_t prec) {
    if (n < 0) throw std::domain_error("sqrt_pow_z: negative base");
    mpz_class p;
    mpz_pow_ui(p.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(e));
    Real r = Real::of(p, prec + 8);
    Real s(prec);
    mpfr_sqrt(s.raw(), r.raw(), MPFR_RNDN);
    return s;
}

ErrBoundedReal ErrBoundedReal::exact(const Real& v) {
    ErrBoundedReal e(v);
    mpfr_set_zero(e.err.raw(), 1);
    return e;
}
ErrBoundedReal ErrBoundedReal::exact_si(long v, mpfr_prec_t prec) {
    return exact(Real::of_si(v, prec));
}

namespace {
Real err_add(const Real& a, const Real& b) {
    Real r(kErrPrec);
    mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
    return r;
}
Real err_mul(const Real& a, const Real& b) {
    Real r(kErrPrec);
    mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDU);
    return r;
}
Real err_abs(const Real& a) {
    Real r(kErrPrec);
    mpfr_abs(r.raw(), a.raw(), MPFR_RNDU);
    return r;
}
} // namespace

ErrBoundedReal operator+(const ErrBoundedReal& a, const ErrBoundedReal& b) {
    Real v = a.value + b.value;
    Real e = err_add(err_add(a.err, b.err), ulp_of(v));
    return {std::move(v), std::move(e)};
}
ErrBoundedReal operator-(const ErrBoundedReal& a, const ErrBoundedReal& b) {
    Real v = a.value - b.value;
    Real e = err_add(err_add(a.err, b.err), ulp_of(v));
    return {std::move(v), std::move(e)};
}
ErrBoundedReal operator*(const ErrBoundedReal& a, const ErrBoundedReal& b) {
    Real v = a.value * b.value;
    Real e = err_add(err_add(err_mul(err_abs(a.value), b.err), err_mul(err_abs(b.value), a.err)),
                     err_add(err_mul(a.err, b.err), ulp_of(v)));
    return {std::move(v), std::move(e)};
}
ErrBoundedReal operator/(const ErrBoundedReal& a, const ErrBoundedReal& b) {
    if (b.value.is_zero()) throw std::domain_error("ErrBoundedReal: division by zero");
    Real v = a.value / b.value;
    // |d(a/b)| <= err_a/|b| + |a| err_b/|b|^2, assuming err_b << |b|
    Real ab = err_abs(b.value);
    Real e1 = a.err / ab;
    Real e2 = err_mul(err_abs(v), b.err) / ab;
    Real e = err_add(err_add(Real(e1), Real(e2)), ulp_of(v));
    Real ecap(kErrPrec);
    mpfr_set(ecap.raw(), e.raw(), MPFR_RNDU);
    return {std::move(v), std::move(ecap)};
}
ErrBoundedReal operator-(const ErrBoundedReal& a) {
    return {-a.value, a.err};
}
ErrBoundedReal scale(const ErrBoundedReal& a, const Real& c) {
    Real v = a.value * c;
    Real e = err_add(err_mul(err_abs(c), a.err), ulp_of(v));
    return {std::move(v), std::move(e)};
}
ErrBoundedReal sqrt(const ErrBoundedReal& a) {
    if (a.value.sign() < 0) throw std::domain_error("ErrBoundedReal: sqrt of negative value");
    Real v = sqrt(a.value);
    Real e(kErrPrec);
    if (v.is_zero()) {
        mpfr_sqrt(e.raw(), a.err.raw(), MPFR_RNDU);
    } else {
        mpfr_div(e.raw(), a.err.raw(), v.raw(), MPFR_RNDU);
        mpfr_div_2ui(e.raw(), e.raw(), 1, MPFR_RNDU);
    }
    e = err_add(e, ulp_of(v));
    return {std::move(v), std::move(e)};
}

} // namespace modl
