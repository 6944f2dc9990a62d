#include "modl/petersson.hpp"

#include "modl/specialfn.hpp"
#include "modl/util.hpp"

#include <cmath>
#include <algorithm>
#include <stdexcept>

namespace modl {
namespace petersson {

ErrBoundedReal kloosterman(long m, long n, long c, mpfr_prec_t prec) {
    if (m < 1 || n < 1 || c < 1) throw std::invalid_argument("kloosterman: require m,n,c >= 1");
    if (c == 1) return ErrBoundedReal::exact_si(1, prec);
    // |S| <= c, so 176 working bits keep the absolute rounding error of the
    // cosine sum far below any downstream tolerance
    mpfr_prec_t w = std::min<mpfr_prec_t>(prec, 176) + 16;
    Real two_pi = ldexp2(Real::pi(w), 1);
    Real cr = Real::of_si(c, w);
    Real sum = Real::of_si(0, w);
    long terms = 0;
    for (long x = 1; x < c; ++x) {
        if (gcd_u64(static_cast<std::uint64_t>(x), static_cast<std::uint64_t>(c)) != 1) continue;
        // modular inverse by extended Euclid
        long r0 = c, r1 = x, s0 = 0, s1 = 1;
        while (r1 != 0) {
            long qq = r0 / r1;
            long r2 = r0 - qq * r1;
            long s2 = s0 - qq * s1;
            r0 = r1; r1 = r2; s0 = s1; s1 = s2;
        }
        long xbar = ((s0 % c) + c) % c;
        long arg = static_cast<long>((static_cast<unsigned long long>(m % c) * x +
                                      static_cast<unsigned long long>(n % c) * xbar) %
                                     static_cast<unsigned long long>(c));
        sum = sum + cos(two_pi * Real::of_si(arg, w) / cr);
        ++terms;
    }
    Real value = add_prec(sum, Real::of_si(0, prec), prec);
    Real err(32);
    mpfr_set_si(err.raw(), terms + 1, MPFR_RNDU);
    mpfr_mul_2si(err.raw(), err.raw(), -static_cast<long>(w) + 4, MPFR_RNDU);
    return {std::move(value), std::move(err)};
}

namespace {

// Certified bound on 2 pi sum_{c > cmax} |S(m,n;cq)/(cq) J_{k-1}(4 pi sqrt(mn)/(cq))|
// via |S| <= cq and |J_nu(x)| <= (x/2)^nu / nu!:
// 2 pi (2 pi sqrt(mn)/q)^{k-1} / (k-1)! * sum_{c>cmax} c^{1-k}.
Real rhs_tail_bound(long k, long m, long n, long q, long cmax, mpfr_prec_t prec) {
    mpfr_prec_t w = prec + 16;
    Real pi = Real::pi(w);
    Real s = sqrt(Real::of_si(m, w) * Real::of_si(n, w));
    Real base = ldexp2(pi, 1) * s / Real::of_si(q, w);
    Real lt = log(ldexp2(pi, 1)) + Real::of_si(k - 1, w) * log(base) -
              mpfr_lngamma_real(Real::of_si(k, w));
    // sum_{c>cmax} c^{1-k} <= cmax^{2-k}/(k-2) for k >= 3 (integral bound),
    // and for cmax = 0 it is zeta(k-1).
    Real tail_sum(w);
    if (cmax == 0) {
        tail_sum = mpfr_zeta_real(Real::of_si(k - 1, w));
    } else {
        tail_sum = exp(Real::of_si(2 - k, w) * log(Real::of_si(cmax, w))) / Real::of_si(k - 2, w);
    }
    Real out(32);
    Real v = exp(lt) * tail_sum;
    mpfr_set(out.raw(), v.raw(), MPFR_RNDU);
    return out;
}

} // namespace

RhsResult trace_rhs(long k, long m, long n, long q, long cmax, mpfr_prec_t prec) {
    if (k % 2 != 0 || k < 4) throw std::invalid_argument("trace_rhs: k must be even and >= 4");
    if (m < 1 || n < 1 || q < 1 || cmax < 0) throw std::invalid_argument("trace_rhs: bad arguments");
    mpfr_prec_t w = prec + 32;
    int ik = (k % 4 == 0) ? 1 : -1;
    Real pi = Real::pi(w);
    Real four_pi_s = ldexp2(pi, 2) * sqrt(Real::of_si(m, w) * Real::of_si(n, w));
    ErrBoundedReal csum = ErrBoundedReal::exact_si(0, w);
    for (long c = 1; c <= cmax; ++c) {
        long cq = c * q;
        ErrBoundedReal s = kloosterman(m, n, cq, w);
        if (s.value.is_zero() && s.err_d() == 0) continue;
        ErrBoundedReal j = specialfn::bessel_j(k - 1, four_pi_s / Real::of_si(cq, w), w);
        ErrBoundedReal term = s * j / ErrBoundedReal::exact_si(cq, w);
        csum = csum + term;
    }
    Real two_pi_signed = ldexp2(pi, 1);
    if (ik < 0) two_pi_signed = -two_pi_signed;
    ErrBoundedReal bessel_sum = scale(csum, two_pi_signed);
    ErrBoundedReal total = bessel_sum;
    int delta = (m == n) ? 1 : 0;
    if (delta) total = total + ErrBoundedReal::exact_si(1, w);
    RhsResult r;
    r.bessel_sum = bessel_sum;
    r.value = total;
    r.tail_bound = rhs_tail_bound(k, m, n, q, cmax, prec);
    return r;
}

ErrBoundedReal trace_lhs(const std::vector<HeckeEigenform>& forms,
                         const std::vector<HarmonicWeight>& weights, long m, long n) {
    if (forms.size() != weights.size())
        throw std::invalid_argument("trace_lhs: eigen-data / weight count mismatch");
    if (forms.empty()) return ErrBoundedReal::exact_si(0);
    long k = forms.front().k;
    mpfr_prec_t prec = forms.front().prec_bits;
    ErrBoundedReal acc = ErrBoundedReal::exact_si(0, prec + 32);
    for (std::size_t i = 0; i < forms.size(); ++i) {
        ErrBoundedReal t = forms[i].lam(m) * forms[i].lam(n) / weights[i].omega_star;
        acc = acc + t;
    }
    Real factor = Real::of_si(12, prec + 32) / Real::of_si(k - 1, prec + 32);
    return scale(acc, factor);
}

TraceReport trace_check(const std::vector<HeckeEigenform>& forms,
                        const std::vector<HarmonicWeight>& weights, long k, long m, long n,
                        long cmax, mpfr_prec_t prec) {
    TraceReport rep;
    rep.k = k;
    rep.m = m;
    rep.n = n;
    rep.q = 1;
    rep.cmax = cmax;
    rep.rhs_delta = (m == n) ? 1 : 0;
    rep.lhs = trace_lhs(forms, weights, m, n);
    RhsResult rhs = trace_rhs(k, m, n, 1, cmax, prec);
    rep.rhs_bessel_tail = rhs.bessel_sum;
    rep.tail_bound = rhs.tail_bound.to_double();
    rep.discrepancy = std::abs((rep.lhs.value - rhs.value.value).to_double());
    double sqrt_mn = std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    rep.pet_regime = sqrt_mn <= static_cast<double>(k) / (40.0 * 3.14159265358979323846);
    if (rep.pet_regime)
        rep.pet_deviation =
            std::abs((rep.lhs.value - Real::of_si(rep.rhs_delta, 64)).to_double());
    return rep;
}

} // namespace petersson
} // namespace modl
