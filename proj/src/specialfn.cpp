#include "modl/specialfn.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace modl {
namespace specialfn {

namespace {

Real err_from(double scale_log2, mpfr_prec_t /*prec*/) {
    Real e(32);
    mpfr_set_d(e.raw(), 1.0, MPFR_RNDU);
    mpfr_mul_2si(e.raw(), e.raw(), static_cast<long>(scale_log2), MPFR_RNDU);
    return e;
}

// Q by the lower-gamma power series, for y < a+1:
// P(a,y) = y^a e^-y sum_m y^m / Gamma(a+m+1), Q = 1 - P.
ErrBoundedReal gamma_q_series(const Real& a, const Real& y, mpfr_prec_t prec) {
    mpfr_prec_t w = prec + 32;
    Real lg = mpfr_lngamma_real(Real(a));
    Real one = Real::of_si(1, w);
    Real pref = exp(mul_prec(a, log(y), w) - y - mpfr_lngamma_real(a + Real::of_si(1, w)));
    (void)lg;
    Real t = one, s = one;
    Real apm = a + one; // a + m + 1 at m = 0
    long iters = 0;
    for (;; ++iters) {
        t = mul_prec(t, y, w) / apm;
        s = s + t;
        apm = apm + one;
        if (t < ldexp2(s, -(w - 8))) break;
        if (iters > 4 * static_cast<long>(w) + 10000)
            throw std::runtime_error("gamma_q: series did not converge");
    }
    Real p = mul_prec(pref, s, w);
    Real q = sub_prec(one, p, prec);
    // tail of the positive series is below the stopping term by construction
    Real err = err_from(-static_cast<double>(prec) + 6, prec);
    Real rel(32);
    mpfr_abs(rel.raw(), p.raw(), MPFR_RNDU);
    mpfr_mul_2si(rel.raw(), rel.raw(), -static_cast<long>(w - 12), MPFR_RNDU);
    mpfr_add(err.raw(), err.raw(), rel.raw(), MPFR_RNDU);
    return {std::move(q), std::move(err)};
}

// Q by the Legendre continued fraction (modified Lentz), for y >= a+1:
// Q(a,y) = e^{-y + a ln y - lgamma(a)} / (y+1-a - 1(1-a)/(y+3-a - ...)).
ErrBoundedReal gamma_q_cf(const Real& a, const Real& y, mpfr_prec_t prec) {
    mpfr_prec_t w = prec + 32;
    Real tiny = Real::from_str("1e-2000000", w);
    Real one = Real::of_si(1, w);
    Real b = y + one - a;
    Real c = one / tiny;
    Real d = one / b;
    Real h = d;
    long cap = 64 * static_cast<long>(w) + 100000;
    for (long i = 1;; ++i) {
        Real an = Real::of_si(-i, w) * (Real::of_si(i, w) - a);
        b = b + Real::of_si(2, w);
        d = an * d + b;
        if (abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (abs(c) < tiny) c = tiny;
        d = one / d;
        Real del = d * c;
        h = h * del;
        Real dev = abs(del - one);
        if (dev < ldexp2(one, -(w - 4))) break;
        if (i > cap) throw std::runtime_error("gamma_q: continued fraction did not converge");
    }
    Real q = exp(mul_prec(a, log(y), w) - y - mpfr_lngamma_real(Real(a))) * h;
    Real qr = add_prec(q, Real::of_si(0, prec), prec);
    Real err(32);
    mpfr_abs(err.raw(), q.raw(), MPFR_RNDU);
    mpfr_mul_2si(err.raw(), err.raw(), -static_cast<long>(prec) + 8, MPFR_RNDU);
    Real floor_err = err_from(-2 * static_cast<double>(prec), prec);
    mpfr_add(err.raw(), err.raw(), floor_err.raw(), MPFR_RNDU);
    return {std::move(qr), std::move(err)};
}

} // namespace

ErrBoundedReal gamma_q(const Real& a, const Real& y, mpfr_prec_t prec) {
    if (a.sign() <= 0) throw std::domain_error("gamma_q: a must be positive");
    if (y.sign() < 0) throw std::domain_error("gamma_q: y must be >= 0");
    if (y.is_zero()) return ErrBoundedReal::exact_si(1, prec);
    Real split = a + Real::of_si(1, 64);
    if (y < split) return gamma_q_series(a, y, prec);
    return gamma_q_cf(a, y, prec);
}

ErrBoundedReal V(const Real& x, long k, mpfr_prec_t prec) {
    if (x.sign() <= 0) throw std::domain_error("V: x must be positive");
    if (k < 2 || k % 2 != 0) throw std::domain_error("V: k must be even and >= 2");
    mpfr_prec_t w = prec + 16;
    Real two_pi_x = ldexp2(Real::pi(w), 1) * x;
    Real a = Real::of_si(k / 2, w);
    return gamma_q(a, two_pi_x, prec);
}

// ---------------------------------------------------------------------------
// Contour validation: complex arithmetic and log-gamma by Stirling.

namespace {

struct Cplx {
    Real re, im;
};

Cplx cadd(const Cplx& a, const Cplx& b) { return {a.re + b.re, a.im + b.im}; }
Cplx csub(const Cplx& a, const Cplx& b) { return {a.re - b.re, a.im - b.im}; }
Cplx cmul(const Cplx& a, const Cplx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Cplx cdiv(const Cplx& a, const Cplx& b) {
    Real n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
Cplx cexp(const Cplx& a) {
    Real m = exp(a.re);
    return {m * cos(a.im), m * sin(a.im)};
}
Cplx clog(const Cplx& a) {
    // principal branch; callers keep Re > 0
    Real m = sqrt(a.re * a.re + a.im * a.im);
    Real ang(a.re.prec());
    mpfr_atan2(ang.raw(), a.im.raw(), a.re.raw(), MPFR_RNDN);
    return {log(m), std::move(ang)};
}

const char* kBernoulliNum[15] = {
    "1", "-1", "1", "-1", "5", "-691", "7", "-3617", "43867", "-174611",
    "854513", "-236364091", "8553103", "-23749461029", "8615841276005"};
const char* kBernoulliDen[15] = {
    "6", "30", "42", "30", "66", "2730", "6", "510", "798", "330",
    "138", "2730", "6", "870", "14322"};

// log Gamma(z) for Re(z) > 0 by Stirling series after shifting Re(z+M) >= 50.
Cplx clgamma(Cplx z, mpfr_prec_t w) {
    Real fifty = Real::of_si(50, w);
    long shift = 0;
    if (z.re < fifty) shift = 50 - z.re.to_long();
    Cplx acc{Real::of_si(0, w), Real::of_si(0, w)};
    for (long m = 0; m < shift; ++m) {
        Cplx zm{z.re + Real::of_si(m, w), z.im};
        acc = cadd(acc, clog(zm));
    }
    Cplx wz{z.re + Real::of_si(shift, w), z.im};
    Cplx lw = clog(wz);
    Cplx half{Real::of(0.5, w), Real::of_si(0, w)};
    Cplx res = cmul(csub(wz, half), lw);
    res = csub(res, wz);
    Real ln2pi = log(ldexp2(Real::pi(w), 1));
    res.re = res.re + ldexp2(ln2pi, -1);
    // sum B_2j / ((2j-1)(2j) w^{2j-1})
    Cplx winv = cdiv(Cplx{Real::of_si(1, w), Real::of_si(0, w)}, wz);
    Cplx winv2 = cmul(winv, winv);
    Cplx wpow = winv;
    for (int j = 1; j <= 15; ++j) {
        mpq_class b(std::string(kBernoulliNum[j - 1]) + "/" + kBernoulliDen[j - 1]);
        b /= mpq_class((2 * j - 1) * (2 * j));
        Real coef = Real::of(b, w);
        res.re = res.re + coef * wpow.re;
        res.im = res.im + coef * wpow.im;
        wpow = cmul(wpow, winv2);
    }
    return csub(res, acc);
}

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration.
void gauss_legendre_impl(int n, mpfr_prec_t w, std::vector<Real>& xs, std::vector<Real>& ws) {
    xs.assign(n, Real(w));
    ws.assign(n, Real(w));
    Real one = Real::of_si(1, w);
    for (int i = 0; i < n; ++i) {
        Real x = Real::of(std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5)), w);
        for (int it = 0; it < 200; ++it) {
            // evaluate P_n and P_n' by recurrence
            Real p0 = one, p1 = x;
            for (int j = 2; j <= n; ++j) {
                Real p2 = (Real::of_si(2 * j - 1, w) * x * p1 - Real::of_si(j - 1, w) * p0) /
                          Real::of_si(j, w);
                p0 = p1;
                p1 = p2;
            }
            Real dp = Real::of_si(n, w) * (x * p1 - p0) / (x * x - one);
            Real dx = p1 / dp;
            x = x - dx;
            if (abs(dx) < ldexp2(one, -(static_cast<long>(w) - 8))) break;
        }
        Real p0 = one, p1 = x;
        for (int j = 2; j <= n; ++j) {
            Real p2 = (Real::of_si(2 * j - 1, w) * x * p1 - Real::of_si(j - 1, w) * p0) /
                      Real::of_si(j, w);
            p0 = p1;
            p1 = p2;
        }
        Real dp = Real::of_si(n, w) * (x * p1 - p0) / (x * x - one);
        xs[i] = x;
        ws[i] = Real::of_si(2, w) / ((one - x * x) * dp * dp);
    }
}

} // namespace

Real V_contour(double x, long k, double c, mpfr_prec_t prec) {
    if (x <= 0) throw std::domain_error("V_contour: x must be positive");
    if (k < 2 || k % 2 != 0) throw std::domain_error("V_contour: k must be even and >= 2");
    if (c <= 0.5) throw std::invalid_argument("V_contour: require c > 1/2");
    mpfr_prec_t w = prec + 64;
    Real pi = Real::pi(w);
    Real lg_k2 = mpfr_lngamma_real(Real::of_si(k / 2, w));
    Real l2pix = log(ldexp2(pi, 1) * Real::of(x, w));
    Real cc = Real::of(c, w);

    auto integrand = [&](const Real& t) -> Real {
        Cplx s{cc, t};
        Cplx z{cc + Real::of_si(k / 2, w), t};
        Cplx lg = clgamma(z, w);
        // exp(lgamma(s+k/2) - lgamma(k/2) - s log(2 pi x)) / s
        Cplx e{lg.re - lg_k2 - cc * l2pix, lg.im - t * l2pix};
        Cplx val = cdiv(cexp(e), s);
        return val.re;
    };

    double T = std::max<double>(80.0, static_cast<double>(k) + 60.0);
    int panels = static_cast<int>(T);
    std::vector<Real> xs, ws;
    gauss_legendre(24, w, xs, ws);
    Real total = Real::of_si(0, w);
    for (int pnl = 0; pnl < panels; ++pnl) {
        Real lo = Real::of_si(pnl, w) * Real::of(T, w) / Real::of_si(panels, w);
        Real hi = Real::of_si(pnl + 1, w) * Real::of(T, w) / Real::of_si(panels, w);
        Real mid = ldexp2(lo + hi, -1);
        Real half = ldexp2(hi - lo, -1);
        Real acc = Real::of_si(0, w);
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc = acc + ws[i] * integrand(mid + half * xs[i]);
        total = total + acc * half;
    }
    // conjugate symmetry doubles the [0, inf) half; (1/2pi) * 2 = 1/pi
    return total / pi;
}

ErrBoundedReal bessel_j(long nu, const Real& x, mpfr_prec_t prec, mpfr_prec_t max_prec) {
    if (nu < 1) throw std::domain_error("bessel_j: order must be >= 1");
    if (x.sign() <= 0) throw std::domain_error("bessel_j: x must be positive");
    double xd = x.to_double();
    long margin = static_cast<long>(1.4427 * xd) + 64;
    mpfr_prec_t w = prec + static_cast<mpfr_prec_t>(margin);
    if (w > max_prec)
        throw std::domain_error("bessel_j: argument too large for certified evaluation "
                                "(required precision exceeds cap)");
    Real half_x = ldexp2(Real(add_prec(x, Real::of_si(0, w), w)), -1);
    Real lh = log(half_x);
    Real t = exp(Real::of_si(nu, w) * lh - mpfr_lngamma_real(Real::of_si(nu + 1, w)));
    Real m2 = -(half_x * half_x);
    Real s = t;
    Real abs_acc = abs(t);
    long terms = 1;
    for (long j = 0;; ++j) {
        t = t * m2 / Real::of_si(j + 1, w) / Real::of_si(nu + j + 1, w);
        s = s + t;
        abs_acc = abs_acc + abs(t);
        ++terms;
        // once the term ratio is below 1 the series alternates with
        // decreasing magnitude, so the tail is bounded by the next term
        bool decreasing = (half_x * half_x) < (Real::of_si(j + 2, w) * Real::of_si(nu + j + 2, w));
        if (decreasing && abs(t) < ldexp2(max(abs(s), ldexp2(abs_acc, -static_cast<long>(w / 2))), -(static_cast<long>(prec) + 24)))
            break;
        if (terms > 1000000) throw std::runtime_error("bessel_j: series did not converge");
    }
    Real value = add_prec(s, Real::of_si(0, prec), prec);
    Real err(32);
    // tail (next term) + accumulated rounding ~ terms * ulp(abs_acc at w bits)
    mpfr_abs(err.raw(), t.raw(), MPFR_RNDU);
    Real rnd(32);
    mpfr_abs(rnd.raw(), abs_acc.raw(), MPFR_RNDU);
    mpfr_mul_si(rnd.raw(), rnd.raw(), 4 * terms, MPFR_RNDU);
    mpfr_mul_2si(rnd.raw(), rnd.raw(), -static_cast<long>(w), MPFR_RNDU);
    mpfr_add(err.raw(), err.raw(), rnd.raw(), MPFR_RNDU);
    Real u = ulp_of(value);
    mpfr_add(err.raw(), err.raw(), u.raw(), MPFR_RNDU);
    return {std::move(value), std::move(err)};
}

void gauss_legendre(int n, mpfr_prec_t prec, std::vector<Real>& nodes,
                    std::vector<Real>& weights) {
    gauss_legendre_impl(n, prec, nodes, weights);
}

ErrBoundedReal log_gamma(const Real& x, mpfr_prec_t prec) {
    if (x.sign() <= 0) throw std::domain_error("log_gamma: x must be positive");
    Real v = mpfr_lngamma_real(Real(add_prec(x, Real::of_si(0, prec + 8), prec + 8)));
    Real vv = add_prec(v, Real::of_si(0, prec), prec);
    Real e = ulp_of(vv);
    return {std::move(vv), std::move(e)};
}

ErrBoundedReal zeta(const Real& s, mpfr_prec_t prec) {
    if (!(s > Real::of_si(1, 32))) throw std::domain_error("zeta: require s > 1");
    Real v = mpfr_zeta_real(Real(add_prec(s, Real::of_si(0, prec + 8), prec + 8)));
    Real vv = add_prec(v, Real::of_si(0, prec), prec);
    Real e = ulp_of(vv);
    return {std::move(vv), std::move(e)};
}

} // namespace specialfn
} // namespace modl
