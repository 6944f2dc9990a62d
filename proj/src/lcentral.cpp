#include "modl/lcentral.hpp"

#include "modl/characters.hpp"
#include "modl/petersson.hpp"
#include "modl/specialfn.hpp"
#include "modl/util.hpp"

#include <cmath>
#include <stdexcept>

namespace modl {
namespace lcentral {

namespace {

// Tail of 2 sum_{n>M} lambda chi n^{-1/2} V(n/|D|), via |lambda(n)| <= d(n)
// <= 2 sqrt(n) and the continued-fraction bound
// Q(a,y) <= y^a e^{-y} / (Gamma(a) (y - a + 1)). Terms decay at least
// geometrically with ratio rho = exp(-2pi/|D| + a/(M+1)) < 1 for M >= 2k|D|.
Real afe_tail_bound(long k, long D, long M, mpfr_prec_t prec) {
    mpfr_prec_t w = prec + 16;
    long aD = std::labs(D);
    Real a = Real::of_si(k / 2, w);
    Real y1 = ldexp2(Real::pi(w), 1) * Real::of_si(M + 1, w) / Real::of_si(aD, w);
    Real da = y1 - a + Real::of_si(1, w);
    if (!(da.sign() > 0)) return Real::pos_inf();
    Real lt = a * log(y1) - y1 - mpfr_lngamma_real(Real(a)) - log(da);
    Real rho = exp(-ldexp2(Real::pi(w), 1) / Real::of_si(aD, w) + a / Real::of_si(M + 1, w));
    if (!(rho < Real::of_si(1, w))) return Real::pos_inf();
    Real bound = ldexp2(exp(lt), 2) / (Real::of_si(1, w) - rho);
    Real out(32);
    mpfr_set(out.raw(), bound.raw(), MPFR_RNDU);
    return out;
}

} // namespace

std::vector<ErrBoundedReal> v_kernel_row(long k, long D, long cutoff, mpfr_prec_t prec) {
    long aD = std::labs(D);
    std::vector<ErrBoundedReal> row(static_cast<std::size_t>(cutoff) + 1);
    for (long n = 1; n <= cutoff; ++n) {
        Real x = Real::of_si(n, prec + 16) / Real::of_si(aD, prec + 16);
        row[static_cast<std::size_t>(n)] = specialfn::V(x, k, prec);
    }
    return row;
}

CentralValue central_value_with_kernel(const HeckeEigenform& f, long D, double cutoff_mult,
                                       const std::vector<ErrBoundedReal>& vrow) {
    long k = f.k;
    if (!characters::parity_matches(D, k))
        throw std::domain_error("central_value: parity mismatch, chi_D(-1) != i^k "
                                "(central value vanishes structurally)");
    long aD = std::labs(D);
    long cutoff = static_cast<long>(std::ceil(cutoff_mult * static_cast<double>(k) * aD));
    if (f.nmax < cutoff)
        throw std::invalid_argument("central_value: insufficient eigen-data (nmax < cutoff)");
    if (static_cast<long>(vrow.size()) <= cutoff)
        throw std::invalid_argument("central_value: kernel row shorter than cutoff");
    mpfr_prec_t prec = f.prec_bits;
    mpfr_prec_t w = prec + 32;
    ErrBoundedReal acc = ErrBoundedReal::exact_si(0, w);
    for (long n = 1; n <= cutoff; ++n) {
        int ch = characters::chi(D, n);
        if (ch == 0) continue;
        ErrBoundedReal term = f.lam(n) * vrow[static_cast<std::size_t>(n)];
        Real inv_sqrt = Real::of_si(1, w) / sqrt(Real::of_si(n, w));
        term = scale(term, ch > 0 ? inv_sqrt : -inv_sqrt);
        acc = acc + term;
    }
    acc = scale(acc, Real::of_si(2, w));
    Real tail = afe_tail_bound(k, D, cutoff, prec);
    Real err(32);
    mpfr_add(err.raw(), acc.err.raw(), tail.raw(), MPFR_RNDU);
    CentralValue cv;
    cv.k = k;
    cv.eigen_index = f.eigen_index;
    cv.D = D;
    cv.value = ErrBoundedReal(add_prec(acc.value, Real::of_si(0, prec), prec), err);
    cv.cutoff = cutoff;
    cv.cutoff_mult = cutoff_mult;
    return cv;
}

CentralValue central_value(const HeckeEigenform& f, long D, double cutoff_mult) {
    long aD = std::labs(D);
    long cutoff = static_cast<long>(std::ceil(cutoff_mult * static_cast<double>(f.k) * aD));
    auto vrow = v_kernel_row(f.k, D, cutoff, f.prec_bits);
    return central_value_with_kernel(f, D, cutoff_mult, vrow);
}

HarmonicWeight omega_star_series(const HeckeEigenform& f, double X) {
    if (X < 1) throw std::invalid_argument("omega_star_series: X must be >= 1");
    long ncut2 = static_cast<long>(std::ceil(70.0 * X));
    if (f.nmax < ncut2)
        throw std::invalid_argument("omega_star_series: insufficient eigen-data, need nmax >= 70 X");
    mpfr_prec_t prec = f.prec_bits;
    mpfr_prec_t w = prec + 32;

    // lambda(n^2) by multiplicative extension over a smallest-prime-factor table
    auto spf = spf_table(static_cast<std::uint32_t>(ncut2));
    std::vector<ErrBoundedReal> lam_sq(static_cast<std::size_t>(ncut2) + 1);
    lam_sq[1] = ErrBoundedReal::exact_si(1, w);
    for (long n = 2; n <= ncut2; ++n) {
        long p = spf[static_cast<std::size_t>(n)];
        long m = n, e = 0;
        while (m % p == 0) { m /= p; ++e; }
        ErrBoundedReal pe = f.lambda_prime_power(p, 2 * e);
        lam_sq[static_cast<std::size_t>(n)] = (m == 1) ? pe : pe * lam_sq[static_cast<std::size_t>(m)];
    }

    auto smoothed = [&](double Xv, long ncut) -> ErrBoundedReal {
        Real inv_x = Real::of_si(1, w) / Real::of(Xv, w);
        ErrBoundedReal s = ErrBoundedReal::exact_si(0, w);
        Real eweight = exp(-inv_x); // e^{-1/X}
        Real cur = Real::of_si(1, w);
        for (long n = 1; n <= ncut; ++n) {
            cur = cur * eweight; // e^{-n/X}
            ErrBoundedReal t = scale(lam_sq[static_cast<std::size_t>(n)],
                                     cur / Real::of_si(n, w));
            s = s + t;
        }
        // tail: sum_{n>ncut} d(n^2)/n e^{-n/X} with d(n^2) <= n^{1.585}
        Real M = Real::of(static_cast<double>(ncut), w);
        Real Xr = Real::of(Xv, w);
        Real expo = Real::of(1.585, w);
        Real tail = pow(Xr, expo) * pow(M / Xr, Real::of(0.585, w)) * exp(-M / Xr) *
                    Real::of_si(4, w);
        Real e2(32);
        mpfr_add(e2.raw(), s.err.raw(), tail.raw(), MPFR_RNDU);
        return {s.value, e2};
    };

    long ncut1 = static_cast<long>(std::ceil(35.0 * X));
    ErrBoundedReal s1 = smoothed(X, std::min(ncut1 * 2, ncut2));
    ErrBoundedReal s2 = smoothed(2.0 * X, ncut2);

    // Richardson: the leading error term of the smoothed sum is c/X
    ErrBoundedReal extrap = scale(s2, Real::of_si(2, w)) - s1;
    Real diff(32);
    Real dv = abs(s2.value - s1.value);
    mpfr_set(diff.raw(), dv.raw(), MPFR_RNDU);
    mpfr_add(diff.raw(), extrap.err.raw(), diff.raw(), MPFR_RNDU);

    HarmonicWeight hw;
    hw.k = f.k;
    hw.eigen_index = f.eigen_index;
    hw.omega_star = ErrBoundedReal(add_prec(extrap.value, Real::of_si(0, prec), prec), diff);
    hw.method_tag = "series";
    if (!(hw.omega_star.value.sign() > 0))
        throw AssertionFailure("omega_star_series: nonpositive weight");
    return hw;
}

std::vector<HarmonicWeight> omega_star_trace(const std::vector<HeckeEigenform>& forms,
                                             mpfr_prec_t prec) {
    std::vector<HarmonicWeight> out;
    if (forms.empty()) return out;
    long k = forms.front().k;
    std::size_t d = forms.size();
    mpfr_prec_t w = prec + 64;

    // cmax from the analytic tail bound: the remainder of the c-sum is below
    // C * cmax^{2-k} with C = 2 pi (2 pi sqrt(n))^{k-1} / ((k-2) Gamma(k)),
    // solved for a 2^-96 absolute target (far below every downstream use)
    long cmax = 8;
    {
        double lc = std::log(2 * 3.141592653589793) +
                    0.5 * (k - 1) * std::log(4.0 * 9.869604401089358 * static_cast<double>(d)) -
                    std::lgamma(static_cast<double>(k)) - std::log(static_cast<double>(k - 2));
        double need = (lc + 96.0 * std::log(2.0)) / static_cast<double>(k - 2);
        cmax = std::max<long>(8, static_cast<long>(std::ceil(std::exp(need))) + 1);
        if (cmax > 20000) cmax = 20000;
    }

    std::vector<ErrBoundedReal> rhs(d);
    Real factor = Real::of_si(k - 1, w) / Real::of_si(12, w);
    for (std::size_t j = 0; j < d; ++j) {
        auto r = petersson::trace_rhs(k, 1, static_cast<long>(j) + 1, 1, cmax, w);
        Real e(32);
        mpfr_add(e.raw(), r.value.err.raw(), r.tail_bound.raw(), MPFR_RNDU);
        rhs[j] = scale(ErrBoundedReal(r.value.value, e), factor);
    }

    // solve [lambda_f(j)] y = rhs for y_f = 1/omega_f*
    std::vector<std::vector<Real>> A(d, std::vector<Real>(d, Real(w)));
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t i = 0; i < d; ++i)
            A[j][i] = add_prec(forms[i].lam(static_cast<long>(j) + 1).value, Real::of_si(0, w), w);

    // explicit inverse (d <= ~25) for both solve and first-order error transport
    std::vector<std::vector<Real>> inv(d, std::vector<Real>(d, Real(w)));
    {
        std::vector<std::vector<Real>> M(A);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                inv[i][j] = Real::of_si(i == j ? 1 : 0, w);
        for (std::size_t col = 0; col < d; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < d; ++r)
                if (abs(M[r][col]) > abs(M[piv][col])) piv = r;
            if (M[piv][col].is_zero())
                throw AssertionFailure("omega_star_trace: eigenvalue matrix singular");
            std::swap(M[piv], M[col]);
            std::swap(inv[piv], inv[col]);
            Real ip = Real::of_si(1, w) / M[col][col];
            for (std::size_t c2 = 0; c2 < d; ++c2) {
                M[col][c2] = M[col][c2] * ip;
                inv[col][c2] = inv[col][c2] * ip;
            }
            for (std::size_t r = 0; r < d; ++r) {
                if (r == col || M[r][col].is_zero()) continue;
                Real f = M[r][col];
                for (std::size_t c2 = 0; c2 < d; ++c2) {
                    M[r][c2] = M[r][c2] - f * M[col][c2];
                    inv[r][c2] = inv[r][c2] - f * inv[col][c2];
                }
            }
        }
    }

    std::vector<Real> y(d, Real(w));
    for (std::size_t i = 0; i < d; ++i) {
        Real s = Real::of_si(0, w);
        for (std::size_t j = 0; j < d; ++j) s = s + inv[i][j] * rhs[j].value;
        y[i] = s;
    }
    // input uncertainty per equation: rhs err + sum_i |y_i| lambda err
    std::vector<Real> ein(d, Real(32));
    for (std::size_t j = 0; j < d; ++j) {
        Real e(64);
        mpfr_set(e.raw(), rhs[j].err.raw(), MPFR_RNDU);
        for (std::size_t i = 0; i < d; ++i) {
            Real t = abs(y[i]) * forms[i].lam(static_cast<long>(j) + 1).err;
            mpfr_add(e.raw(), e.raw(), t.raw(), MPFR_RNDU);
        }
        ein[j] = e;
    }

    out.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        Real ey(64);
        mpfr_set_zero(ey.raw(), 1);
        for (std::size_t j = 0; j < d; ++j) {
            Real t = abs(inv[i][j]) * ein[j];
            mpfr_add(ey.raw(), ey.raw(), t.raw(), MPFR_RNDU);
        }
        if (!(y[i].sign() > 0))
            throw AssertionFailure("omega_star_trace: nonpositive 1/omega* at k=" +
                                   std::to_string(k));
        Real omega = Real::of_si(1, w) / y[i];
        Real eo(32);
        mpfr_mul(eo.raw(), ey.raw(), omega.raw(), MPFR_RNDU);
        mpfr_mul(eo.raw(), eo.raw(), omega.raw(), MPFR_RNDU);
        Real u = ulp_of(omega);
        mpfr_add(eo.raw(), eo.raw(), u.raw(), MPFR_RNDU);
        HarmonicWeight hw;
        hw.k = k;
        hw.eigen_index = forms[i].eigen_index;
        hw.omega_star = ErrBoundedReal(add_prec(omega, Real::of_si(0, prec), prec), eo);
        hw.method_tag = "trace-inverted";
        out.push_back(std::move(hw));
    }
    return out;
}

ErrBoundedReal moment_sum(long k, int r, bool weighted, long D, mpfr_prec_t prec,
                          double cutoff_mult) {
    if (r < 1 || r > 3) throw std::invalid_argument("moment_sum: r must be in {1,2,3}");
    if (dim_cusp_forms(k) == 0) return ErrBoundedReal::exact_si(0, prec);
    if (!characters::parity_matches(D, k))
        throw std::domain_error("moment_sum: parity mismatch, chi_D(-1) != i^k");
    long aD = std::labs(D);
    long cutoff = static_cast<long>(std::ceil(cutoff_mult * static_cast<double>(k) * aD));
    auto forms = eigenforms::eigenforms(k, cutoff, prec);
    std::vector<HarmonicWeight> weights;
    if (weighted) weights = omega_star_trace(forms, prec);
    auto vrow = v_kernel_row(k, D, cutoff, prec);
    ErrBoundedReal acc = ErrBoundedReal::exact_si(0, prec + 32);
    for (std::size_t i = 0; i < forms.size(); ++i) {
        CentralValue cv = central_value_with_kernel(forms[i], D, cutoff_mult, vrow);
        ErrBoundedReal t = cv.value;
        for (int j = 1; j < r; ++j) t = t * cv.value;
        if (weighted) t = t / weights[i].omega_star;
        acc = acc + t;
    }
    return acc;
}

} // namespace lcentral
} // namespace modl
