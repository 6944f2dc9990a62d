#include "modl/eigenforms.hpp"

#include "modl/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace modl {

ErrBoundedReal HeckeEigenform::lambda_prime_power(long p, long e) const {
    if (e == 0) return ErrBoundedReal::exact_si(1, prec_bits);
    const ErrBoundedReal& lp = lam(p);
    if (e == 1) return lp;
    ErrBoundedReal prev = ErrBoundedReal::exact_si(1, prec_bits);
    ErrBoundedReal cur = lp;
    for (long i = 2; i <= e; ++i) {
        ErrBoundedReal nxt = lp * cur - prev;
        prev = cur;
        cur = nxt;
    }
    return cur;
}

ErrBoundedReal HeckeEigenform::lambda_square(long n) const {
    if (n < 1) throw std::invalid_argument("lambda_square: n must be >= 1");
    ErrBoundedReal acc = ErrBoundedReal::exact_si(1, prec_bits);
    for (const auto& [p, e] : factorize(static_cast<std::uint64_t>(n))) {
        if (static_cast<long>(p) > nmax)
            throw std::out_of_range("lambda_square: prime factor exceeds eigen-data range");
        acc = acc * lambda_prime_power(static_cast<long>(p), 2 * e);
    }
    return acc;
}

namespace eigenforms {

std::vector<std::vector<mpq_class>> hecke_matrix(long k, long p, long nmax) {
    int d = dim_cusp_forms(k);
    if (d == 0) return {};
    if (nmax < p * d)
        throw std::invalid_argument("hecke_matrix: nmax must be >= p * dim for exact coordinates");
    std::vector<QSeries> basis = series::victor_miller_basis(k, nmax);
    mpz_class pk1;
    mpz_ui_pow_ui(pk1.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
    std::vector<std::vector<mpq_class>> m(d, std::vector<mpq_class>(d));
    for (int j = 0; j < d; ++j) {
        for (int i = 1; i <= d; ++i) {
            mpq_class v = basis[j].coeff(p * i);
            if (i % p == 0) v += mpq_class(pk1) * basis[j].coeff(i / p);
            m[i - 1][j] = v;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial: Hessenberg reduction mod word-size primes + CRT.

namespace {

std::uint64_t mod_pow(std::uint64_t b, std::uint64_t e, std::uint64_t q) {
    std::uint64_t r = 1 % q;
    b %= q;
    while (e) {
        if (e & 1) r = r * b % q;
        b = b * b % q;
        e >>= 1;
    }
    return r;
}

std::uint64_t mod_inv(std::uint64_t a, std::uint64_t q) { return mod_pow(a % q, q - 2, q); }

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
        if (n % p == 0) return n == p;
    }
    for (std::uint64_t d = 37; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

// charpoly of an n x n matrix over F_q, monic, coeffs highest degree first
std::vector<std::uint64_t> charpoly_mod(std::vector<std::vector<std::uint64_t>> a,
                                        std::uint64_t q) {
    std::size_t n = a.size();
    // Hessenberg form by similarity transforms
    for (std::size_t j = 0; j + 2 < n; ++j) {
        std::size_t piv = j + 1;
        while (piv < n && a[piv][j] == 0) ++piv;
        if (piv == n) continue;
        if (piv != j + 1) {
            std::swap(a[piv], a[j + 1]);
            for (std::size_t r = 0; r < n; ++r) std::swap(a[r][piv], a[r][j + 1]);
        }
        std::uint64_t inv = mod_inv(a[j + 1][j], q);
        for (std::size_t i = j + 2; i < n; ++i) {
            if (a[i][j] == 0) continue;
            std::uint64_t f = a[i][j] * inv % q;
            std::uint64_t nf = (q - f) % q;
            for (std::size_t c2 = 0; c2 < n; ++c2)
                a[i][c2] = (a[i][c2] + nf * a[j + 1][c2]) % q;
            for (std::size_t r = 0; r < n; ++r)
                a[r][j + 1] = (a[r][j + 1] + f * a[r][i]) % q;
        }
    }
    // p_m(x) = (x - h_mm) p_{m-1} - sum_i h_{m-i,m} (prod subdiag) p_{m-i-1}
    std::vector<std::vector<std::uint64_t>> p(n + 1);
    p[0] = {1};
    for (std::size_t m = 1; m <= n; ++m) {
        const std::size_t r = m - 1;
        std::vector<std::uint64_t> pm(m + 1, 0);
        std::uint64_t hmm = a[r][r] % q;
        for (std::size_t t = 0; t < p[m - 1].size(); ++t) {
            pm[t + 1] = (pm[t + 1] + p[m - 1][t]) % q; // x * p_{m-1}
            pm[t] = (pm[t] + (q - hmm) % q * p[m - 1][t]) % q;
        }
        std::uint64_t subprod = 1;
        for (std::size_t i = 1; i < m; ++i) {
            subprod = subprod * (a[m - i][m - i - 1] % q) % q;
            std::uint64_t coef = a[m - i - 1][r] % q * subprod % q;
            if (coef == 0) continue;
            coef = q - coef;
            // p arrays are stored lowest-degree-first; subtract coef * p_{m-i-1}
            const auto& pi = p[m - i - 1];
            for (std::size_t t = 0; t < pi.size(); ++t) pm[t] = (pm[t] + coef * pi[t]) % q;
        }
        p[m] = std::move(pm);
    }
    // stored lowest-degree-first; reverse to highest-first monic
    std::vector<std::uint64_t> out(p[n].rbegin(), p[n].rend());
    return out;
}

} // namespace

std::vector<mpz_class> charpoly(const std::vector<std::vector<mpz_class>>& m) {
    std::size_t d = m.size();
    if (d == 0) return {mpz_class(1)};
    // coefficient bound: spectral radius <= max absolute row sum
    mpz_class rho = 0;
    for (const auto& row : m) {
        mpz_class s = 0;
        for (const auto& e : row) s += abs(e);
        if (s > rho) rho = s;
    }
    rho += 1;
    // |c_i| <= C(d,i) rho^i <= (1+rho)^d
    std::size_t bound_bits = d * (mpz_sizeinbase(rho.get_mpz_t(), 2) + 1) + d + 64;

    std::vector<std::uint64_t> primes;
    std::size_t have_bits = 0;
    for (std::uint32_t cand = 0x7fffffffu; have_bits < bound_bits + 31; --cand) {
        if (!is_prime_u32(cand)) continue;
        primes.push_back(cand);
        have_bits += 30;
    }

    std::vector<std::vector<std::uint64_t>> residues;
    residues.reserve(primes.size());
    for (std::uint64_t q : primes) {
        std::vector<std::vector<std::uint64_t>> a(d, std::vector<std::uint64_t>(d));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                a[i][j] = mpz_fdiv_ui(m[i][j].get_mpz_t(), q);
        residues.push_back(charpoly_mod(std::move(a), q));
    }

    std::vector<mpz_class> out(d + 1);
    mpz_class prod_all = 1;
    for (std::uint64_t q : primes) prod_all *= static_cast<unsigned long>(q);
    for (std::size_t t = 0; t <= d; ++t) {
        // incremental CRT
        mpz_class x = residues[0][t];
        mpz_class prod = static_cast<unsigned long>(primes[0]);
        for (std::size_t i = 1; i < primes.size(); ++i) {
            unsigned long q = static_cast<unsigned long>(primes[i]);
            unsigned long xq = mpz_fdiv_ui(x.get_mpz_t(), q);
            unsigned long pq = mpz_fdiv_ui(prod.get_mpz_t(), q);
            std::uint64_t delta = (residues[i][t] + q - xq) % q;
            delta = delta * mod_inv(pq, q) % q;
            x += prod * static_cast<unsigned long>(delta);
            prod *= q;
        }
        if (x * 2 > prod_all) x -= prod_all;
        out[t] = x;
    }
    if (out[0] != 1) throw std::logic_error("charpoly: non-monic result");
    return out;
}

// ---------------------------------------------------------------------------
// Certified real roots of a squarefree real-rooted integer polynomial.

namespace {

struct CEval {
    Real re, im;
};

// Horner evaluation of P and P' at complex z, plus a bound on the evaluation
// error of P: err <= 2 deg * ulp-scale * sum |c_i| |z|^i.
void horner_c(const std::vector<Real>& coef, const Real& zr, const Real& zi, CEval& p,
              CEval& dp, Real& mag) {
    mpfr_prec_t w = zr.prec();
    p = {Real::of_si(0, w), Real::of_si(0, w)};
    dp = {Real::of_si(0, w), Real::of_si(0, w)};
    mag = Real::of_si(0, w);
    Real az = sqrt(zr * zr + zi * zi);
    for (const Real& c : coef) {
        // dp = dp*z + p
        Real t_re = dp.re * zr - dp.im * zi + p.re;
        Real t_im = dp.re * zi + dp.im * zr + p.im;
        dp = {std::move(t_re), std::move(t_im)};
        // p = p*z + c
        Real u_re = p.re * zr - p.im * zi + c;
        Real u_im = p.re * zi + p.im * zr;
        p = {std::move(u_re), std::move(u_im)};
        mag = mag * az + abs(c);
    }
}

} // namespace

std::vector<CertifiedRoot> real_roots_certified(const std::vector<mpz_class>& poly,
                                                mpfr_prec_t prec) {
    std::size_t deg = poly.size() - 1;
    std::vector<CertifiedRoot> out;
    if (deg == 0) return out;

    // Fujiwara root bound: 2 max_i |c_i/c_0|^{1/i}, computed in log2
    double lead_log2 = static_cast<double>(mpz_sizeinbase(poly[0].get_mpz_t(), 2));
    double bound_log2 = 1.0;
    for (std::size_t i = 1; i < poly.size(); ++i) {
        if (poly[i] == 0) continue;
        double li = static_cast<double>(mpz_sizeinbase(poly[i].get_mpz_t(), 2));
        bound_log2 = std::max(bound_log2, (li - lead_log2 + 2.0) / static_cast<double>(i));
    }

    mpfr_prec_t w = prec + 96;
    for (int attempt = 0; attempt < 6; ++attempt, w *= 2) {
        std::vector<Real> coef;
        coef.reserve(poly.size());
        for (const auto& c : poly) coef.push_back(Real::of(c, w));
        Real bound = ldexp2(Real::of_si(2, w), static_cast<long>(std::ceil(bound_log2)) + 1);

        // Aberth-Ehrlich from deterministic elliptic starting points
        std::vector<CEval> z(deg);
        Real pi = Real::pi(w);
        for (std::size_t i = 0; i < deg; ++i) {
            Real th = pi * Real::of_si(static_cast<long>(2 * i + 1), w) /
                      Real::of_si(static_cast<long>(2 * deg), w);
            z[i] = {bound * cos(th), ldexp2(bound, -2) * sin(th) + ldexp2(bound, -20)};
        }
        Real tol = ldexp2(Real::of_si(1, w), -(static_cast<long>(prec) + 64));
        bool converged = false;
        for (int it = 0; it < 400 && !converged; ++it) {
            converged = true;
            for (std::size_t i = 0; i < deg; ++i) {
                CEval p, dp;
                Real mag(w);
                horner_c(coef, z[i].re, z[i].im, p, dp, mag);
                Real pden = dp.re * dp.re + dp.im * dp.im;
                if (pden.is_zero()) { converged = false; continue; }
                // Newton correction N = P/P'
                Real n_re = (p.re * dp.re + p.im * dp.im) / pden;
                Real n_im = (p.im * dp.re - p.re * dp.im) / pden;
                // Aberth repulsion
                Real s_re = Real::of_si(0, w), s_im = Real::of_si(0, w);
                for (std::size_t j = 0; j < deg; ++j) {
                    if (j == i) continue;
                    Real d_re = z[i].re - z[j].re;
                    Real d_im = z[i].im - z[j].im;
                    Real dn = d_re * d_re + d_im * d_im;
                    if (dn.is_zero()) continue;
                    s_re = s_re + d_re / dn;
                    s_im = s_im - d_im / dn;
                }
                Real den_re = Real::of_si(1, w) - (n_re * s_re - n_im * s_im);
                Real den_im = -(n_re * s_im + n_im * s_re);
                Real dq = den_re * den_re + den_im * den_im;
                Real w_re, w_im;
                if (dq.is_zero()) {
                    w_re = n_re;
                    w_im = n_im;
                } else {
                    w_re = (n_re * den_re + n_im * den_im) / dq;
                    w_im = (n_im * den_re - n_re * den_im) / dq;
                }
                z[i].re = z[i].re - w_re;
                z[i].im = z[i].im - w_im;
                Real step = sqrt(w_re * w_re + w_im * w_im);
                if (step > tol * (abs(z[i].re) + Real::of_si(1, w))) converged = false;
            }
        }
        if (!converged) continue;

        // snap to the real axis and certify: all roots are real by assumption,
        // min_i |x - r_i| <= deg |P(x)/P'(x)| for real x
        std::vector<CertifiedRoot> cand;
        bool ok = true;
        for (std::size_t i = 0; i < deg && ok; ++i) {
            Real x = z[i].re;
            for (int nt = 0; nt < 4; ++nt) {
                CEval p, dp;
                Real mag(w);
                horner_c(coef, x, Real::of_si(0, w), p, dp, mag);
                if (dp.re.is_zero()) break;
                x = x - p.re / dp.re;
            }
            CEval p, dp;
            Real mag(w);
            horner_c(coef, x, Real::of_si(0, w), p, dp, mag);
            Real everr = ldexp2(mag * Real::of_si(static_cast<long>(4 * deg + 4), w),
                                -static_cast<long>(w));
            Real pa = abs(p.re) + everr;
            Real dpa = abs(dp.re) - everr;
            if (!(dpa.sign() > 0)) { ok = false; break; }
            Real rad = Real::of_si(static_cast<long>(deg), w) * pa / dpa;
            cand.push_back({std::move(x), std::move(rad)});
        }
        if (!ok) continue;
        std::sort(cand.begin(), cand.end(),
                  [](const CertifiedRoot& a, const CertifiedRoot& b) { return a.value < b.value; });
        // disjoint inclusion intervals => exactly one simple root in each
        bool disjoint = true;
        for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
            if (!(cand[i].value + cand[i].radius < cand[i + 1].value - cand[i + 1].radius))
                disjoint = false;
        }
        Real tgt = ldexp2(Real::of_si(1, 64), -(static_cast<long>(prec) + 48));
        bool tight = true;
        for (const auto& r : cand)
            if (!(r.radius <= tgt * (abs(r.value) + Real::of_si(1, 64)))) tight = false;
        if (disjoint && tight) return cand;
    }
    throw std::runtime_error("real_roots_certified: could not certify roots at requested precision");
}

// ---------------------------------------------------------------------------
// Eigenform construction.

namespace {

struct EigenRaw {
    Real a2;                  // T_2 eigenvalue (arithmetic normalization)
    std::vector<Real> coeffs; // a_f(n), n = 0..nmax (index 0 unused)
};

std::vector<std::vector<mpz_class>> to_z(const std::vector<std::vector<mpq_class>>& m) {
    std::vector<std::vector<mpz_class>> z(m.size(), std::vector<mpz_class>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (m[i][j].get_den() != 1) throw std::logic_error("hecke matrix entry not integral");
            z[i][j] = m[i][j].get_num();
        }
    return z;
}

// Solve (M - a I) v = 0 at precision w; v normalized so v[0] = 1. The free
// coordinate is chosen as the last column by default; if the residual of the
// eigen-equation is not small the other choices are tried.
std::vector<Real> null_vector(const std::vector<std::vector<mpz_class>>& m, const Real& a,
                              mpfr_prec_t w) {
    std::size_t d = m.size();
    if (d == 1) return {Real::of_si(1, w)};

    Real norm_scale = abs(a);
    for (std::size_t i = 0; i < d; ++i) {
        Real rs = Real::of_si(0, w);
        for (std::size_t j = 0; j < d; ++j) rs = rs + abs(Real::of(m[i][j], w));
        norm_scale = max(norm_scale, rs);
    }

    auto attempt = [&](std::size_t free_col) -> std::vector<Real> {
        std::vector<std::vector<Real>> A(d, std::vector<Real>(d, Real(w)));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                std::size_t jj = j == free_col ? d - 1 : (j == d - 1 ? free_col : j);
                A[i][j] = Real::of(m[i][jj], w);
                if (i == jj) A[i][j] = A[i][j] - a;
            }
        for (std::size_t col = 0; col + 1 < d; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < d; ++r)
                if (abs(A[r][col]) > abs(A[piv][col])) piv = r;
            if (piv != col) std::swap(A[piv], A[col]);
            if (A[col][col].is_zero()) return {};
            for (std::size_t r = col + 1; r < d; ++r) {
                if (A[r][col].is_zero()) continue;
                Real f = A[r][col] / A[col][col];
                for (std::size_t c2 = col; c2 < d; ++c2) A[r][c2] = A[r][c2] - f * A[col][c2];
            }
        }
        std::vector<Real> y(d, Real(w));
        y[d - 1] = Real::of_si(1, w);
        for (std::size_t ii = d - 1; ii-- > 0;) {
            Real s = Real::of_si(0, w);
            for (std::size_t j = ii + 1; j < d; ++j) s = s + A[ii][j] * y[j];
            y[ii] = -s / A[ii][ii];
        }
        // undo the column swap
        std::vector<Real> x(d, Real(w));
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t jj = j == free_col ? d - 1 : (j == d - 1 ? free_col : j);
            x[jj] = y[j];
        }
        return x;
    };

    for (std::size_t fc = d; fc-- > 0;) {
        std::vector<Real> x = attempt(fc);
        if (x.empty()) continue;
        // residual and magnitude checks
        Real xmax = Real::of_si(0, w);
        for (const auto& xi : x) xmax = max(xmax, abs(xi));
        Real rmax = Real::of_si(0, w);
        for (std::size_t i = 0; i < d; ++i) {
            Real s = Real::of_si(0, w);
            for (std::size_t j = 0; j < d; ++j) s = s + Real::of(m[i][j], w) * x[j];
            s = s - a * x[i];
            rmax = max(rmax, abs(s));
        }
        if (rmax > ldexp2(norm_scale * xmax, -static_cast<long>(w / 2))) continue;
        if (x[0].is_zero()) continue;
        Real inv = Real::of_si(1, w) / x[0];
        for (auto& xi : x) xi = xi * inv;
        return x;
    }
    throw std::runtime_error("null_vector: no stable null direction found");
}

std::vector<EigenRaw> eigen_pipeline(long nmax, const std::vector<QSeries>& basis,
                                     const std::vector<std::vector<mpz_class>>& mdiag,
                                     const std::vector<CertifiedRoot>& roots, mpfr_prec_t w) {
    std::size_t d = mdiag.size();
    if (roots.size() != d) throw std::runtime_error("eigen_pipeline: root count mismatch");
    std::vector<EigenRaw> res(d);
    for (std::size_t i = 0; i < d; ++i) {
        Real a = add_prec(roots[i].value, Real::of_si(0, w), w);
        std::vector<Real> v = null_vector(mdiag, a, w);
        EigenRaw er;
        er.coeffs.assign(static_cast<std::size_t>(nmax) + 1, Real(w));
        for (long n = 1; n <= nmax; ++n) {
            Real s = Real::of_si(0, w);
            for (std::size_t j = 0; j < d; ++j) {
                const mpq_class& c = basis[j].coeff(n);
                if (sgn(c) == 0) continue;
                if (c.get_den() != 1) throw std::logic_error("basis coefficient not integral");
                s = s + v[j] * Real::of(c.get_num(), w);
            }
            er.coeffs[static_cast<std::size_t>(n)] = std::move(s);
        }
        // echelon coordinates: a_f(n) = v_n for n <= d, so coeffs[2] is a_f(2)
        er.a2 = er.coeffs[2];
        res[i] = std::move(er);
    }
    return res;
}

} // namespace

std::vector<HeckeEigenform> eigenforms(long k, long nmax, mpfr_prec_t prec_bits) {
    if (k % 2 != 0) throw std::invalid_argument("eigenforms: k must be even");
    if (k < 12) return {};
    int d = dim_cusp_forms(k);
    if (d == 0) return {};
    long need = std::max<long>(nmax, 3 * d); // T_3 needed if the fallback triggers
    if (need < 2) need = 2;
    std::vector<QSeries> basis = series::victor_miller_basis(k, need);

    auto m2 = to_z(hecke_matrix(k, 2, need));
    std::vector<std::vector<mpz_class>> mdiag = m2;
    std::vector<mpz_class> poly = charpoly(m2);

    // Maeda-type distinctness assertion on T_2, with T_2 + T_3 fallback
    auto roots = real_roots_certified(poly, prec_bits + 160);
    {
        Real scale = sqrt_pow_z(mpz_class(2), k - 1, 96);
        Real tol = ldexp2(scale, -static_cast<long>(prec_bits / 4));
        bool distinct = true;
        for (std::size_t i = 0; i + 1 < roots.size(); ++i)
            if (abs(roots[i + 1].value - roots[i].value) < tol) distinct = false;
        if (!distinct) {
            auto m3 = to_z(hecke_matrix(k, 3, need));
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) mdiag[i][j] = m2[i][j] + m3[i][j];
            poly = charpoly(mdiag);
            roots = real_roots_certified(poly, prec_bits + 160);
            Real scale2 = scale + sqrt_pow_z(mpz_class(3), k - 1, 96);
            Real tol2 = ldexp2(scale2, -static_cast<long>(prec_bits / 4));
            for (std::size_t i = 0; i + 1 < roots.size(); ++i)
                if (abs(roots[i + 1].value - roots[i].value) < tol2)
                    throw AssertionFailure("eigenforms: T_2 and T_2+T_3 both have near-degenerate "
                                           "eigenvalues at k=" + std::to_string(k));
        }
    }

    // Entries of T_p and of the echelon basis grow like n^{(k-1)/2}; the
    // elimination and the coefficient dot products cancel across that range,
    // so the working precision must absorb it.
    std::size_t entry_bits = 0;
    for (const auto& row : mdiag)
        for (const auto& e : row)
            entry_bits = std::max(entry_bits, mpz_sizeinbase(e.get_mpz_t(), 2));
    double dyn = static_cast<double>(k - 1) / 2.0 * std::log2(2.0 * d) + 64.0;
    mpfr_prec_t extra = static_cast<mpfr_prec_t>(std::max<double>(static_cast<double>(entry_bits),
                                                                  dyn));
    mpfr_prec_t w_lo = prec_bits + 96 + extra;
    mpfr_prec_t w_hi = prec_bits + 224 + extra;
    auto lo = eigen_pipeline(need, basis, mdiag, roots, w_lo);
    auto hi = eigen_pipeline(need, basis, mdiag, roots, w_hi);

    std::vector<std::size_t> order(lo.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return lo[a].a2 < lo[b].a2; });

    std::vector<HeckeEigenform> out;
    out.reserve(lo.size());
    Real eps_deligne = ldexp2(Real::of_si(1, 32), -static_cast<long>(prec_bits / 2));
    Real two = Real::of_si(2, 32);
    auto prs = primes_up_to(static_cast<std::uint64_t>(need));
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        std::size_t i = order[oi];
        HeckeEigenform f;
        f.k = k;
        f.eigen_index = static_cast<int>(oi);
        f.fricke_sign = 1;
        f.prec_bits = prec_bits;
        f.nmax = need;
        f.lambda.assign(static_cast<std::size_t>(need) + 1, ErrBoundedReal());
        for (long n = 1; n <= need; ++n) {
            Real den = sqrt_pow_z(mpz_class(n), k - 1, w_hi);
            Real v_hi = hi[i].coeffs[static_cast<std::size_t>(n)] / den;
            Real v_lo = lo[i].coeffs[static_cast<std::size_t>(n)] / den;
            Real val = add_prec(v_hi, Real::of_si(0, prec_bits), prec_bits);
            Real e(32);
            mpfr_sub(e.raw(), v_hi.raw(), v_lo.raw(), MPFR_RNDA);
            mpfr_abs(e.raw(), e.raw(), MPFR_RNDU);
            mpfr_mul_ui(e.raw(), e.raw(), 16, MPFR_RNDU);
            Real u = ulp_of(val);
            mpfr_add(e.raw(), e.raw(), u.raw(), MPFR_RNDU);
            f.lambda[static_cast<std::size_t>(n)] = ErrBoundedReal(std::move(val), std::move(e));
        }
        // lambda(1) = 1 exactly by normalization
        f.lambda[1] = ErrBoundedReal::exact_si(1, prec_bits);
        // data-quality gate: per-entry error bounds must sit far below the
        // 2^{-prec/2} sanity scale, else the solve precision was insufficient
        Real err_cap = ldexp2(Real::of_si(1, 32), -static_cast<long>(prec_bits / 2) - 8);
        for (long n = 1; n <= need; ++n) {
            const auto& ln = f.lambda[static_cast<std::size_t>(n)];
            Real rel_scale = max(abs(ln.value), Real::of_si(1, 32));
            if (ln.err > err_cap * rel_scale)
                throw AssertionFailure("eigenforms: lambda(" + std::to_string(n) +
                                       ") error bound too large at k=" + std::to_string(k));
        }
        // Deligne bound as a numerical sanity check
        for (std::uint64_t p : prs) {
            const auto& lp = f.lambda[static_cast<std::size_t>(p)];
            if (abs(lp.value) > two + eps_deligne + lp.err)
                throw AssertionFailure("eigenforms: Deligne bound violated at k=" +
                                       std::to_string(k) + ", p=" + std::to_string(p));
        }
        out.push_back(std::move(f));
    }
    return out;
}

ErrBoundedReal hecke_residual(const HeckeEigenform& f) {
    Real best = Real::of_si(0, f.prec_bits);
    Real best_err = Real::of_si(0, 32);
    for (long m = 1; m <= f.nmax; ++m) {
        for (long n = m; m * n <= f.nmax; ++n) {
            ErrBoundedReal lhs = f.lam(m) * f.lam(n);
            ErrBoundedReal rhs = ErrBoundedReal::exact_si(0, f.prec_bits);
            long g = static_cast<long>(gcd_u64(m, n));
            for (long dd = 1; dd <= g; ++dd) {
                if (g % dd != 0) continue;
                rhs = rhs + f.lam(m * n / (dd * dd));
            }
            ErrBoundedReal diff = lhs - rhs;
            Real a = abs(diff.value);
            if (a > best) {
                best = a;
                best_err = diff.err;
            }
        }
    }
    return {std::move(best), std::move(best_err)};
}

double hecke_residual_value(const HeckeEigenform& f) { return hecke_residual(f).value.to_double(); }

} // namespace eigenforms

} // namespace modl
