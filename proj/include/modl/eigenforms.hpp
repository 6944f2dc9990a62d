#pragma once

#include "modl/qseries.hpp"
#include "modl/real.hpp"

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

namespace modl {

// Raised on numeric sanity-check failures (distinct-eigenvalue assertion,
// plus-space dimension assertion, ...). The CLI maps it to exit code 2.
struct AssertionFailure : std::runtime_error {
    explicit AssertionFailure(const std::string& m) : std::runtime_error(m) {}
};

// Normalized Hecke eigenform of level 1: lambda_f(n) = a_f(n) / n^{(k-1)/2},
// lambda_f(1) = 1. Values carry per-entry error bounds.
struct HeckeEigenform {
    long k = 0;
    int eigen_index = 0;
    int fricke_sign = 1;
    mpfr_prec_t prec_bits = 128;
    long nmax = 0;
    std::vector<ErrBoundedReal> lambda; // [0] unused, [n] = lambda_f(n), n <= nmax

    const ErrBoundedReal& lam(long n) const {
        if (n < 1 || n > nmax) throw std::out_of_range("HeckeEigenform: lambda index out of range");
        return lambda[static_cast<std::size_t>(n)];
    }

    // lambda_f(p^e) for prime p <= nmax, any e >= 0, by the Hecke recurrence
    // lambda(p^{e+1}) = lambda(p) lambda(p^e) - lambda(p^{e-1}).
    ErrBoundedReal lambda_prime_power(long p, long e) const;

    // lambda_f(n^2) for any n whose prime factors are <= nmax.
    ErrBoundedReal lambda_square(long n) const;
};

namespace eigenforms {

// Matrix of the arithmetically normalized Hecke operator T_p,
// a(n) -> a(pn) + p^{k-1} a(n/p), on the Victor-Miller basis.
// Entries are integers; returned as exact rationals per the series type.
std::vector<std::vector<mpq_class>> hecke_matrix(long k, long p, long nmax);

// All of H_k with lambda_f(n) for n <= nmax at the given working precision.
// Forms are ordered by ascending lambda_f(2); eigen_index follows that order.
std::vector<HeckeEigenform> eigenforms(long k, long nmax, mpfr_prec_t prec_bits = 128);

// Maximum Hecke-relation residual |l(m)l(n) - sum_{d|(m,n)} l(mn/d^2)|
// over all pairs with mn <= f.nmax.
ErrBoundedReal hecke_residual(const HeckeEigenform& f);
double hecke_residual_value(const HeckeEigenform& f);

// Characteristic polynomial of an integer matrix (monic, coefficient of x^d
// first ... constant last), by modular Hessenberg + CRT.
std::vector<mpz_class> charpoly(const std::vector<std::vector<mpz_class>>& m);

// All roots of a squarefree integer polynomial with only real roots,
// each with a certified inclusion radius. Ascending order.
struct CertifiedRoot {
    Real value;
    Real radius;
};
std::vector<CertifiedRoot> real_roots_certified(const std::vector<mpz_class>& poly,
                                                mpfr_prec_t prec);

} // namespace eigenforms

} // namespace modl
