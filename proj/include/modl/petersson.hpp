#pragma once

#include "modl/eigenforms.hpp"
#include "modl/lcentral.hpp"
#include "modl/real.hpp"

#include <vector>

namespace modl {

// One trace-formula verification: both sides computed independently, with a
// certified bound on the truncated c-sum remainder.
struct TraceReport {
    long k = 0, m = 0, n = 0, q = 1;
    ErrBoundedReal lhs;
    int rhs_delta = 0;
    ErrBoundedReal rhs_bessel_tail; // the c-sum part of the right side
    long cmax = 0;
    double tail_bound = 0;
    double discrepancy = 0;
    bool pet_regime = false;   // sqrt(mn) <= kq/(40 pi)
    double pet_deviation = 0;  // |lhs - delta_{m,n}| when in regime
};

namespace petersson {

// Kloosterman sum S(m,n;c) = sum_{x mod c, (x,c)=1} e((mx + n x^-1)/c);
// real by the x <-> -x pairing, evaluated as a cosine sum with exact
// modular inverses.
ErrBoundedReal kloosterman(long m, long n, long c, mpfr_prec_t prec = default_prec());

struct RhsResult {
    ErrBoundedReal value;      // delta_{m,n} + c-sum
    ErrBoundedReal bessel_sum; // c-sum alone
    Real tail_bound;           // certified remainder bound for c > cmax
};

// Right side of the Petersson formula:
// delta_{m,n} + 2 pi i^k sum_{c<=cmax} S(m,n;cq)/(cq) J_{k-1}(4 pi sqrt(mn)/(cq)).
RhsResult trace_rhs(long k, long m, long n, long q, long cmax, mpfr_prec_t prec = default_prec());

// Left side (12/(k-1)) sum_f lambda_f(m) lambda_f(n) / omega(f)*, over the
// supplied eigen-data and harmonic weights.
ErrBoundedReal trace_lhs(const std::vector<HeckeEigenform>& forms,
                         const std::vector<HarmonicWeight>& weights, long m, long n);

TraceReport trace_check(const std::vector<HeckeEigenform>& forms,
                        const std::vector<HarmonicWeight>& weights, long k, long m, long n,
                        long cmax, mpfr_prec_t prec = default_prec());

} // namespace petersson

} // namespace modl
