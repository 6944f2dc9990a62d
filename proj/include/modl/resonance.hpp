#pragma once

#include "modl/eigenforms.hpp"
#include "modl/lcentral.hpp"
#include "modl/real.hpp"

#include <cstdint>
#include <vector>

namespace modl {

// Resonator coefficient rule r_D: supported on squarefree products of the
// primes in [p_lo, p_hi], r_D(p) = chi_D(p) L / (sqrt(p) log p). Defaults
// follow L = sqrt(log N loglog N), window [L^2, exp(log^2 L)].
struct ResonatorSpec {
    long long N = 0;
    long D = 1;
    Real L;
    double p_lo = 0, p_hi = 0;
    bool overridden = false;
    std::vector<long> window; // primes in the window, ascending

    static ResonatorSpec defaults(long long N, long D, mpfr_prec_t prec = default_prec());
    static ResonatorSpec with_window(long long N, long D, const Real& L,
                                     std::vector<long> primes);

    Real r_prime(long p) const; // r_D(p); zero if p outside window or p | D
};

struct ExtremeCountReport {
    long k = 0;
    long D = 1;
    double constant = 1.41;
    Real threshold;
    std::vector<std::pair<int, double>> members; // (eigen_index, L-value)
    int count = 0;
    int dim = 0;
};

namespace resonance {

// All nonzero values of r_D on [1, N]: squarefree window-smooth supports.
std::vector<std::pair<long long, Real>> resonator_coeffs(const ResonatorSpec& spec);

// R(f x chi_D) = sum_{m<=N} r_D(m) lambda_f(m).
ErrBoundedReal resonate(const HeckeEigenform& f, const ResonatorSpec& spec);

struct EulerProducts {
    Real small;  // prod (1 + r^2)
    Real big;    // 2 prod (1 + r^2 (1 + 1/p) + 2 r chi / sqrt(p))
    Real ratio;  // big / small
};
EulerProducts euler_products(const ResonatorSpec& spec);

struct TrendRow {
    double N = 0;
    double window_lo = 0, window_hi = 0;
    int prime_count = 0;
    double prime_sum = 0;  // sum_p [2L/(p log p) - L^2/(p^2 log^2 p)]
    double target = 0;     // sqrt(4 log N / loglog N)
    double deviation = 0;  // |prime_sum - target| / target
    bool flagged = false;  // window empty
};
std::vector<TrendRow> ratio_exponent_trend(const std::vector<double>& Ns, long D);

struct IdentityCheck {
    bool pass = false;
    double residual = 0; // relative
    double lhs = 0, rhs = 0;
};
// Exact divisor-sum identity: for multiplicative squarefree-supported r
// vanishing on p | D,
//   sum_{m1,m2<=N} r(m1) r(m2) chi(m1 m2) sigma((m1,m2)) / sqrt(m1 m2)
//     = sum_{d<=N} r(d)^2 ( sum_{t<=N/d, (t,d)=1} r(t) chi(t)/sqrt(t) )^2.
// Both sides evaluated by direct enumeration.
IdentityCheck sigma_identity_check(long long N, const std::vector<std::pair<long, double>>& r_on_primes,
                                   long D, mpfr_prec_t prec = default_prec());

struct DiagonalCheck {
    bool pass = false;
    std::uint64_t quadruples = 0;
    std::vector<std::array<long, 4>> counterexamples;
};
// Exhaustive check over squarefree quadruples m_i <= N that the divisor
// condition (exists d1|(m1,m2), d2|(m3,m4) with m1m2/d1^2 = m3m4/d2^2)
// matches the (s,t,u1,v1) square-product classification.
DiagonalCheck diagonal_classification_check(long N);

struct RankinTail {
    Real partial_sum;   // sum_{n<=N} r(n)^2
    Real full_product;  // prod (1 + r(p)^2)
    Real gap;           // full - partial (tail of the series)
    Real bound;         // N^{-alpha} prod (1 + r(p)^2 p^alpha)
    double alpha = 0;
    bool pass = false;
};
RankinTail rankin_tail_check(const ResonatorSpec& spec, double alpha = -1);

struct FourthMomentCheck {
    ErrBoundedReal lhs; // (12/(k-1)) sum_f R^4 / omega*
    Real bound;         // prod (1 + r^2)(1 + 2 r^2)
    double ratio = 0;
};
FourthMomentCheck fourth_moment_check(const std::vector<HeckeEigenform>& forms,
                                      const std::vector<HarmonicWeight>& weights,
                                      const ResonatorSpec& spec);

Real extreme_threshold(long k, long D, double constant = 1.41,
                       mpfr_prec_t prec = default_prec());

ExtremeCountReport count_extreme(long k, long D, double constant = 1.41,
                                 mpfr_prec_t prec = default_prec());

} // namespace resonance

} // namespace modl
