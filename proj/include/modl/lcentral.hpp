#pragma once

#include "modl/eigenforms.hpp"
#include "modl/real.hpp"

#include <string>
#include <vector>

namespace modl {

struct CentralValue {
    long k = 0;
    int eigen_index = 0;
    long D = 1;
    ErrBoundedReal value;
    long cutoff = 0;
    double cutoff_mult = 2.0;
};

struct HarmonicWeight {
    long k = 0;
    int eigen_index = 0;
    ErrBoundedReal omega_star;
    std::string method_tag; // "series" or "trace-inverted"
};

namespace lcentral {

// L(1/2, f x chi_D) by the approximate functional equation:
// 2 sum_{n<=cutoff} lambda_f(n) chi_D(n) n^{-1/2} V(n/|D|), cutoff =
// ceil(cutoff_mult * k * |D|), with a certified tail bound folded into err.
CentralValue central_value(const HeckeEigenform& f, long D, double cutoff_mult = 2.0);

// Precomputed V(n/|D|) row for one (k, D); central_value_with_kernel avoids
// recomputing it per form.
std::vector<ErrBoundedReal> v_kernel_row(long k, long D, long cutoff, mpfr_prec_t prec);
CentralValue central_value_with_kernel(const HeckeEigenform& f, long D, double cutoff_mult,
                                       const std::vector<ErrBoundedReal>& vrow);

// Smoothed-series evaluation of omega(f)* = sum_n lambda_f(n^2)/n:
// S(X) and S(2X) with exponential weights e^{-n/X}, Richardson-extrapolated,
// err = |S(2X) - S(X)| + tail + rounding. Requires f.nmax >= 35 X.
HarmonicWeight omega_star_series(const HeckeEigenform& f, double X);

// omega(f)* for every form of H_k at once, by inverting the Petersson
// formula on the pairs (1, n), n = 1..dim: the eigenvalue matrix
// [lambda_f(n)] is invertible (echelon change of basis), the right sides
// carry certified Bessel tails. At dimension 1 this is the single-equation
// form omega* = (12/(k-1)) / (1 + bessel term).
std::vector<HarmonicWeight> omega_star_trace(const std::vector<HeckeEigenform>& forms,
                                             mpfr_prec_t prec = default_prec());

// sum_f L(1/2, f x chi_D)^r over H_k, optionally divided by omega(f)* per
// term. Parity precondition: chi_D(-1) = i^k.
ErrBoundedReal moment_sum(long k, int r, bool weighted, long D = 1,
                          mpfr_prec_t prec = default_prec(), double cutoff_mult = 2.0);

} // namespace lcentral

} // namespace modl
