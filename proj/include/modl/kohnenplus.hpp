#pragma once

#include "modl/eigenforms.hpp"
#include "modl/qseries.hpp"
#include "modl/real.hpp"

#include <vector>

namespace modl {

// Cusp form in the plus subspace of weight (k+1)/2 on Gamma_0(4), stored as
// an exact rational q-expansion. The stored scale is free (not Petersson
// normalized).
struct HalfIntegralForm {
    long k = 0;
    QSeries coeffs;
    bool plus_flag = true;
    int shimura_partner = -1;
    long pivot = 0; // leading coefficient position in the echelon basis
};

// Hecke eigenform in the plus space. Coefficients are exact when the
// eigenvalue is rational (dimension 1); otherwise they are high-precision
// values from the numeric diagonalization of T(p^2).
struct PlusEigenform {
    long k = 0;
    int index = 0;
    int shimura_partner = -1;
    long matching_prime = 3;
    bool exact = false;
    QSeries exact_coeffs;                 // valid when exact
    std::vector<ErrBoundedReal> coeffs;   // always valid, [n] for n <= nmax
    long nmax = 0;
    ErrBoundedReal tp2_eigenvalue;        // eigenvalue of T(p^2) = a_f(p)

    ErrBoundedReal coeff(long n) const {
        if (n < 0 || n > nmax) throw std::out_of_range("PlusEigenform: coefficient out of range");
        return coeffs[static_cast<std::size_t>(n)];
    }
};

namespace kohnenplus {

// theta = 1 + 2 sum q^{n^2} (weight 1/2 on Gamma_0(4))
QSeries theta(long nmax);
// F = sum_{m odd} sigma(m) q^m (weight 2 on Gamma_0(4))
QSeries eis_F(long nmax);

// Coefficient positions killed by the plus condition:
// c(n) = 0 unless (-1)^{k/2} n = 0,1 mod 4.
bool plus_position_allowed(long k, long n);

// Echelonized basis of S^+_{(k+1)/2}(4): the intersection of the
// theta^a F^b monomial span (a + 4b = k+1, a odd) with the plus condition
// and c(0) = 0. The Kohnen isomorphism dimension equality
// dim = dim S_k(1) is asserted.
std::vector<HalfIntegralForm> plus_space_basis(long k, long nmax);

// Matrix of T(p^2) on the echelon plus basis (exact rational entries):
// (T(p^2) g)(n) = c(p^2 n) + chi~(p, n) p^{k/2-1} c(n) + p^{k-1} c(n/p^2)
// with chi~(p, n) the Kronecker symbol ((-1)^{k/2} n | p).
std::vector<std::vector<mpq_class>> tp2_matrix(long k, const std::vector<HalfIntegralForm>& basis,
                                               long p);

// Diagonalize T(p^2) (p = 3, fallback 5) and assign to each eigenform the
// unique f in H_k with matching a_f(p). Errors loudly on a mismatch.
std::vector<PlusEigenform> shimura_match(long k, long nmax,
                                         const std::vector<HeckeEigenform>& hk,
                                         long matching_prime = 3,
                                         mpfr_prec_t prec = default_prec());

struct WaldRatioResult {
    long k = 0, D1 = 0, D2 = 0;
    int plus_index = 0;
    int eigen_index = -1;
    double residual = 0;
    bool vacuous = false; // both coefficients vanish
};

// Scale-free consequence of the explicit Waldspurger proportionality:
// c(|D1|)^2 |D2|^{(k-1)/2} L(1/2, f x chi_{D2})
//   = c(|D2|)^2 |D1|^{(k-1)/2} L(1/2, f x chi_{D1}),
// invariant under any rescaling of g.
std::vector<WaldRatioResult> waldspurger_ratio_check(long k, long D1, long D2,
                                                     mpfr_prec_t prec = default_prec());

struct WaldNormResult {
    long k = 0, D = 0;
    double norm_sq = 0;       // ||g||^2 for the stored (free) scale
    double norm_err_est = 0;  // quadrature convergence estimate
    double lhs = 0;           // c_g(|D|)^2 / ||g||^2
    double rhs = 0;           // Gamma(k/2) pi^{-k/2} |D|^{(k-1)/2} L(1/2, f x chi_D)
    double rel_error = 0;     // residual of the identity as stated
    // residual after the index-6 and Petersson-norm normalization of the
    // partner form (the Kohnen-Zagier constants): lhs = rhs / (6 <f,f>)
    double rel_error_kz = 0;
    double petersson_norm_f = 0;
    bool corollary_threshold_met = false;
    double corollary_rhs = 0;
};

// Absolute form of the Waldspurger identity: ||g|| is estimated by numerical
// quadrature of |g|^2 y^{(k+1)/2} d mu over the index-6 union of SL_2(Z)
// fundamental-domain translates tiling Gamma_0(4) \ H, truncated in height.
WaldNormResult waldspurger_norm_check(long k, long D, int integration_depth = 1,
                                      mpfr_prec_t prec = default_prec());

// Petersson norm of the supplied coefficient vector, shared by the norm
// check and by tests; `scale` multiplies the coefficients.
Real plus_norm_quadrature(long k, const std::vector<ErrBoundedReal>& coeffs, long nmax,
                          int depth, mpfr_prec_t prec, double* err_est = nullptr);

} // namespace kohnenplus

} // namespace modl
