#pragma once

#include "modl/real.hpp"

namespace modl {
namespace specialfn {

// Regularized upper incomplete gamma Q(a, y) = Gamma(a,y)/Gamma(a), a > 0,
// y >= 0. Series branch for y < a+1, continued fraction otherwise.
ErrBoundedReal gamma_q(const Real& a, const Real& y, mpfr_prec_t prec = default_prec());

// Smoothing kernel of the approximate functional equation:
// V(x) = Q(k/2, 2*pi*x) for x > 0 and even k >= 2.
ErrBoundedReal V(const Real& x, long k, mpfr_prec_t prec = default_prec());

// Direct numerical evaluation of the defining Mellin-Barnes integral of V
// along Re(s) = c, for validating the closed form. Gauss-Legendre panels,
// complex log-gamma by Stirling with recurrence shift.
Real V_contour(double x, long k, double c = 1.0, mpfr_prec_t prec = 256);

// Bessel J_nu(x) for integer nu >= 1, x > 0, by the ascending series
// evaluated in log-space with an alternating-tail cutoff. The series loses
// about x*log2(e) bits to cancellation, so the working precision is raised
// accordingly; escalation beyond `max_prec` is refused.
ErrBoundedReal bessel_j(long nu, const Real& x, mpfr_prec_t prec = default_prec(),
                        mpfr_prec_t max_prec = 1 << 14);

ErrBoundedReal log_gamma(const Real& x, mpfr_prec_t prec = default_prec());
ErrBoundedReal zeta(const Real& s, mpfr_prec_t prec = default_prec());

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre recurrence.
void gauss_legendre(int n, mpfr_prec_t prec, std::vector<Real>& nodes,
                    std::vector<Real>& weights);

} // namespace specialfn
} // namespace modl
