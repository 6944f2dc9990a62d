#include "modl/resonance.hpp"

#include "modl/characters.hpp"
#include "modl/util.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace modl {

ResonatorSpec ResonatorSpec::defaults(long long N, long D, mpfr_prec_t prec) {
    if (N < 2) throw std::invalid_argument("ResonatorSpec: N must be >= 2");
    if (!characters::is_fundamental(D) || D % 2 == 0)
        throw std::invalid_argument("ResonatorSpec: D must be an odd fundamental discriminant");
    double logN = std::log(static_cast<double>(N));
    double loglogN = std::log(logN);
    if (!(loglogN > 0))
        throw std::invalid_argument("ResonatorSpec: log log N <= 0, default L undefined");
    ResonatorSpec s;
    s.N = N;
    s.D = D;
    s.L = sqrt(Real::of(logN, prec) * Real::of(loglogN, prec));
    double Ld = s.L.to_double();
    s.p_lo = Ld * Ld;
    double logL = std::log(Ld);
    s.p_hi = std::exp(logL * logL);
    s.overridden = false;
    for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(std::floor(s.p_hi)) + 1))
        if (static_cast<double>(p) >= s.p_lo && static_cast<double>(p) <= s.p_hi)
            s.window.push_back(static_cast<long>(p));
    return s;
}

ResonatorSpec ResonatorSpec::with_window(long long N, long D, const Real& L,
                                         std::vector<long> primes) {
    if (N < 1) throw std::invalid_argument("ResonatorSpec: N must be >= 1");
    if (!characters::is_fundamental(D) || D % 2 == 0)
        throw std::invalid_argument("ResonatorSpec: D must be an odd fundamental discriminant");
    ResonatorSpec s;
    s.N = N;
    s.D = D;
    s.L = L;
    s.overridden = true;
    std::sort(primes.begin(), primes.end());
    s.window = std::move(primes);
    if (!s.window.empty()) {
        s.p_lo = static_cast<double>(s.window.front());
        s.p_hi = static_cast<double>(s.window.back());
    }
    return s;
}

Real ResonatorSpec::r_prime(long p) const {
    mpfr_prec_t w = L.prec();
    if (std::find(window.begin(), window.end(), p) == window.end()) return Real::of_si(0, w);
    int ch = characters::chi(D, p);
    if (ch == 0) return Real::of_si(0, w);
    Real v = L / (sqrt(Real::of_si(p, w)) * log(Real::of_si(p, w)));
    return ch > 0 ? v : -v;
}

namespace resonance {

namespace {

// depth-first enumeration of squarefree products of window primes <= N
void enumerate_support(const std::vector<long>& primes, const std::vector<Real>& rvals,
                       std::size_t idx, long long cur, const Real& curval, long long N,
                       std::vector<std::pair<long long, Real>>& out) {
    out.emplace_back(cur, curval);
    for (std::size_t i = idx; i < primes.size(); ++i) {
        if (rvals[i].is_zero()) continue;
        if (static_cast<long long>(primes[i]) > N / cur) break;
        enumerate_support(primes, rvals, i + 1, cur * primes[i], curval * rvals[i], N, out);
    }
}

} // namespace

std::vector<std::pair<long long, Real>> resonator_coeffs(const ResonatorSpec& spec) {
    std::vector<Real> rvals;
    rvals.reserve(spec.window.size());
    for (long p : spec.window) rvals.push_back(spec.r_prime(p));
    std::vector<std::pair<long long, Real>> out;
    enumerate_support(spec.window, rvals, 0, 1, Real::of_si(1, spec.L.prec()), spec.N, out);
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

ErrBoundedReal resonate(const HeckeEigenform& f, const ResonatorSpec& spec) {
    auto coeffs = resonator_coeffs(spec);
    if (!coeffs.empty() && coeffs.back().first > f.nmax)
        throw std::invalid_argument("resonate: insufficient eigen-data for the resonator support");
    ErrBoundedReal acc = ErrBoundedReal::exact_si(0, f.prec_bits + 16);
    for (const auto& [m, r] : coeffs)
        acc = acc + scale(f.lam(static_cast<long>(m)), r);
    return acc;
}

EulerProducts euler_products(const ResonatorSpec& spec) {
    mpfr_prec_t w = spec.L.prec();
    Real small = Real::of_si(1, w);
    Real big = Real::of_si(2, w);
    for (long p : spec.window) {
        Real r = spec.r_prime(p);
        Real r2 = r * r;
        small = small * (Real::of_si(1, w) + r2);
        int ch = characters::chi(spec.D, p);
        Real chi_term = Real::of_si(2 * ch, w) * r / sqrt(Real::of_si(p, w));
        Real fac = Real::of_si(1, w) + r2 * (Real::of_si(1, w) + Real::of_si(1, w) / Real::of_si(p, w)) +
                   chi_term;
        big = big * fac;
    }
    EulerProducts ep{small, big, big / small};
    return ep;
}

std::vector<TrendRow> ratio_exponent_trend(const std::vector<double>& Ns, long D) {
    std::vector<TrendRow> rows;
    for (double N : Ns) {
        TrendRow row;
        row.N = N;
        double logN = std::log(N);
        double loglogN = std::log(logN);
        if (!(loglogN > 0)) {
            row.flagged = true;
            rows.push_back(row);
            continue;
        }
        double L = std::sqrt(logN * loglogN);
        double lo = L * L;
        double hi = std::exp(std::log(L) * std::log(L));
        row.window_lo = lo;
        row.window_hi = hi;
        row.target = std::sqrt(4.0 * logN / loglogN);
        double sum = 0;
        int cnt = 0;
        for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(std::floor(hi)) + 1)) {
            double pd = static_cast<double>(p);
            if (pd < lo || pd > hi) continue;
            if (D != 1 && characters::chi(D, static_cast<long>(p)) == 0) continue;
            double lp = std::log(pd);
            sum += 2.0 * L / (pd * lp) - L * L / (pd * pd * lp * lp);
            ++cnt;
        }
        row.prime_count = cnt;
        row.prime_sum = sum;
        if (cnt == 0) {
            row.flagged = true;
        } else {
            row.deviation = std::abs(sum - row.target) / row.target;
        }
        rows.push_back(row);
    }
    return rows;
}

IdentityCheck sigma_identity_check(long long N,
                                   const std::vector<std::pair<long, double>>& r_on_primes,
                                   long D, mpfr_prec_t prec) {
    if (!characters::is_fundamental(D))
        throw std::invalid_argument("sigma_identity_check: D not fundamental");
    mpfr_prec_t w = prec + 16;
    std::vector<long> primes;
    std::vector<Real> rvals;
    for (const auto& [p, v] : r_on_primes) {
        if (p < 2 || !is_squarefree(static_cast<std::uint64_t>(p)) || factorize(p).size() != 1)
            throw std::invalid_argument("sigma_identity_check: coefficient rule key not prime");
        if (D % p == 0 && v != 0)
            throw std::invalid_argument("sigma_identity_check: rule must vanish on p | D");
        primes.push_back(p);
        rvals.push_back(Real::of(v, w));
    }
    std::vector<std::pair<long long, Real>> support;
    enumerate_support(primes, rvals, 0, 1, Real::of_si(1, w), N, support);
    std::sort(support.begin(), support.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // left side: double loop with gcd and sigma; chi(m1 m2) = chi(m1) chi(m2)
    Real lhs = Real::of_si(0, w);
    for (const auto& [m1, r1] : support) {
        int ch1 = characters::chi(D, static_cast<long>(m1));
        if (ch1 == 0) continue;
        for (const auto& [m2, r2] : support) {
            int ch = ch1 * characters::chi(D, static_cast<long>(m2));
            if (ch == 0) continue;
            long long g = static_cast<long long>(
                gcd_u64(static_cast<std::uint64_t>(m1), static_cast<std::uint64_t>(m2)));
            long long sigma = 0;
            for (long long dd = 1; dd * dd <= g; ++dd) {
                if (g % dd != 0) continue;
                sigma += dd;
                if (dd != g / dd) sigma += g / dd;
            }
            Real t = r1 * r2 * Real::of_si(static_cast<long>(sigma), w) /
                     sqrt(Real::of_si(static_cast<long>(m1), w) * Real::of_si(static_cast<long>(m2), w));
            lhs = ch > 0 ? lhs + t : lhs - t;
        }
    }

    // right side: sum over d of r(d)^2 (coprime-restricted character sum)^2
    Real rhs = Real::of_si(0, w);
    for (const auto& [d, rd] : support) {
        Real inner = Real::of_si(0, w);
        for (const auto& [t, rt] : support) {
            if (t > N / d) break;
            if (gcd_u64(static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(d)) != 1) continue;
            int ch = characters::chi(D, static_cast<long>(t));
            if (ch == 0) continue;
            Real u = rt / sqrt(Real::of_si(static_cast<long>(t), w));
            inner = ch > 0 ? inner + u : inner - u;
        }
        rhs = rhs + rd * rd * inner * inner;
    }

    IdentityCheck out;
    out.lhs = lhs.to_double();
    out.rhs = rhs.to_double();
    double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-30});
    out.residual = std::abs((lhs - rhs).to_double()) / scale;
    out.pass = out.residual <= 1e-10;
    return out;
}

DiagonalCheck diagonal_classification_check(long N) {
    if (N < 1 || N > 400) throw std::invalid_argument("diagonal_classification_check: budget is N <= 400");
    std::vector<long> sf;
    for (long n = 1; n <= N; ++n)
        if (is_squarefree(static_cast<std::uint64_t>(n))) sf.push_back(n);

    long maxprod = N * N;
    std::vector<bool> is_square(static_cast<std::size_t>(maxprod) + 1, false);
    for (long t = 1; t * t <= maxprod; ++t) is_square[t * t] = true;

    // per pair: the set { m1 m2 / d^2 : d | (m1, m2) }, sorted
    struct Pair {
        long prod;
        std::vector<long> quotients;
    };
    std::vector<Pair> pairs;
    pairs.reserve(sf.size() * sf.size());
    for (long m1 : sf) {
        for (long m2 : sf) {
            Pair pr;
            pr.prod = m1 * m2;
            long g = static_cast<long>(gcd_u64(m1, m2));
            for (long dd = 1; dd <= g; ++dd)
                if (g % dd == 0) pr.quotients.push_back(pr.prod / (dd * dd));
            std::sort(pr.quotients.begin(), pr.quotients.end());
            pairs.push_back(std::move(pr));
        }
    }

    DiagonalCheck out;
    out.pass = true;
    std::size_t np = pairs.size();
    for (std::size_t i = 0; i < np; ++i) {
        const auto& a = pairs[i];
        for (std::size_t j = 0; j < np; ++j) {
            const auto& b = pairs[j];
            ++out.quadruples;
            // divisor-side predicate: common quotient?
            bool lhs = false;
            {
                auto ia = a.quotients.begin();
                auto ib = b.quotients.begin();
                while (ia != a.quotients.end() && ib != b.quotients.end()) {
                    if (*ia == *ib) { lhs = true; break; }
                    if (*ia < *ib) ++ia; else ++ib;
                }
            }
            // parametrization side: write (AB) = s t^2, u = A/g, v = B/g squares
            long A = a.prod, B = b.prod;
            long g = static_cast<long>(gcd_u64(A, B));
            long u = A / g, v = B / g;
            bool rhs = is_square[u] && is_square[v];
            if (lhs != rhs) {
                out.pass = false;
                if (out.counterexamples.size() < 16) {
                    long m1 = static_cast<long>(i / sf.size()), m2 = static_cast<long>(i % sf.size());
                    long m3 = static_cast<long>(j / sf.size()), m4 = static_cast<long>(j % sf.size());
                    out.counterexamples.push_back(
                        {sf[m1], sf[m2], sf[m3], sf[m4]});
                }
            }
        }
    }
    return out;
}

RankinTail rankin_tail_check(const ResonatorSpec& spec, double alpha) {
    mpfr_prec_t w = spec.L.prec();
    if (alpha <= 0) {
        double Ld = spec.L.to_double();
        if (Ld <= 1.0)
            throw std::invalid_argument("rankin_tail_check: default alpha needs L > 1");
        alpha = 1.0 / std::pow(std::log(Ld), 3.0);
    }
    RankinTail out;
    out.alpha = alpha;
    auto coeffs = resonator_coeffs(spec);
    Real psum = Real::of_si(0, w);
    for (const auto& [m, r] : coeffs) psum = psum + r * r;
    Real full = Real::of_si(1, w);
    Real bound_prod = Real::of_si(1, w);
    for (long p : spec.window) {
        Real r = spec.r_prime(p);
        full = full * (Real::of_si(1, w) + r * r);
        Real pa = exp(Real::of(alpha, w) * log(Real::of_si(p, w)));
        bound_prod = bound_prod * (Real::of_si(1, w) + r * r * pa);
    }
    Real na = exp(-Real::of(alpha, w) * log(Real::of(static_cast<double>(spec.N), w)));
    out.partial_sum = psum;
    out.full_product = full;
    out.gap = full - psum;
    out.bound = na * bound_prod;
    // inequalities allow a whisker of rounding slack
    Real slack = ldexp2(abs(full) + Real::of_si(1, w), -static_cast<long>(w) + 12);
    out.pass = (psum <= full + slack) && (out.gap <= out.bound + slack);
    return out;
}

FourthMomentCheck fourth_moment_check(const std::vector<HeckeEigenform>& forms,
                                      const std::vector<HarmonicWeight>& weights,
                                      const ResonatorSpec& spec) {
    if (forms.size() != weights.size())
        throw std::invalid_argument("fourth_moment_check: forms/weights mismatch");
    FourthMomentCheck out;
    mpfr_prec_t w = spec.L.prec();
    ErrBoundedReal acc = ErrBoundedReal::exact_si(0, w);
    for (std::size_t i = 0; i < forms.size(); ++i) {
        ErrBoundedReal R = resonate(forms[i], spec);
        ErrBoundedReal R2 = R * R;
        acc = acc + R2 * R2 / weights[i].omega_star;
    }
    long k = forms.empty() ? 0 : forms.front().k;
    if (!forms.empty())
        acc = scale(acc, Real::of_si(12, w) / Real::of_si(k - 1, w));
    out.lhs = acc;
    Real bound = Real::of_si(1, w);
    for (long p : spec.window) {
        Real r2 = spec.r_prime(p) * spec.r_prime(p);
        bound = bound * (Real::of_si(1, w) + r2) * (Real::of_si(1, w) + ldexp2(r2, 1));
    }
    out.bound = bound;
    out.ratio = (acc.value / bound).to_double();
    return out;
}

Real extreme_threshold(long k, long D, double constant, mpfr_prec_t prec) {
    long arg = k * std::labs(D);
    if (arg < 3) throw std::invalid_argument("extreme_threshold: k|D| too small");
    Real lk = log(Real::of_si(arg, prec));
    Real llk = log(lk);
    if (!(llk.sign() > 0)) throw std::invalid_argument("extreme_threshold: loglog(k|D|) <= 0");
    return exp(Real::of(constant, prec) * sqrt(lk / llk));
}

ExtremeCountReport count_extreme(long k, long D, double constant, mpfr_prec_t prec) {
    if (!characters::parity_matches(D, k))
        throw std::domain_error("count_extreme: parity mismatch, chi_D(-1) != i^k");
    ExtremeCountReport rep;
    rep.k = k;
    rep.D = D;
    rep.constant = constant;
    rep.threshold = extreme_threshold(k, D, constant, prec);
    rep.dim = dim_cusp_forms(k);
    if (rep.dim == 0) return rep;
    long cutoff = static_cast<long>(std::ceil(2.0 * static_cast<double>(k) * std::labs(D)));
    auto forms = eigenforms::eigenforms(k, cutoff, prec);
    auto vrow = lcentral::v_kernel_row(k, D, cutoff, prec);
    for (const auto& f : forms) {
        CentralValue cv = lcentral::central_value_with_kernel(f, D, 2.0, vrow);
        if (cv.value.value + cv.value.err >= rep.threshold)
            rep.members.emplace_back(f.eigen_index, cv.value.value.to_double());
    }
    rep.count = static_cast<int>(rep.members.size());
    return rep;
}

} // namespace resonance

} // namespace modl
