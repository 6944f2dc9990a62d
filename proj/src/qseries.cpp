#include "modl/qseries.hpp"

#include "modl/util.hpp"

#include <stdexcept>

namespace modl {

QSeries::QSeries(long nmax, std::optional<mpq_class> weight_tag)
    : nmax_(nmax), weight_tag_(std::move(weight_tag)) {
    if (nmax < 0) throw std::invalid_argument("QSeries: nmax must be >= 0");
    c_.assign(static_cast<std::size_t>(nmax) + 1, mpq_class(0));
}

const mpq_class& QSeries::coeff(long n) const {
    if (n < 0 || n > nmax_)
        throw std::out_of_range("QSeries::coeff: index " + std::to_string(n) +
                                " outside truncation 0.." + std::to_string(nmax_));
    return c_[static_cast<std::size_t>(n)];
}

void QSeries::set_coeff(long n, mpq_class v) { at(n) = std::move(v); }

mpq_class& QSeries::at(long n) {
    if (n < 0 || n > nmax_)
        throw std::out_of_range("QSeries::at: index " + std::to_string(n) +
                                " outside truncation 0.." + std::to_string(nmax_));
    return c_[static_cast<std::size_t>(n)];
}

QSeries QSeries::truncated(long new_nmax) const {
    if (new_nmax > nmax_) throw std::out_of_range("QSeries::truncated: cannot extend truncation");
    QSeries r(new_nmax, weight_tag_);
    for (long n = 0; n <= new_nmax; ++n) r.c_[n] = c_[n];
    return r;
}

QSeries operator+(const QSeries& a, const QSeries& b) {
    long nm = std::min(a.nmax_, b.nmax_);
    if (nm < 0) throw std::invalid_argument("QSeries: empty operand");
    QSeries r(nm);
    for (long n = 0; n <= nm; ++n) r.c_[n] = a.c_[n] + b.c_[n];
    return r;
}

QSeries operator-(const QSeries& a, const QSeries& b) {
    long nm = std::min(a.nmax_, b.nmax_);
    if (nm < 0) throw std::invalid_argument("QSeries: empty operand");
    QSeries r(nm);
    for (long n = 0; n <= nm; ++n) r.c_[n] = a.c_[n] - b.c_[n];
    return r;
}

QSeries operator*(const QSeries& a, const QSeries& b) {
    long nm = std::min(a.nmax_, b.nmax_);
    if (nm < 0) throw std::invalid_argument("QSeries: empty operand");
    QSeries r(nm);
    mpq_t t;
    mpq_init(t);
    for (long i = 0; i <= nm; ++i) {
        if (sgn(a.c_[i]) == 0) continue;
        const mpq_srcptr ai = a.c_[i].get_mpq_t();
        for (long j = 0; i + j <= nm; ++j) {
            if (sgn(b.c_[j]) == 0) continue;
            mpq_mul(t, ai, b.c_[j].get_mpq_t());
            mpq_ptr dst = r.c_[i + j].get_mpq_t();
            mpq_add(dst, dst, t);
        }
    }
    mpq_clear(t);
    return r;
}

QSeries& QSeries::operator+=(const QSeries& b) { *this = *this + b; return *this; }
QSeries& QSeries::operator-=(const QSeries& b) { *this = *this - b; return *this; }

QSeries QSeries::scaled(const mpq_class& s) const {
    QSeries r(nmax_, weight_tag_);
    for (long n = 0; n <= nmax_; ++n) r.c_[n] = c_[n] * s;
    return r;
}

QSeries QSeries::pow(unsigned long e) const {
    QSeries acc(nmax_);
    acc.c_[0] = 1;
    QSeries base = *this;
    while (e > 0) {
        if (e & 1ul) acc = acc * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return acc;
}

long QSeries::leading_index() const {
    for (long n = 0; n <= nmax_; ++n)
        if (sgn(c_[n]) != 0) return n;
    return -1;
}

namespace series {

QSeries eisenstein(int weight, long nmax) {
    if (weight != 4 && weight != 6) throw std::invalid_argument("eisenstein: weight must be 4 or 6");
    if (nmax < 0) throw std::invalid_argument("eisenstein: nmax must be >= 0");
    QSeries r(nmax, mpq_class(weight));
    r.set_coeff(0, 1);
    // sigma_{w-1} via divisor accumulation
    std::vector<mpz_class> sig(static_cast<std::size_t>(nmax) + 1, mpz_class(0));
    for (long d = 1; d <= nmax; ++d) {
        mpz_class dp;
        mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d),
                      static_cast<unsigned long>(weight - 1));
        for (long m = d; m <= nmax; m += d) sig[m] += dp;
    }
    long mult = weight == 4 ? 240 : -504;
    for (long n = 1; n <= nmax; ++n) r.set_coeff(n, mpq_class(mult * sig[n]));
    return r;
}

QSeries delta(long nmax) {
    if (nmax < 1) throw std::invalid_argument("delta: nmax must be >= 1");
    // eta-product P = prod (1-q^n) = sum_j (-1)^j q^{j(3j-1)/2}
    std::vector<std::pair<long, int>> penta; // (exponent, sign)
    for (long j = 1;; ++j) {
        long e1 = j * (3 * j - 1) / 2;
        long e2 = j * (3 * j + 1) / 2;
        if (e1 > nmax && e2 > nmax) break;
        int s = (j % 2 == 0) ? 1 : -1;
        if (e1 <= nmax) penta.emplace_back(e1, s);
        if (e2 <= nmax) penta.emplace_back(e2, s);
    }
    // P^24, multiplying the sparse factor in 24 times
    std::vector<mpz_class> acc(static_cast<std::size_t>(nmax) + 1, mpz_class(0));
    acc[0] = 1;
    std::vector<mpz_class> nxt(acc.size());
    for (int rep = 0; rep < 24; ++rep) {
        for (auto& z : nxt) z = 0;
        for (long n = 0; n <= nmax; ++n) {
            if (sgn(acc[n]) == 0) continue;
            nxt[n] += acc[n];
            for (const auto& [e, s] : penta) {
                if (n + e > nmax) break;
                if (s > 0)
                    nxt[n + e] += acc[n];
                else
                    nxt[n + e] -= acc[n];
            }
        }
        acc.swap(nxt);
    }
    QSeries r(nmax, mpq_class(12));
    for (long n = 1; n <= nmax; ++n) r.set_coeff(n, mpq_class(acc[n - 1]));
    return r;
}

std::vector<long> rref(std::vector<QSeries>& rows, long first_col) {
    std::vector<long> pivots;
    if (rows.empty()) return pivots;
    long nmax = rows[0].nmax();
    std::size_t rank = 0;
    for (long col = first_col; col <= nmax && rank < rows.size(); ++col) {
        std::size_t sel = rank;
        while (sel < rows.size() && sgn(rows[sel].coeff(col)) == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[rank], rows[sel]);
        mpq_class inv = 1 / rows[rank].coeff(col);
        if (inv != 1) rows[rank] = rows[rank].scaled(inv);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == rank) continue;
            const mpq_class& f = rows[i].coeff(col);
            if (sgn(f) == 0) continue;
            rows[i] -= rows[rank].scaled(f);
        }
        pivots.push_back(col);
        ++rank;
    }
    rows.resize(rank);
    return pivots;
}

std::vector<QSeries> victor_miller_basis(long k, long nmax) {
    if (k % 2 != 0) throw std::invalid_argument("victor_miller_basis: k must be even");
    if (k < 12) throw std::invalid_argument("victor_miller_basis: k must be >= 12");
    int d = dim_cusp_forms(k);
    if (d == 0) return {};
    if (nmax < d)
        throw std::invalid_argument("victor_miller_basis: nmax too small to echelonize (need >= dim)");

    // 4a + 6b + 12c = k with c >= 1; k even makes b = (k mod 4)/2 constant.
    int b = static_cast<int>((k % 4) / 2);
    QSeries dl = delta(nmax);

    std::vector<QSeries> delta_pow(static_cast<std::size_t>(d) + 1, QSeries(nmax));
    delta_pow[1] = dl;
    for (int c = 2; c <= d; ++c) delta_pow[c] = delta_pow[c - 1] * dl;

    QSeries e4, e4cube;
    bool need_e4 = (k - 12 - 6 * b) / 4 > 0; // exponent at c = 1 is the largest
    if (need_e4) {
        e4 = eisenstein(4, nmax);
        if (d > 1) e4cube = e4 * e4 * e4;
    }
    QSeries e6;
    if (b == 1) e6 = eisenstein(6, nmax);

    // c descending => E4 exponent ascends by 3 each step
    std::vector<QSeries> rows;
    rows.reserve(static_cast<std::size_t>(d));
    QSeries e4pow(nmax);
    long a_prev = -1;
    for (int c = d; c >= 1; --c) {
        long a = (k - 12 * c - 6 * b) / 4;
        if (a < 0) throw std::logic_error("victor_miller_basis: negative exponent");
        if (a > 0) {
            if (a_prev <= 0)
                e4pow = e4.pow(static_cast<unsigned long>(a));
            else
                for (long s = a_prev; s < a; s += 3) e4pow = e4pow * e4cube;
        }
        a_prev = a;
        QSeries m = (a > 0) ? delta_pow[c] * e4pow : delta_pow[c];
        if (b == 1) m = m * e6;
        m.set_weight_tag(mpq_class(k));
        rows.push_back(std::move(m));
    }

    std::vector<long> pivots = rref(rows, 1);
    if (static_cast<int>(rows.size()) != d)
        throw std::runtime_error("victor_miller_basis: rank deficiency, nmax too small to echelonize");
    for (int j = 0; j < d; ++j)
        if (pivots[j] != j + 1)
            throw std::runtime_error("victor_miller_basis: pivots not in echelon positions; nmax too small");
    return rows;
}

} // namespace series

} // namespace modl
