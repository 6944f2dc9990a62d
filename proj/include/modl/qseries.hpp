#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

namespace modl {

// Truncated q-expansion with exact rational coefficients. All arithmetic is
// exact; truncation of a product is min of the operand truncations.
class QSeries {
public:
    QSeries() : nmax_(-1) {}
    explicit QSeries(long nmax, std::optional<mpq_class> weight_tag = std::nullopt);

    long nmax() const { return nmax_; }
    const std::optional<mpq_class>& weight_tag() const { return weight_tag_; }
    void set_weight_tag(mpq_class w) { weight_tag_ = std::move(w); }

    // Access beyond nmax throws; a coefficient the series genuinely does not
    // carry is never silently reported as zero.
    const mpq_class& coeff(long n) const;
    void set_coeff(long n, mpq_class v);
    mpq_class& at(long n);

    QSeries truncated(long new_nmax) const;

    friend QSeries operator+(const QSeries& a, const QSeries& b);
    friend QSeries operator-(const QSeries& a, const QSeries& b);
    friend QSeries operator*(const QSeries& a, const QSeries& b);
    QSeries& operator+=(const QSeries& b);
    QSeries& operator-=(const QSeries& b);

    QSeries scaled(const mpq_class& c) const;
    QSeries pow(unsigned long e) const; // truncation preserved

    bool operator==(const QSeries& o) const { return nmax_ == o.nmax_ && c_ == o.c_; }

    // First n with nonzero coefficient, or -1 if identically zero up to nmax.
    long leading_index() const;

private:
    std::vector<mpq_class> c_;
    long nmax_;
    std::optional<mpq_class> weight_tag_;
};

namespace series {

// Normalized Eisenstein series E4 or E6, exact integer coefficients.
QSeries eisenstein(int weight, long nmax);

// Delta = q prod (1-q^n)^24, via the pentagonal-number expansion of eta.
QSeries delta(long nmax);

// Echelonized basis of S_k(SL_2(Z)): coeff(q^i, f_j) = delta_{ij} for
// 1 <= i,j <= dim. Built from the monomials Delta^c E6^b E4^a with
// 4a + 6b + 12c = k, c >= 1 (one per c, c descending), then exact
// row reduction. Basis coefficients are integers.
std::vector<QSeries> victor_miller_basis(long k, long nmax);

// In-place reduced row echelon form over the coefficient positions
// [first_col, nmax]; returns pivot column per row. Rows that reduce to zero
// are dropped. Deterministic: scans columns ascending, keeps row order
// of first appearance.
std::vector<long> rref(std::vector<QSeries>& rows, long first_col);

} // namespace series

} // namespace modl
