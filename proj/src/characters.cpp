#include "modl/characters.hpp"

#include "modl/util.hpp"

#include <cstdlib>
#include <stdexcept>

namespace modl {

namespace characters {

bool is_fundamental(long D) {
    if (D == 0) throw std::invalid_argument("is_fundamental: D = 0");
    long m = D >= 0 ? D : -D;
    long r = ((D % 4) + 4) % 4;
    if (r == 1) return is_squarefree(static_cast<std::uint64_t>(m));
    if (r != 0) return false;
    long q = D / 4;
    long rq = ((q % 4) + 4) % 4;
    if (rq != 2 && rq != 3) return false;
    return is_squarefree(static_cast<std::uint64_t>(std::labs(q)));
}

namespace {

// Kronecker symbol (a|n), full definition over the integers.
int kronecker(long a, long n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) sign = -sign;
    }
    // (a|2) factor per twos in n
    int twos = 0;
    while (n % 2 == 0) { n /= 2; ++twos; }
    if (twos > 0) {
        if (a % 2 == 0) return 0;
        long am8 = ((a % 8) + 8) % 8;
        int s2 = (am8 == 1 || am8 == 7) ? 1 : -1;
        if (twos % 2 == 1 && s2 == -1) sign = -sign;
    }
    // now n odd positive; Jacobi symbol (a|n) by reciprocity.
    // (a|n) is periodic in a mod n for odd n > 0, so reduce first.
    a %= n;
    if (a < 0) a += n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            long nm8 = n % 8;
            if (nm8 == 3 || nm8 == 5) sign = -sign;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) sign = -sign;
        a %= n;
    }
    return n == 1 ? sign : 0;
}

} // namespace

int chi(long D, long n) {
    if (!is_fundamental(D)) throw std::invalid_argument("chi: D is not a fundamental discriminant");
    if (D == 1) return 1;
    return kronecker(D, n);
}

bool parity_matches(long D, long k) {
    if (k % 2 != 0) throw std::invalid_argument("parity_matches: k must be even");
    if (!is_fundamental(D)) throw std::invalid_argument("parity_matches: D not fundamental");
    bool want_positive = (k % 4 == 0);
    return want_positive ? (D > 0) : (D < 0);
}

} // namespace characters

KroneckerChar::KroneckerChar(long d) : D(d) {
    if (!characters::is_fundamental(d))
        throw std::invalid_argument("KroneckerChar: not a fundamental discriminant");
}

int KroneckerChar::operator()(long n) const { return characters::chi(D, n); }

} // namespace modl
