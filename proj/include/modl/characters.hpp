#pragma once

#include <cstdint>

namespace modl {

// Fundamental discriminant D and its real primitive character chi_D
// (Kronecker symbol). D = 1 is admitted as the trivial discriminant so the
// untwisted and twisted pipelines share one code path.
struct KroneckerChar {
    long D;

    explicit KroneckerChar(long d);

    int parity() const { return D > 0 ? 1 : -1; } // chi_D(-1)
    bool is_odd() const { return D % 2 != 0; }
    int operator()(long n) const;
};

namespace characters {

bool is_fundamental(long D);

// Kronecker symbol (D|n) for fundamental D, any integer n.
int chi(long D, long n);

// chi_D(-1) = i^k, i.e. D > 0 for k = 0 mod 4 and D < 0 for k = 2 mod 4.
bool parity_matches(long D, long k);

} // namespace characters

} // namespace modl
