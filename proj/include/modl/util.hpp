#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace modl {

// Primes up to `limit` inclusive, by sieve of Eratosthenes.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

// Smallest-prime-factor table for 0..limit (spf[0] = spf[1] = 0).
std::vector<std::uint32_t> spf_table(std::uint32_t limit);

bool is_squarefree(std::uint64_t n);

// Factorization as (prime, exponent) pairs, ascending primes. Trial division;
// intended for desk-scale inputs.
std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

// FNV-1a 64-bit content hash, hex-encoded.
std::string fnv1a_hex(const std::string& data);

// Runs fn(i) for i in [0, n) on up to `threads` worker threads. Results are
// written into slots owned by each index, so output order is deterministic.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

// dim S_k(SL_2(Z)) for even k >= 0.
int dim_cusp_forms(long k);

} // namespace modl
