#pragma once

#include "modl/eigenforms.hpp"
#include "modl/kohnenplus.hpp"

#include <optional>
#include <string>
#include <vector>

namespace modl {
namespace cache {

inline constexpr int kSchemaVersion = 1;

// Cache directory resolution: explicit flag wins, then MODL_CACHE_DIR,
// otherwise caching is disabled (empty string).
std::string resolve_dir(const std::string& flag_value);

// Eigen-data round trip. Rationals are stored as integer-pair strings and
// reals as hex significand/exponent plus error, so reloads are bitwise
// identical. Entries carry a content hash; a mismatch means the entry is
// ignored (recompute, never partial-load).
void store_eigen(const std::string& dir, const std::vector<HeckeEigenform>& forms);
std::optional<std::vector<HeckeEigenform>> load_eigen(const std::string& dir, long k, long nmax,
                                                      mpfr_prec_t prec_bits);

void store_plus_basis(const std::string& dir, long k, const std::vector<HalfIntegralForm>& basis);
std::optional<std::vector<HalfIntegralForm>> load_plus_basis(const std::string& dir, long k,
                                                             long nmax);

// eigenforms() with read-through caching; dir may be empty (no caching).
std::vector<HeckeEigenform> eigenforms_cached(const std::string& dir, long k, long nmax,
                                              mpfr_prec_t prec_bits);

} // namespace cache
} // namespace modl
