#pragma once

// On-disk prime table: the 8 magic bytes "PRIMES01", then little-endian u64
// limit, u64 count and count little-endian u64 primes.

#include <filesystem>
#include <optional>

#include "nuclear/arith.hpp"

namespace nuclear {

inline constexpr char kPrimeCacheMagic[8] = {'P', 'R', 'I', 'M', 'E', 'S', '0', '1'};

// Writes to a temporary sibling and renames it over path.
void write_prime_cache(const std::filesystem::path& path, const PrimeTable& table);

PrimeTable read_prime_cache(const std::filesystem::path& path);

std::filesystem::path prime_cache_file(const std::filesystem::path& dir);

// Primes up to limit, served from dir/primes.bin when it covers limit and
// regenerated (and written back under an exclusive lock) otherwise.
PrimeTable load_or_generate_primes(u64 limit,
                                   const std::optional<std::filesystem::path>& dir,
                                   const SieveBudget& budget = {});

}  // namespace nuclear
