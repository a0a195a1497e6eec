#pragma once
#include <cstdint>
#include <vector>

#include "spinbus/errors.hpp"

namespace spinbus {

// One bit per site, 1 = spin up. Only the lowest n_sites bits may be set.
struct SpinConfiguration {
    std::uint64_t bits = 0;
    int n_sites = 0;
};

// All configurations of n_sites spins with exactly n_up ups, in ascending
// bit-pattern order. Index lookups via binary search on the sorted list.
struct SectorBasis {
    int n_sites = 0;
    int n_up = 0;
    std::vector<std::uint64_t> states; // strictly increasing

    std::size_t size() const { return states.size(); }
    std::size_t index_of(std::uint64_t bits) const;
    bool contains(std::uint64_t bits) const;
};

// Hard cap on sector size; larger requests raise CapacityError.
inline constexpr std::size_t kSectorCapacityCap = 20'000'000;

// Binomial coefficient with overflow guard (saturates above the cap).
std::size_t sector_dimension(int n_sites, int n_up);

SectorBasis enumerate_sector(int n_sites, int n_up);

// Index permutation induced by reversing site order (an involution).
std::vector<std::size_t> mirror_permutation(const SectorBasis& basis);

// Bit pattern with site order reversed within n_sites bits.
std::uint64_t reverse_sites(std::uint64_t bits, int n_sites);

} // namespace spinbus
