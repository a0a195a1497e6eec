#include "spinbus/sector_basis.hpp"

#include <algorithm>

namespace spinbus {

std::size_t SectorBasis::index_of(std::uint64_t bits) const {
    auto it = std::lower_bound(states.begin(), states.end(), bits);
    if (it == states.end() || *it != bits)
        throw DomainError("configuration not in sector");
    return static_cast<std::size_t>(it - states.begin());
}

bool SectorBasis::contains(std::uint64_t bits) const {
    return std::binary_search(states.begin(), states.end(), bits);
}

std::size_t sector_dimension(int n_sites, int n_up) {
    if (n_sites < 0 || n_up < 0 || n_up > n_sites)
        throw DomainError("sector_dimension: need 0 <= n_up <= n_sites");
    // C(n, k) with saturation well above the capacity cap
    long double c = 1.0L;
    int k = std::min(n_up, n_sites - n_up);
    for (int i = 1; i <= k; ++i) {
        c = c * (n_sites - k + i) / i;
        if (c > 1e18L) return static_cast<std::size_t>(-1);
    }
    return static_cast<std::size_t>(c + 0.5L);
}

SectorBasis enumerate_sector(int n_sites, int n_up) {
    if (n_sites < 1 || n_sites > 62)
        throw DomainError("enumerate_sector: n_sites must be in [1, 62]");
    if (n_up < 0 || n_up > n_sites)
        throw DomainError("enumerate_sector: need 0 <= n_up <= n_sites");
    std::size_t dim = sector_dimension(n_sites, n_up);
    if (dim > kSectorCapacityCap)
        throw CapacityError("enumerate_sector: sector has " + std::to_string(dim) +
                            " states, cap is " + std::to_string(kSectorCapacityCap));

    SectorBasis basis;
    basis.n_sites = n_sites;
    basis.n_up = n_up;
    basis.states.reserve(dim);
    if (n_up == 0) {
        basis.states.push_back(0);
        return basis;
    }
    // Gosper's hack walks same-popcount patterns in ascending order.
    std::uint64_t v = (std::uint64_t(1) << n_up) - 1;
    std::uint64_t last = v << (n_sites - n_up);
    for (;;) {
        basis.states.push_back(v);
        if (v == last) break;
        std::uint64_t c = v & (~v + 1);
        std::uint64_t r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    return basis;
}

std::uint64_t reverse_sites(std::uint64_t bits, int n_sites) {
    std::uint64_t out = 0;
    for (int i = 0; i < n_sites; ++i)
        if (bits >> i & 1) out |= std::uint64_t(1) << (n_sites - 1 - i);
    return out;
}

std::vector<std::size_t> mirror_permutation(const SectorBasis& basis) {
    std::vector<std::size_t> perm(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i)
        perm[i] = basis.index_of(reverse_sites(basis.states[i], basis.n_sites));
    return perm;
}

} // namespace spinbus
