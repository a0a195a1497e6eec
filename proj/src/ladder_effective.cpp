#include "spinbus/ladder_effective.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include "spinbus/spectral.hpp"

namespace spinbus {

namespace {

constexpr int kPerturbativeLadderSiteCap = 14; // bare ladder, dense solve
constexpr int kExactRungCap = 8;               // 18 spins, iterative solver

void check_rungs(const LadderSpec& spec) {
    if (spec.n_rungs < 1) throw DomainError("ladder: n_rungs >= 1 required");
    if (spec.J <= 0) throw DomainError("ladder: J > 0 required");
    if (spec.J0 < 0) throw DomainError("ladder: J0 >= 0 required");
}

// Ladder sites only (no qubits): rung bonds + leg bonds, S^z = 0 sector.
HamiltonianMatrix bare_ladder(const LadderSpec& spec,
                              std::shared_ptr<const SectorBasis> sector) {
    MatrixBuilder m(int(sector->size()));
    for (int r = 0; r < spec.n_rungs; ++r)
        add_heisenberg_bond(m, *sector, 2 * r, 2 * r + 1, spec.J);
    for (int r = 0; r + 1 < spec.n_rungs; ++r)
        for (int l = 0; l < 2; ++l)
            add_heisenberg_bond(m, *sector, 2 * r + l, 2 * (r + 1) + l, spec.J);
    return m.finish("bare_ladder n_rungs=" + std::to_string(spec.n_rungs), sector);
}

double site_z(std::uint64_t bits, int site) {
    return (bits >> site) & 1u ? 0.5 : -0.5;
}

struct LowLevels {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

// Lowest `want` levels: dense below ~1200, Lanczos above.
LowLevels lowest_levels(const HamiltonianMatrix& H, int want) {
    want = std::min(want, H.dim);
    if (H.dim <= 1200) {
        EigenSystem es = dense_spectrum(H);
        return {es.values.head(want), es.vectors.leftCols(want)};
    }
    EigenPairs ep = lowest_eigenpairs(H, want);
    return {ep.values, ep.vectors};
}

} // namespace

EffectiveCouplingReport perturbative_jeff(const LadderSpec& spec) {
    check_rungs(spec);
    const int n_l = 2 * spec.n_rungs;
    if (n_l > kPerturbativeLadderSiteCap)
        throw CapacityError("perturbative_jeff: more than 14 ladder sites");

    auto sector = std::make_shared<SectorBasis>(enumerate_sector(n_l, n_l / 2));
    HamiltonianMatrix H = bare_ladder(spec, sector);
    EigenSystem es = dense_spectrum(H);
    const int dim = H.dim;

    Eigen::VectorXd zl(dim), zr(dim);
    for (int i = 0; i < dim; ++i) {
        zl[i] = site_z(sector->states[i], spec.site_l());
        zr[i] = site_z(sector->states[i], spec.site_r());
    }
    Eigen::VectorXd g = es.vectors.col(0);
    Eigen::VectorXd Lc = es.vectors.transpose() * zl.cwiseProduct(g).matrix();
    Eigen::VectorXd Rc = es.vectors.transpose() * zr.cwiseProduct(g).matrix();

    double span = es.values[dim - 1] - es.values[0];
    double tol = 1e-9 * std::max(span, 1.0);
    double j0sq = spec.J0 * spec.J0;

    EffectiveCouplingReport rep;
    rep.spec = spec;
    rep.method = "perturbative";
    for (int a = 0; a < dim; ++a) {
        double de = es.values[0] - es.values[a];
        if (-de <= tol) continue; // ground cluster
        rep.j_eff += 2.0 * j0sq * Lc[a] * Rc[a] / de;
        rep.epsilon += 0.75 * j0sq * (Lc[a] * Lc[a] + Rc[a] * Rc[a]) / de;
    }
    rep.degenerate_ground = dim > 1 && es.values[1] - es.values[0] <= tol;
    rep.ground_spin = spin_from_s2(total_spin2_expectation(g, *sector));
    return rep;
}

EffectiveCouplingReport exact_spin_gap(const LadderSpec& spec) {
    check_rungs(spec);
    if (spec.n_rungs > kExactRungCap)
        throw CapacityError("exact_spin_gap: n_rungs > 8 (desk-scale cap)");

    const int n = spec.n_sites();
    auto sector = std::make_shared<SectorBasis>(enumerate_sector(n, n / 2));
    HamiltonianMatrix H = heisenberg_ladder_hamiltonian(spec, sector);
    LowLevels low = lowest_levels(H, 5);

    EffectiveCouplingReport rep;
    rep.spec = spec;
    rep.method = "exact_gap";
    rep.cluster_energies.assign(low.values.data(), low.values.data() + low.values.size());

    double tol = 1e-9 * std::max(1.0, std::abs(low.values[0]));
    int cluster_end = 1;
    while (cluster_end < low.values.size() &&
           low.values[cluster_end] - low.values[0] <= tol)
        ++cluster_end;
    rep.degenerate_ground = cluster_end > 1;
    rep.ground_spin = spin_from_s2(total_spin2_expectation(low.vectors.col(0), *sector));

    if (rep.degenerate_ground) {
        // no single gap; report the raw splitting inside the ground cluster
        rep.gap = low.values.size() > 1 ? low.values[1] - low.values[0] : 0.0;
        rep.j_eff = 0.0;
        return rep;
    }
    if (cluster_end >= low.values.size())
        throw ConvergenceError("exact_spin_gap: no level above the ground cluster", 0.0);
    rep.gap = low.values[cluster_end] - low.values[0];
    // AFM effective coupling (singlet ground) counted positive
    rep.j_eff = rep.ground_spin < 0.5 ? rep.gap : -rep.gap;
    return rep;
}

GroundSpinReport lieb_ground_spin(const LadderSpec& spec) {
    check_rungs(spec);
    if (spec.J0 <= 0) throw DomainError("lieb_ground_spin: J0 > 0 required");
    if (spec.n_rungs > kExactRungCap)
        throw CapacityError("lieb_ground_spin: n_rungs > 8 (desk-scale cap)");

    const int n = spec.n_sites();
    auto sector = std::make_shared<SectorBasis>(enumerate_sector(n, n / 2));
    HamiltonianMatrix H = heisenberg_ladder_hamiltonian(spec, sector);
    LowLevels low = lowest_levels(H, 4);

    double tol = 1e-9 * std::max(1.0, std::abs(low.values[0]));
    GroundSpinReport rep;
    rep.spin = spin_from_s2(total_spin2_expectation(low.vectors.col(0), *sector));
    for (int i = 1; i < low.values.size(); ++i) {
        if (low.values[i] - low.values[0] > tol) break;
        double si = spin_from_s2(total_spin2_expectation(low.vectors.col(i), *sector));
        if (std::abs(si - rep.spin) > 1e-6) rep.ambiguous = true;
    }
    return rep;
}

double total_spin2_expectation(const Eigen::VectorXd& psi, const SectorBasis& basis) {
    if (std::size_t(psi.size()) != basis.size())
        throw DomainError("total_spin2_expectation: dimension mismatch");
    const int n = basis.n_sites;
    double zz = 0.0, flip = 0.0;
    for (std::size_t idx = 0; idx < basis.size(); ++idx) {
        std::uint64_t c = basis.states[idx];
        double a = psi[Eigen::Index(idx)];
        if (a == 0.0) continue;
        for (int i = 0; i < n; ++i) {
            bool ui = (c >> i) & 1u;
            for (int j = i + 1; j < n; ++j) {
                bool uj = (c >> j) & 1u;
                zz += a * a * (ui ? 0.5 : -0.5) * (uj ? 0.5 : -0.5);
                if (ui != uj) {
                    std::uint64_t c2 = c ^ ((1ull << i) | (1ull << j));
                    flip += 0.5 * a * psi[Eigen::Index(basis.index_of(c2))];
                }
            }
        }
    }
    return 0.75 * n + 2.0 * (zz + flip);
}

double spin_from_s2(double s2) {
    if (s2 < -1e-9) throw DomainError("spin_from_s2: negative <S^2>");
    return 0.5 * (std::sqrt(1.0 + 4.0 * std::max(s2, 0.0)) - 1.0);
}

ReducedStateReport reduced_coefficients(const Eigen::VectorXd& psi,
                                        const SectorBasis& basis, int site_a,
                                        int site_b) {
    if (std::size_t(psi.size()) != basis.size())
        throw DomainError("reduced_coefficients: dimension mismatch");
    if (2 * basis.n_up != basis.n_sites)
        throw DomainError("reduced_coefficients: S^z = 0 sector required");
    if (site_a < 0) site_a = basis.n_sites - 2;
    if (site_b < 0) site_b = basis.n_sites - 1;
    if (site_a == site_b || site_a >= basis.n_sites || site_b >= basis.n_sites)
        throw DomainError("reduced_coefficients: bad qubit sites");

    double zz = 0.0, flip = 0.0;
    for (std::size_t idx = 0; idx < basis.size(); ++idx) {
        std::uint64_t c = basis.states[idx];
        double a = psi[Eigen::Index(idx)];
        if (a == 0.0) continue;
        bool ua = (c >> site_a) & 1u, ub = (c >> site_b) & 1u;
        zz += a * a * (ua ? 0.5 : -0.5) * (ub ? 0.5 : -0.5);
        if (ua != ub) {
            std::uint64_t c2 = c ^ ((1ull << site_a) | (1ull << site_b));
            flip += 0.5 * a * psi[Eigen::Index(basis.index_of(c2))];
        }
    }
    ReducedStateReport rep;
    rep.c11 = 0.25 + zz;
    rep.c00 = 0.25 - (zz + flip);
    rep.c10 = 1.0 - 2.0 * rep.c11 - rep.c00;
    return rep;
}

ScalingFit jeff_scaling_fit(const std::vector<int>& L_values, double J, double J0,
                            Connection connection) {
    if (L_values.size() < 3)
        throw DomainError("jeff_scaling_fit: at least 3 L values required");

    ScalingFit fit;
    fit.rows.resize(L_values.size());
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < L_values.size(); ++i)
        pool.emplace_back([&, i] {
            try {
                int L = L_values[i];
                if (L < 2) throw DomainError("jeff_scaling_fit: L >= 2 required");
                LadderSpec spec{L - 1, J, J0, connection};
                ScalingRow row{L, J, J0, 0.0, 0.0};
                row.gap = exact_spin_gap(spec).gap;
                row.jeff_perturbative = perturbative_jeff(spec).j_eff;
                fit.rows[i] = row;
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    // least squares on log(gap) vs log(L)
    const int m = int(fit.rows.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const ScalingRow& r : fit.rows) {
        if (r.gap <= 0) throw DomainError("jeff_scaling_fit: nonpositive gap");
        double x = std::log(double(r.L)), y = std::log(r.gap);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = m * sxx - sx * sx;
    fit.exponent = (m * sxy - sx * sy) / denom;
    double intercept = (sy - fit.exponent * sx) / m;
    fit.prefactor = std::exp(intercept);
    double ss_res = 0, ss_tot = 0, ybar = sy / m;
    for (const ScalingRow& r : fit.rows) {
        double x = std::log(double(r.L)), y = std::log(r.gap);
        double yhat = intercept + fit.exponent * x;
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace spinbus
