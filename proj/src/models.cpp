#include "spinbus/models.hpp"

#include <bit>
#include <cmath>

#include "spinbus/magnon_memory.hpp"

namespace spinbus {

// ---------------------------------------------------------------------------
// HamiltonianMatrix
// ---------------------------------------------------------------------------

Eigen::MatrixXd HamiltonianMatrix::to_dense() const {
    if (!sparse) return dense_mat;
    return Eigen::MatrixXd(sparse_mat);
}

Eigen::VectorXd HamiltonianMatrix::apply(const Eigen::VectorXd& x) const {
    if (x.size() != dim) throw DomainError("apply: dimension mismatch");
    if (sparse) return sparse_mat * x;
    return dense_mat * x;
}

double HamiltonianMatrix::symmetry_error() const {
    Eigen::MatrixXd d = to_dense();
    double scale = std::max(1e-300, d.cwiseAbs().maxCoeff());
    return (d - d.transpose()).cwiseAbs().maxCoeff() / scale;
}

HamiltonianMatrix MatrixBuilder::finish(std::string tag,
                                        std::shared_ptr<const SectorBasis> basis) const {
    HamiltonianMatrix H;
    H.dim = dim;
    H.model_tag = std::move(tag);
    H.basis = std::move(basis);
    H.sparse = dim > kDenseStorageCap;
    if (H.sparse) {
        H.sparse_mat.resize(dim, dim);
        H.sparse_mat.setFromTriplets(entries.begin(), entries.end());
        H.sparse_mat.makeCompressed();
    } else {
        H.dense_mat = Eigen::MatrixXd::Zero(dim, dim);
        for (const auto& t : entries) H.dense_mat(t.row(), t.col()) += t.value();
    }
    return H;
}

void add_heisenberg_bond(MatrixBuilder& m, const SectorBasis& basis, int site_i,
                         int site_j, double coupling) {
    if (site_i == site_j || site_i < 0 || site_j < 0 || site_i >= basis.n_sites ||
        site_j >= basis.n_sites)
        throw DomainError("add_heisenberg_bond: bad sites");
    const std::uint64_t bi = std::uint64_t(1) << site_i;
    const std::uint64_t bj = std::uint64_t(1) << site_j;
    for (std::size_t s = 0; s < basis.size(); ++s) {
        std::uint64_t st = basis.states[s];
        bool ui = st & bi, uj = st & bj;
        if (ui == uj) {
            m.add(int(s), int(s), 0.25 * coupling);
        } else {
            m.add(int(s), int(s), -0.25 * coupling);
            std::size_t t = basis.index_of(st ^ bi ^ bj);
            m.add(int(t), int(s), 0.5 * coupling);
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter types
// ---------------------------------------------------------------------------

FieldProfile parabolic_field(int n_sites, double B0) {
    if (n_sites < 3 || n_sites % 2 == 0)
        throw DomainError("parabolic_field: n_sites must be odd and >= 3");
    FieldProfile f;
    f.n_sites = n_sites;
    f.B0 = B0;
    f.values.resize(n_sites);
    int center = (n_sites + 1) / 2; // 1-based N+1
    for (int i = 1; i <= n_sites; ++i) {
        double d = i - center;
        f.values[i - 1] = 2.0 * B0 * d * d;
    }
    return f;
}

void MemoryParams::validate() const {
    if (N < 2) throw DomainError("MemoryParams: N >= 2 required");
    if (J <= 0) throw DomainError("MemoryParams: J > 0 required");
    if (lambda <= 0) throw DomainError("MemoryParams: lambda > 0 required");
    if (s <= 0) throw DomainError("MemoryParams: s > 0 required");
    if (sigma <= 0) throw DomainError("MemoryParams: sigma > 0 required");
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

CouplingProfile engineered_couplings(int N, int k) {
    if (N < 2) throw DomainError("engineered_couplings: N >= 2 required");
    if (k < 0) throw DomainError("engineered_couplings: k >= 0 required");
    if (k > 0 && N % 2 != 0)
        throw DomainError("engineered_couplings: k > 0 requires even N "
                          "(odd N breaks the mirror symmetry of the profile)");
    CouplingProfile p;
    p.N = N;
    p.k = k;
    p.couplings.resize(N - 1);
    for (int i = 1; i < N; ++i) {
        double j = (i % 2 == 0) ? std::sqrt(double(i) * (N - i))
                                : std::sqrt(double(i + 2 * k) * (N - i + 2 * k));
        p.couplings[i - 1] = j;
    }
    return p;
}

HamiltonianMatrix xy_chain_single_excitation(const CouplingProfile& profile) {
    int N = profile.N;
    if (N < 2 || int(profile.couplings.size()) != N - 1)
        throw DomainError("xy_chain_single_excitation: bad profile");
    MatrixBuilder m(N);
    for (int i = 0; i < N - 1; ++i) {
        m.add(i, i + 1, profile.couplings[i]);
        m.add(i + 1, i, profile.couplings[i]);
    }
    return m.finish("xy_chain[N=" + std::to_string(N) + ",k=" + std::to_string(profile.k) + "]");
}

HamiltonianMatrix parabolic_chain_single_excitation(int n_sites, double J,
                                                    const FieldProfile& field) {
    if (field.n_sites != n_sites)
        throw DomainError("parabolic_chain_single_excitation: field size mismatch");
    if (J <= 0) throw DomainError("parabolic_chain_single_excitation: J > 0 required");
    MatrixBuilder m(n_sites);
    for (int i = 0; i < n_sites - 1; ++i) {
        m.add(i, i + 1, -J / 2.0);
        m.add(i + 1, i, -J / 2.0);
    }
    for (int i = 0; i < n_sites; ++i) m.add(i, i, field.values[i] / 2.0);
    return m.finish("parabolic_chain[n=" + std::to_string(n_sites) + "]");
}

HamiltonianMatrix heisenberg_ladder_hamiltonian(const LadderSpec& spec,
                                                std::shared_ptr<const SectorBasis> sector) {
    if (spec.n_rungs < 1) throw DomainError("ladder: n_rungs >= 1 required");
    if (spec.J <= 0) throw DomainError("ladder: J > 0 required");
    if (spec.J0 < 0) throw DomainError("ladder: J0 >= 0 required");
    if (!sector || sector->n_sites != spec.n_sites())
        throw DomainError("ladder: sector must cover 2N+2 sites");
    const SectorBasis& b = *sector;
    MatrixBuilder m(int(b.size()));
    int N = spec.n_rungs;
    for (int r = 0; r < N; ++r) add_heisenberg_bond(m, b, 2 * r, 2 * r + 1, spec.J);
    for (int r = 0; r + 1 < N; ++r) {
        add_heisenberg_bond(m, b, 2 * r, 2 * (r + 1), spec.J);
        add_heisenberg_bond(m, b, 2 * r + 1, 2 * (r + 1) + 1, spec.J);
    }
    if (spec.J0 > 0) {
        add_heisenberg_bond(m, b, spec.site_a(), spec.site_l(), spec.J0);
        add_heisenberg_bond(m, b, spec.site_b(), spec.site_r(), spec.J0);
    }
    return m.finish("ladder[N=" + std::to_string(N) + ",J=" + std::to_string(spec.J) +
                        ",J0=" + std::to_string(spec.J0) +
                        (spec.connection == Connection::type_a ? ",a]" : ",b]"),
                    sector);
}

HamiltonianMatrix ring_with_central_spin_hamiltonian(const MemoryParams& params,
                                                     std::shared_ptr<const SectorBasis> sector) {
    params.validate();
    int N = params.N;
    if (!sector || sector->n_sites != N + 1)
        throw DomainError("ring_with_central_spin: sector must cover N+1 sites");
    const SectorBasis& b = *sector;
    MatrixBuilder m(int(b.size()));
    const int electron = N;
    const std::uint64_t be = std::uint64_t(1) << electron;
    for (int l = 0; l < N; ++l) add_heisenberg_bond(m, b, l, (l + 1) % N, -params.J);
    const double zn = params.gn_mu_n * params.B0;
    const double omega = params.omega_electron();
    const double hyper = params.lambda / (2.0 * N);
    for (std::size_t s = 0; s < b.size(); ++s) {
        std::uint64_t st = b.states[s];
        int ring_up = int(std::popcount(st & (be - 1)));
        double diag = zn * (ring_up - (N - ring_up)) / 2.0;
        diag += (st & be) ? omega / 2.0 : -omega / 2.0;
        if (diag != 0.0) m.add(int(s), int(s), diag);
        // sigma_e^+ S_l^-: electron down->up, ring site up->down (+ transpose)
        if (!(st & be)) {
            for (int l = 0; l < N; ++l) {
                std::uint64_t bl = std::uint64_t(1) << l;
                if (st & bl) {
                    std::size_t t = b.index_of((st ^ bl) | be);
                    m.add(int(t), int(s), hyper);
                    m.add(int(s), int(t), hyper);
                }
            }
        }
    }
    return m.finish("ring_central_spin[N=" + std::to_string(N) + "]", sector);
}

HamiltonianMatrix magnon_mode_hamiltonian(const MemoryParams& params,
                                          const std::vector<double>& lambda_profile) {
    params.validate();
    int N = params.N;
    if (int(lambda_profile.size()) != N)
        throw DomainError("magnon_mode_hamiltonian: profile length must equal N");
    ModeCouplings modes = chi_profile(lambda_profile);
    const double g = params.g();
    const double omega = params.omega_electron();
    MatrixBuilder m(N + 1);
    m.add(0, 0, omega / 2.0); // |+, vac>
    for (int k = 1; k <= N; ++k) {
        m.add(k, k, -omega / 2.0 + dispersion(params, k));
        double c = (k == N) ? g : g * modes.abs_chi(k);
        if (c != 0.0) {
            m.add(0, k, c);
            m.add(k, 0, c);
        }
    }
    return m.finish("magnon_modes[N=" + std::to_string(N) + "]");
}

} // namespace spinbus
