#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "spinbus/sector_basis.hpp"

namespace spinbus {

// ---------------------------------------------------------------------------
// Model parameter types
// ---------------------------------------------------------------------------

// Mirror-symmetric engineered XY couplings J_i, i = 1..N-1.
struct CouplingProfile {
    int N = 0; // chain length (sites)
    int k = 0; // family index
    std::vector<double> couplings;
};

// Parabolic on-site field over an odd chain of 2N+1 sites, zero at the center:
// values[i-1] = B(i) = 2*B0*(i-N-1)^2 with 1-based site i.
struct FieldProfile {
    int n_sites = 0; // odd, 2N+1
    double B0 = 0.0;
    std::vector<double> values;

    int half_width() const { return (n_sites - 1) / 2; }
};

FieldProfile parabolic_field(int n_sites, double B0);

enum class Connection { type_a, type_b };

// Two-leg Heisenberg ladder of N rungs plus end qubits A, B.
// Internal site layout: ladder site (rung r, leg l) -> 2r+l for r=0..N-1,
// l=0,1; qubit A = 2N, qubit B = 2N+1. A attaches to (0,0); B attaches to
// (N-1,0) for type_a (same leg) or (N-1,1) for type_b (diagonal).
struct LadderSpec {
    int n_rungs = 0;
    double J = 1.0;  // ladder exchange
    double J0 = 0.0; // qubit-ladder exchange
    Connection connection = Connection::type_a;

    int n_sites() const { return 2 * n_rungs + 2; }
    int site_a() const { return 2 * n_rungs; }
    int site_b() const { return 2 * n_rungs + 1; }
    int site_l() const { return 0; }
    int site_r() const {
        return connection == Connection::type_a ? 2 * (n_rungs - 1)
                                                : 2 * (n_rungs - 1) + 1;
    }
};

// Ferromagnetic spin ring of N sites coupled to one central electron spin.
// Energies: ring Zeeman coefficient gn_mu_n (per unit B0), electron splitting
// Omega = 2*ge_mu_b*B0, hyperfine scale lambda, site spin s, Gaussian
// inhomogeneity width sigma (sites).
struct MemoryParams {
    int N = 0;
    double J = 1.0;
    double B0 = 0.0;
    double gn_mu_n = 1.0;
    double ge_mu_b = 1.0;
    double lambda = 1.0;
    double s = 0.5;
    double sigma = 1.0;

    double g() const { return lambda * std::sqrt(s / (2.0 * N)); }
    double omega_ring() const { return gn_mu_n * B0; } // boson frequency w_N
    double omega_electron() const { return 2.0 * ge_mu_b * B0; }
    double storage_time() const {
        return std::numbers::pi / lambda * std::sqrt(N / (2.0 * s));
    }

    void validate() const;
};

// ---------------------------------------------------------------------------
// Hamiltonian container
// ---------------------------------------------------------------------------

// Real symmetric operator; dense below kDenseStorageCap, sparse above.
inline constexpr int kDenseStorageCap = 64;

struct HamiltonianMatrix {
    int dim = 0;
    bool sparse = false;
    Eigen::MatrixXd dense_mat;
    Eigen::SparseMatrix<double> sparse_mat;
    std::string model_tag;
    std::shared_ptr<const SectorBasis> basis; // null for analytic models

    Eigen::MatrixXd to_dense() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    double symmetry_error() const; // max |H - H^T| / max |H|
};

// Accumulates (row, col, value) entries and freezes into a HamiltonianMatrix.
struct MatrixBuilder {
    explicit MatrixBuilder(int dim) : dim(dim) {}
    int dim;
    std::vector<Eigen::Triplet<double>> entries;

    void add(int r, int c, double v) { entries.emplace_back(r, c, v); }
    HamiltonianMatrix finish(std::string tag,
                             std::shared_ptr<const SectorBasis> basis = nullptr) const;
};

// S_i . S_j with S = sigma/2 applied over a sector basis (diagonal +-1/4,
// flip-flop 1/2), scaled by coupling.
void add_heisenberg_bond(MatrixBuilder& m, const SectorBasis& basis, int site_i,
                         int site_j, double coupling);

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

// J_i = sqrt(i(N-i)) for even i, sqrt((i+2k)(N-i+2k)) for odd i.
// k > 0 requires even N (odd N breaks the mirror symmetry of the profile).
CouplingProfile engineered_couplings(int N, int k);

// N x N tridiagonal hopping matrix with off-diagonals J_i, zero diagonal.
HamiltonianMatrix xy_chain_single_excitation(const CouplingProfile& profile);

// Tridiagonal with off-diagonal -J/2 and diagonal B(i)/2.
HamiltonianMatrix parabolic_chain_single_excitation(int n_sites, double J,
                                                    const FieldProfile& field);

// H_M + H_q of the ladder-plus-qubits system over the given sector.
HamiltonianMatrix heisenberg_ladder_hamiltonian(const LadderSpec& spec,
                                                std::shared_ptr<const SectorBasis> sector);

// Ring + central electron over a sector of N+1 sites (sites 0..N-1 ring,
// site N electron): gn_mu_n*B0*sum S_l^z - J sum S_l.S_{l+1} (periodic)
// + (Omega/2) sigma_e^z + (lambda/2N)(sigma_e^+ sum S_l^- + h.c.).
HamiltonianMatrix ring_with_central_spin_hamiltonian(const MemoryParams& params,
                                                     std::shared_ptr<const SectorBasis> sector);

// (N+1)-dim single-excitation mode model over {|+,vac>, |-,1_k> k=1..N}:
// diagonal { +Omega/2, -Omega/2 + w_k }, off-diagonal g*|chi_k| (chi_N = 1).
// Mode phases are gauged into the basis states so the matrix is real.
HamiltonianMatrix magnon_mode_hamiltonian(const MemoryParams& params,
                                          const std::vector<double>& lambda_profile);

} // namespace spinbus
