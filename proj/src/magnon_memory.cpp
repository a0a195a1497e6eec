#include "spinbus/magnon_memory.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "spinbus/spectral.hpp"

namespace spinbus {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRingValidationCap = 12;

using Cd = std::complex<double>;
const Cd kI(0.0, 1.0);

} // namespace

double dispersion(const MemoryParams& params, int k) {
    params.validate();
    if (k < 1 || k > params.N) throw DomainError("dispersion: k must be in [1, N]");
    // integer mod keeps k = N exactly on angle 0 (w_N = gn_mu_n B0 identically)
    double angle = 2.0 * kPi * double(k % params.N) / params.N;
    return params.gn_mu_n * params.B0 +
           2.0 * params.J * params.s * (1.0 - std::cos(angle));
}

std::vector<double> gaussian_lambda_profile(int N, double sigma, double lambda) {
    if (N < 2) throw DomainError("gaussian_lambda_profile: N >= 2 required");
    if (sigma <= 0) throw DomainError("gaussian_lambda_profile: sigma > 0 required");
    std::vector<double> profile(N);
    double peak = lambda / (std::sqrt(2.0 * kPi) * sigma);
    for (int l = 1; l <= N; ++l)
        profile[l - 1] = peak * std::exp(-0.5 * double(l - 1) * (l - 1) / (sigma * sigma));
    return profile;
}

ModeCouplings chi_profile(const std::vector<double>& lambda_profile) {
    if (lambda_profile.empty()) throw DomainError("chi_profile: empty profile");
    const int N = int(lambda_profile.size());
    double mean = 0.0;
    for (double l : lambda_profile) mean += l;
    mean /= N;
    if (mean == 0.0) throw DomainError("chi_profile: zero-mean profile");

    ModeCouplings modes;
    modes.lambda_profile = lambda_profile;
    modes.chi.resize(N - 1);
    for (int k = 1; k < N; ++k) {
        Cd acc(0.0, 0.0);
        for (int l = 1; l <= N; ++l) {
            // reduce k*l mod N in integers first; the naive angle loses the
            // exact Fourier-orthogonality cancellation at large N
            std::uint64_t r = (std::uint64_t(k) * std::uint64_t(l)) % std::uint64_t(N);
            double angle = 2.0 * kPi * double(r) / N;
            acc += lambda_profile[l - 1] * Cd(std::cos(angle), std::sin(angle));
        }
        modes.chi[k - 1] = acc / (mean * double(N));
    }
    return modes;
}

double decay_rate(const MemoryParams& params, const ModeCouplings& modes,
                  double broadening) {
    params.validate();
    if (modes.N() != params.N) throw DomainError("decay_rate: profile size != N");
    const int N = params.N;
    const double g = params.g();
    const double w_res = 2.0 * g;

    std::vector<double> w(N - 1);
    for (int k = 1; k < N; ++k) w[k - 1] = dispersion(params, k);

    double eta = broadening;
    if (eta <= 0.0) {
        // default: local mode spacing at the resonance
        int best = 0;
        for (int i = 1; i < N - 1; ++i)
            if (std::abs(w[i] - w_res) < std::abs(w[best] - w_res)) best = i;
        double spacing = 0.0;
        int count = 0;
        if (best > 0) spacing += std::abs(w[best] - w[best - 1]), ++count;
        if (best + 1 < N - 1) spacing += std::abs(w[best + 1] - w[best]), ++count;
        eta = count > 0 ? spacing / count : 4.0 * params.J * params.s;
        if (eta <= 0.0) eta = std::max(4.0 * params.J * params.s, 1e-12);
    }

    double gamma = 0.0;
    for (int k = 1; k < N; ++k) {
        double chi2 = std::norm(modes.chi[k - 1]);
        double det = w[k - 1] - w_res;
        double lorentz = (eta / kPi) / (det * det + eta * eta);
        gamma += 2.0 * kPi * g * g * chi2 * lorentz; // g^2 = lambda^2 s / 2N
    }
    return gamma;
}

double analytic_storage_fidelity(double t, double gamma, double g) {
    if (g <= 0) throw DomainError("analytic_storage_fidelity: g > 0 required");
    if (gamma < 0 || gamma >= g)
        throw DomainError("analytic_storage_fidelity: requires 0 <= gamma < g");
    double phi = std::asin(gamma / g);
    double d1 = std::sqrt(g * g - gamma * gamma);
    double bracket = std::cos(g * t) * std::cos(d1 * t + phi) +
                     std::sin(g * t) * std::sin(d1 * t);
    return std::abs(0.5 * (1.0 + std::exp(-0.5 * gamma * t)) * bracket / std::cos(phi));
}

Eigen::Matrix2cd storage_decoding_unitary() {
    Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
    w(0, 0) = 1.0;
    w(1, 1) = std::exp(-kI * (kPi / 2.0));
    return w;
}

namespace {

void check_density_matrix(const Eigen::Matrix2cd& rho) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw DomainError("density matrix must be Hermitian");
    if (std::abs(rho.trace() - Cd(1.0, 0.0)) > 1e-10)
        throw DomainError("density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw DomainError("density matrix must be positive semidefinite");
}

} // namespace

StorageReport simulate_storage_map(const MemoryParams& params,
                                   const Eigen::Matrix2cd& rho_e,
                                   const std::vector<double>* lambda_profile) {
    params.validate();
    if (params.B0 != 0.0)
        throw DomainError("simulate_storage_map: resonant protocol requires B0 = 0");
    check_density_matrix(rho_e);

    const int N = params.N;
    std::vector<double> profile =
        lambda_profile ? *lambda_profile : std::vector<double>(N, 1.0);
    if (int(profile.size()) != N)
        throw DomainError("simulate_storage_map: profile size != N");
    double mean = 0.0;
    for (double l : profile) mean += l;
    mean /= N;
    for (double l : profile)
        if (std::abs(l - mean) > 1e-12 * std::max(1.0, std::abs(mean)))
            throw DomainError(
                "simulate_storage_map: inhomogeneous profile (use simulate_inhomogeneous)");

    HamiltonianMatrix H = magnon_mode_hamiltonian(params, profile);
    EigenSystem eig = dense_spectrum(H);
    const double T = params.storage_time();

    // rho_e = sum_b p_b |v_b><v_b|; each branch evolves as one closed-system
    // unitary: the dark |-,vac> component is stationary (energy 0 at B0 = 0),
    // the |+,vac> component moves inside the mode space.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho_e);
    Eigen::Matrix2cd w = Eigen::Matrix2cd::Zero();
    for (int b = 0; b < 2; ++b) {
        double p = std::max(0.0, es.eigenvalues()[b]);
        if (p == 0.0) continue;
        Cd v_minus = es.eigenvectors()(0, b);
        Cd v_plus = es.eigenvectors()(1, b);
        Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(H.dim);
        psi0[0] = v_plus;
        Eigen::VectorXcd psiT = evolve_state(eig, psi0, T);
        Eigen::Vector2cd u;
        u[0] = v_minus;    // |0_N>
        u[1] = psiT[N];    // |1_N>, the k = N mode amplitude
        w += p * u * u.adjoint();
    }

    StorageReport report;
    report.rho_e = rho_e;
    report.w = w;
    report.T = T;

    Eigen::Matrix2cd ideal;
    for (int n = 0; n < 2; ++n)
        for (int m = 0; m < 2; ++m)
            ideal(n, m) = rho_e(n, m) * std::exp(kI * (kPi / 2.0) * double(m - n));
    report.residual = (w - ideal).cwiseAbs().maxCoeff();

    Eigen::Matrix2cd W = storage_decoding_unitary();
    report.decode_residual = (W.adjoint() * w * W - rho_e).cwiseAbs().maxCoeff();

    // Uhlmann fidelity, 2x2 closed form: F^2 = tr(rho sigma) + 2 sqrt(det rho det sigma)
    double tr = (w * ideal).trace().real();
    double dets = std::max(0.0, w.determinant().real()) *
                  std::max(0.0, ideal.determinant().real());
    report.fidelity_at_T = std::sqrt(std::max(0.0, tr + 2.0 * std::sqrt(dets)));
    return report;
}

FidelityTrace simulate_inhomogeneous(const MemoryParams& params,
                                     const ModeCouplings& modes,
                                     const std::vector<double>& times) {
    params.validate();
    if (modes.N() != params.N)
        throw DomainError("simulate_inhomogeneous: profile size != N");

    const int N = params.N;
    HamiltonianMatrix H_full = magnon_mode_hamiltonian(params, modes.lambda_profile);
    HamiltonianMatrix H_ideal =
        magnon_mode_hamiltonian(params, std::vector<double>(N, 1.0));
    EigenSystem full = dense_spectrum(H_full);
    EigenSystem ideal = dense_spectrum(H_ideal);

    // initial electron state (|+> + |->)/sqrt(2), ring vacuum: half the weight
    // sits on the stationary |-,vac> level (common phase, cancels in the
    // overlap), half enters the mode space through |+,vac> = e_0.
    Eigen::VectorXd a = full.vectors.row(0).transpose();  // <phi_n | e_0>
    Eigen::VectorXd b = ideal.vectors.row(0).transpose();

    FidelityTrace tr;
    tr.times = times;
    tr.values.reserve(times.size());
    Eigen::VectorXcd cf(H_full.dim), ci(H_full.dim);
    for (double t : times) {
        for (int n = 0; n < H_full.dim; ++n)
            cf[n] = a[n] * std::exp(-kI * full.values[n] * t);
        for (int n = 0; n < H_full.dim; ++n)
            ci[n] = b[n] * std::exp(-kI * ideal.values[n] * t);
        Eigen::VectorXcd psi_f = full.vectors.cast<Cd>() * cf;
        Eigen::VectorXcd psi_i = ideal.vectors.cast<Cd>() * ci;
        Cd overlap = 0.5 * psi_i.dot(psi_f); // psi halves carry weight 1/2 each
        tr.values.push_back(std::abs(0.5 + overlap));
    }
    tr.params = H_full.model_tag;
    return tr;
}

RingValidationReport exact_ring_validation(const MemoryParams& params) {
    params.validate();
    if (params.N > kRingValidationCap)
        throw CapacityError("exact_ring_validation: N > 12");
    if (params.s != 0.5)
        throw DomainError("exact_ring_validation: spin-1/2 ring required (s = 1/2)");

    const int N = params.N;
    const int n_sites = N + 1; // ring + electron
    RingValidationReport report;
    report.flagged_small_N = N <= 2;

    // (a) one-magnon spectrum of the bare ring (lambda = 0 block) vs dispersion
    const double zeeman = params.gn_mu_n * params.B0;
    double e_vac_ring = -0.5 * zeeman * N - 0.25 * params.J * N;
    auto ring_sector = std::make_shared<SectorBasis>(enumerate_sector(N, 1));
    MatrixBuilder ring(int(ring_sector->size()));
    for (int l = 0; l < N; ++l)
        add_heisenberg_bond(ring, *ring_sector, l, (l + 1) % N, -params.J);
    for (int i = 0; i < int(ring_sector->size()); ++i)
        ring.add(i, i, zeeman * (1.0 - 0.5 * N)); // S^z total of the one-up sector
    HamiltonianMatrix H_ring = ring.finish("bare_ring N=" + std::to_string(N),
                                           ring_sector);
    EigenSystem ring_eig = dense_spectrum(H_ring);
    std::vector<double> exact(N);
    for (int i = 0; i < N; ++i) exact[i] = ring_eig.values[i] - e_vac_ring;
    std::vector<double> predicted(N);
    for (int k = 1; k <= N; ++k) predicted[k - 1] = dispersion(params, k);
    std::sort(exact.begin(), exact.end());
    std::sort(predicted.begin(), predicted.end());
    report.exact_excitations =
        Eigen::Map<Eigen::VectorXd>(exact.data(), Eigen::Index(exact.size()));
    report.dispersion_values =
        Eigen::Map<Eigen::VectorXd>(predicted.data(), Eigen::Index(predicted.size()));
    report.max_dispersion_error = 0.0;
    for (int i = 0; i < N; ++i)
        report.max_dispersion_error =
            std::max(report.max_dispersion_error, std::abs(exact[i] - predicted[i]));

    auto one_sector = std::make_shared<SectorBasis>(enumerate_sector(n_sites, 1));
    std::size_t electron_idx = one_sector->index_of(1ull << N);

    // (b) exact storage swap |+,vac> -> -i |-,1_N> at T against the
    // Jaynes-Cummings prediction (same sector: one excitation total)
    HamiltonianMatrix H = ring_with_central_spin_hamiltonian(params, one_sector);
    EigenSystem eig = dense_spectrum(H);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(H.dim);
    psi0[Eigen::Index(electron_idx)] = 1.0;
    const double T = params.storage_time();
    Eigen::VectorXcd psiT = evolve_state(eig, psi0, T);

    double e_block = H.to_dense()(Eigen::Index(electron_idx), Eigen::Index(electron_idx));
    Eigen::VectorXcd pred = Eigen::VectorXcd::Zero(H.dim);
    for (int l = 0; l < N; ++l)
        pred[Eigen::Index(one_sector->index_of(1ull << l))] = 1.0 / std::sqrt(double(N));
    pred *= -kI * std::exp(-kI * e_block * T);
    report.storage_residual = (psiT - pred).norm();
    report.storage_fidelity = std::abs(pred.dot(psiT));
    return report;
}

} // namespace spinbus
