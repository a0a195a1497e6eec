#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "spinbus/dynamics.hpp"
#include "spinbus/models.hpp"

using namespace spinbus;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / double(n - 1);
    return t;
}

HamiltonianMatrix wavepacket_chain(const WavepacketSpec& spec, double J = 1.0) {
    FieldProfile field = parabolic_field(spec.n_sites, spec.B0());
    return parabolic_chain_single_excitation(spec.n_sites, J, field);
}

} // namespace

TEST_CASE("wavepacket spec validation and derived constants") {
    WavepacketSpec ok{101, 5, 10.0, 1.0};
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.half_width() == 50);
    CHECK(ok.alpha2() == doctest::Approx(4.0 * std::numbers::ln2 / 100.0).epsilon(1e-14));
    double c = std::numbers::ln2 / 100.0;
    CHECK(ok.B0() == doctest::Approx(8.0 * c * c).epsilon(1e-14));

    WavepacketSpec d4{41, 0, 4.0, 1.0};
    CHECK(d4.alpha2() == doctest::Approx(std::numbers::ln2 / 4.0).epsilon(1e-14));

    CHECK_THROWS_AS((WavepacketSpec{100, 5, 10.0, 1.0}.validate()), DomainError); // even length
    CHECK_THROWS_AS((WavepacketSpec{101, 51, 10.0, 1.0}.validate()), DomainError); // off chain
    CHECK_THROWS_AS((WavepacketSpec{101, 5, 0.0, 1.0}.validate()), DomainError);   // width
}

TEST_CASE("evolve_state basics") {
    HamiltonianMatrix H = xy_chain_single_excitation(engineered_couplings(6, 0));
    EigenSystem eig = dense_spectrum(H);

    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(6);
    psi0[2] = 1.0;
    CHECK((evolve_state(eig, psi0, 0.0) - psi0).norm() < 1e-13); // t = 0 identity

    // eigenvector picks up only a phase
    Eigen::VectorXcd phi = eig.vectors.col(3).cast<std::complex<double>>();
    Eigen::VectorXcd out = evolve_state(eig, phi, 0.7);
    std::complex<double> phase = std::exp(std::complex<double>(0, -eig.values[3] * 0.7));
    CHECK((out - phase * phi).norm() < 1e-12);

    // unitarity over a time sweep
    for (double t : {0.1, 1.0, 7.3, 100.0})
        CHECK(evolve_state(eig, psi0, t).norm() == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::VectorXcd wrong = Eigen::VectorXcd::Zero(5);
    CHECK_THROWS_AS(evolve_state(eig, wrong, 1.0), DomainError);
}

TEST_CASE("two-level Rabi oscillation") {
    double J = 0.8;
    CouplingProfile p{2, 0, {J}};
    HamiltonianMatrix H = xy_chain_single_excitation(p);
    EigenSystem eig = dense_spectrum(H);
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(2);
    psi0[0] = 1.0;
    for (double t : {0.0, 0.3, 1.1, 2.0}) {
        Eigen::VectorXcd psi = evolve_state(eig, psi0, t);
        CHECK(std::abs(psi[1]) == doctest::Approx(std::abs(std::sin(J * t))).epsilon(1e-12));
    }
}

TEST_CASE("transfer_fidelity on engineered chains") {
    // two-level half period
    HamiltonianMatrix H2 = xy_chain_single_excitation(engineered_couplings(2, 0));
    FidelityTrace t2 = transfer_fidelity(H2, 1, 2, {std::numbers::pi / 2.0});
    CHECK(t2.values[0] == doctest::Approx(1.0).epsilon(1e-12));

    HamiltonianMatrix H6 = xy_chain_single_excitation(engineered_couplings(6, 0));
    FidelityTrace t6 = transfer_fidelity(H6, 1, 6, {0.0, std::numbers::pi / 2.0});
    CHECK(t6.values[0] == doctest::Approx(0.0).epsilon(1e-12)); // orthogonal at t = 0
    CHECK(std::abs(t6.values[1] - 1.0) < 1e-8);

    CHECK_THROWS_AS(transfer_fidelity(H6, 0, 6, {0.0}), DomainError);
    CHECK_THROWS_AS(transfer_fidelity(H6, 1, 7, {0.0}), DomainError);
}

TEST_CASE("mirror fidelity holds across the engineered families") {
    for (auto [N, k] : {std::pair{4, 0}, {10, 0}, {4, 1}, {6, 2}}) {
        HamiltonianMatrix H = xy_chain_single_excitation(engineered_couplings(N, k));
        FidelityTrace tr = transfer_fidelity(H, 1, N, {std::numbers::pi / 2.0});
        CHECK(std::abs(tr.values[0] - 1.0) < 1e-8);
    }
}

TEST_CASE("fidelity traces stay within [0, 1]") {
    HamiltonianMatrix H = xy_chain_single_excitation(engineered_couplings(8, 0));
    FidelityTrace tr = transfer_fidelity(H, 1, 5, linspace(0.0, 10.0, 101));
    REQUIRE(tr.times.size() == tr.values.size());
    for (double v : tr.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("gaussian packet shape") {
    WavepacketSpec spec{101, 5, 10.0, 1.0};
    Eigen::VectorXd psi = gaussian_packet(spec);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
    int argmax = 0;
    psi.cwiseAbs().maxCoeff(&argmax);
    CHECK(argmax == spec.half_width() + spec.N_A); // center site + offset
    // amplitude ratio one site off the peak
    CHECK(psi[argmax + 1] / psi[argmax] ==
          doctest::Approx(std::exp(-0.5 * spec.alpha2())).epsilon(1e-12));

    Eigen::VectorXd mir = mirror_packet(psi);
    CHECK(mir.norm() == doctest::Approx(1.0).epsilon(1e-13));
    int argmax_m = 0;
    mir.cwiseAbs().maxCoeff(&argmax_m);
    CHECK(argmax_m == spec.half_width() - spec.N_A);
    CHECK((mirror_packet(mir) - psi).norm() < 1e-15);
}

TEST_CASE("analytic packet fidelity closed form") {
    double alpha2 = 4.0 * std::numbers::ln2 / 100.0;
    int N_A = 5;
    // lambda_scale = J = 1 regime: maximum 1 at t = pi/alpha2
    CHECK(analytic_packet_fidelity(std::numbers::pi / alpha2, alpha2, N_A) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // t = 0 value
    CHECK(analytic_packet_fidelity(0.0, alpha2, N_A) ==
          doctest::Approx(std::exp(-alpha2 * N_A * N_A)).epsilon(1e-12));
    // periodicity with period 2 pi / alpha2
    double T = 2.0 * std::numbers::pi / alpha2;
    for (double t : {0.3, 17.0, 100.0})
        CHECK(analytic_packet_fidelity(t, alpha2, N_A) ==
              doctest::Approx(analytic_packet_fidelity(t + T, alpha2, N_A)).epsilon(1e-12));
    // explicit harmonic frequency argument
    double omega = alpha2 * std::sqrt(0.25);
    CHECK(analytic_packet_fidelity(std::numbers::pi / omega, alpha2, N_A, omega) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("packet transfer matches the analytic formula in its regime") {
    WavepacketSpec spec{101, 5, 10.0, 1.0};
    HamiltonianMatrix H = wavepacket_chain(spec);
    double omega = spec.alpha2();
    double T = 2.0 * std::numbers::pi / omega;
    std::vector<double> times = linspace(0.0, T, 401);
    FidelityTrace num = packet_transfer_trace(H, spec, times);
    double sup = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double ana = analytic_packet_fidelity(times[i], spec.alpha2(), spec.N_A, omega);
        sup = std::max(sup, std::abs(num.values[i] - ana));
    }
    CHECK(sup < 1e-2);

    // t = 0: overlap of the packet with its mirror image
    CHECK(num.values[0] ==
          doctest::Approx(std::exp(-spec.alpha2() * spec.N_A * spec.N_A)).epsilon(1e-6));
}

TEST_CASE("packet transfer rejects mismatched chain sizes") {
    WavepacketSpec spec{101, 5, 10.0, 1.0};
    WavepacketSpec other{99, 5, 10.0, 1.0};
    HamiltonianMatrix H = wavepacket_chain(other);
    CHECK_THROWS_AS(packet_transfer_trace(H, spec, {0.0}), DomainError);
}

TEST_CASE("log_grid spans endpoints geometrically") {
    std::vector<double> g = log_grid(1e-4, 1e-1, 7);
    REQUIRE(g.size() == 7);
    CHECK(g.front() == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(g.back() == doctest::Approx(1e-1).epsilon(1e-12));
    for (std::size_t i = 1; i < g.size(); ++i) {
        CHECK(g[i] > g[i - 1]);
        CHECK(g[i] / g[i - 1] == doctest::Approx(g[1] / g[0]).epsilon(1e-10));
    }
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 5), DomainError);
    CHECK_THROWS_AS(log_grid(1e-2, 1e-3, 5), DomainError);
}

TEST_CASE("scan_field_scale finds an interior optimum on a small problem") {
    std::vector<double> grid = log_grid(1e-3, 1.0, 7);
    ScanResult res = scan_field_scale(30, 4.0, grid);
    REQUIRE(res.grid.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(res.grid[i].lambda_scale == doctest::Approx(grid[i]).epsilon(1e-12));
        CHECK(res.grid[i].f_max >= 0.0);
        CHECK(res.grid[i].f_max <= 1.0 + 1e-12);
    }
    CHECK(res.f_max > 0.5);
    CHECK(res.t_peak > 0.0);
    CHECK(res.period_estimate > 0.0);
    CHECK(res.best_lambda >= grid.front());
    CHECK(res.best_lambda <= grid.back());
    // refined optimum at least as good as every raw grid point
    for (const ScanPoint& p : res.grid) CHECK(res.f_max >= p.f_max - 1e-12);

    CHECK_THROWS_AS(scan_field_scale(30, 4.0, {}), DomainError);
}

TEST_CASE("scan period estimate agrees with the harmonic period at lambda = 1") {
    // single-point grid pins lambda_scale = 1, the analytic regime
    ScanResult res = scan_field_scale(10, 10.0, {1.0});
    double alpha2 = 4.0 * std::numbers::ln2 / 100.0;
    double T = 2.0 * std::numbers::pi / alpha2;
    CHECK(std::abs(res.period_estimate - T) / T < 0.05);
    CHECK(res.f_max > 0.99);
}
