#pragma once
#include <Eigen/Dense>
#include <vector>

#include "spinbus/models.hpp"
#include "spinbus/spectral.hpp"

namespace spinbus {

// Gaussian packet of width Delta (FWHM sites) centered N_A sites off the
// middle of a 2N+1 chain. alpha2 = 4 ln2 / Delta^2; B0 = 8 (ln2/Delta^2)^2 *
// lambda_scale.
struct WavepacketSpec {
    int n_sites = 0; // odd, 2N+1
    int N_A = 0;     // signed offset from the center site
    double Delta = 1.0;
    double lambda_scale = 1.0;

    int half_width() const { return (n_sites - 1) / 2; }
    double alpha2() const { return 4.0 * std::numbers::ln2 / (Delta * Delta); }
    double B0() const {
        double c = std::numbers::ln2 / (Delta * Delta);
        return 8.0 * c * c * lambda_scale;
    }
    void validate() const;
};

struct FidelityTrace {
    std::vector<double> times;
    std::vector<double> values;
    std::string params; // provenance tag
};

// exp(-iHt) psi0 through a precomputed eigendecomposition.
Eigen::VectorXcd evolve_state(const EigenSystem& eig, const Eigen::VectorXcd& psi0,
                              double t);

// F(t) = |<target| exp(-iHt) |source>| for 1-based sites on a
// single-excitation chain.
FidelityTrace transfer_fidelity(const HamiltonianMatrix& H, int source, int target,
                                const std::vector<double>& times);

// Normalized packet amplitudes ~ exp(-alpha2 (i - center)^2 / 2).
Eigen::VectorXd gaussian_packet(const WavepacketSpec& spec);

// Mirror image of a packet (site reflection), used as the transfer target.
Eigen::VectorXd mirror_packet(const Eigen::VectorXd& packet);

// Closed form F(t) = exp[-alpha2 N_A^2 (1 + cos(omega t)) / 2] with the
// harmonic frequency omega = alpha2 * sqrt(lambda_scale * J) of the parabolic
// trap; the default omega = alpha2 is the lambda_scale = J = 1 regime.
// Maximum 1 at t = pi/omega, period 2 pi / omega.
double analytic_packet_fidelity(double t, double alpha2, int N_A, double omega = 0.0);

// Fidelity of the evolved packet against its mirror image at N_B = -N_A.
FidelityTrace packet_transfer_trace(const HamiltonianMatrix& H,
                                    const WavepacketSpec& spec,
                                    const std::vector<double>& times);

struct ScanPoint {
    double lambda_scale = 0.0;
    double f_max = 0.0;
    double t_peak = 0.0;
};

struct ScanResult {
    double best_lambda = 0.0;     // golden-section refined
    double f_max = 0.0;
    double t_peak = 0.0;
    double period_estimate = 0.0; // peak-to-peak spacing at the optimum
    std::vector<ScanPoint> grid;
};

// Peak transfer fidelity over a lambda_scale grid at transfer distance L and
// width Delta (chain padded beyond +-L/2), with golden-section refinement
// (1e-3 relative) around the grid argmax. horizon <= 0 means auto
// (1.6 periods per grid point). threads > 1 parallelizes grid points.
ScanResult scan_field_scale(int L, double Delta, const std::vector<double>& grid,
                            double horizon = 0.0, int threads = 1);

// Convenience: log-spaced grid for scans.
std::vector<double> log_grid(double lo, double hi, int n);

} // namespace spinbus
