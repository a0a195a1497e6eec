#pragma once
#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spinbus/models.hpp"

namespace spinbus {

inline constexpr int kDenseSolveCap = 4096;

struct EigenSystem {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns, orthonormal
};

// Full dense decomposition; CapacityError above cap.
EigenSystem dense_spectrum(const HamiltonianMatrix& H, int cap = kDenseSolveCap);

// m lowest eigenpairs by Lanczos with full reorthogonalization and sequential
// deflation (exact degeneracies come out as repeated converged pairs).
// residuals[i] = ||H v_i - e_i v_i||. ConvergenceError if tolerance is not
// reached within the iteration cap.
struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd residuals;
};
EigenPairs lowest_eigenpairs(const HamiltonianMatrix& H, int count, double tol = 1e-10);

enum class SpmcVerdict { holds, fails, not_applicable };

struct SpectrumReport {
    Eigen::VectorXd eigenvalues;          // ascending
    std::vector<int> parities;            // +1 / -1 per eigenstate
    std::optional<double> E0;             // inferred base quantum
    std::optional<std::vector<long>> labels; // N_n, when E0 is present
    SpmcVerdict verdict = SpmcVerdict::fails;
    double parity_residual = 0.0;         // max ||P v - p v||
    double commensuration_residual = 0.0; // max |e_n - e_min - N_n E0|
};

const char* to_string(SpmcVerdict v);

// Approximate GCD of the consecutive spectral gaps, to absolute tolerance tol.
// Returns 0 when no base quantum clearly above tol (> 4 tol) exists;
// incommensurate spectra would otherwise yield spurious divisors of order tol.
double infer_base_quantum(const Eigen::VectorXd& eigenvalues, double tol);

// Parity classification against the mirror permutation, E0 inference and
// SPMC certification. [H,P] != 0 gives verdict not_applicable (no throw).
SpectrumReport analyze_spectrum(const HamiltonianMatrix& H,
                                const std::vector<std::size_t>& mirror);

// || e^{i pi e_min/E0} exp(-iH pi/E0) -+ P ||_2 minimized over the sign;
// the analytic global phase removes the eigenvalue-offset freedom.
double evolution_is_mirror(const HamiltonianMatrix& H, double E0,
                           const std::vector<std::size_t>& mirror);

} // namespace spinbus
