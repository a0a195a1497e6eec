#pragma once
#include <Eigen/Dense>
#include <vector>

#include "spinbus/models.hpp"

namespace spinbus {

struct EffectiveCouplingReport {
    LadderSpec spec;
    double j_eff = 0.0;        // signed effective exchange
    double epsilon = 0.0;      // second-order energy shift (perturbative only)
    double gap = 0.0;          // |J_eff| when method == exact_gap
    double ground_spin = 0.0;  // total spin of the ground state
    bool degenerate_ground = false;
    std::vector<double> cluster_energies; // lowest levels (exact_gap path)
    std::string method;        // "perturbative" | "exact_gap"
};

// Second-order J_eff and shift from the bare-ladder eigenbasis:
// J_eff = sum_a J0^2 [L(a)R(a) + R(a)L(a)] / (E_g - E_a),
// eps   = sum_a (3/4) J0^2 [L(a)^2 + R(a)^2] / (E_g - E_a),
// K(a) = <psi_g| S_K^z |psi_a> over the S^z = 0 sector of the ladder alone.
EffectiveCouplingReport perturbative_jeff(const LadderSpec& spec);

// Singlet-triplet gap of the full ladder+qubits system in the S^z = 0 sector;
// sign of j_eff from the ground cluster's total spin (spin 0 -> AFM, +gap).
EffectiveCouplingReport exact_spin_gap(const LadderSpec& spec);

struct GroundSpinReport {
    double spin = 0.0;
    bool ambiguous = false; // degenerate ground cluster of mixed spin
};

// Total spin s of the ground state from <S^2> = s(s+1) over all 2N+2 spins.
GroundSpinReport lieb_ground_spin(const LadderSpec& spec);

// <S^2> of a normalized state over all sites of the basis, and the spin s.
double total_spin2_expectation(const Eigen::VectorXd& psi, const SectorBasis& basis);
double spin_from_s2(double s2);

struct ReducedStateReport {
    double c00 = 0.0; // |c_00|^2 = <1/4 - S_A.S_B>
    double c10 = 0.0; // by completeness
    double c11 = 0.0; // |c_11|^2 = |c_1-1|^2 = <1/4 + S_A^z S_B^z>
    std::string source_label;
};

// Two-qubit reduced coefficients of a normalized S^z = 0 state; A, B default
// to the last two sites (the ladder layout convention).
ReducedStateReport reduced_coefficients(const Eigen::VectorXd& psi,
                                        const SectorBasis& basis, int site_a = -1,
                                        int site_b = -1);

struct ScalingRow {
    int L = 0;
    double J = 0.0, J0 = 0.0;
    double gap = 0.0;
    double jeff_perturbative = 0.0;
};

struct ScalingFit {
    double exponent = 0.0;  // slope of log(gap) vs log(L)
    double prefactor = 0.0; // exp(intercept)
    double r_squared = 0.0;
    std::vector<ScalingRow> rows;
};

// Least-squares power-law fit of the exact gap over L = N+1 values.
// DomainError with fewer than 3 points.
ScalingFit jeff_scaling_fit(const std::vector<int>& L_values, double J, double J0,
                            Connection connection = Connection::type_a);

} // namespace spinbus
