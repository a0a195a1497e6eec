#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <set>
#include <vector>

#include "spinbus/ladder_effective.hpp"
#include "spinbus/models.hpp"
#include "spinbus/sector_basis.hpp"
#include "spinbus/spectral.hpp"

using namespace spinbus;

TEST_CASE("plaquette perturbative couplings match the closed forms") {
    double J = 1.0, J0 = 1.0;
    EffectiveCouplingReport adj = perturbative_jeff(LadderSpec{2, J, J0, Connection::type_a});
    CHECK(adj.j_eff == doctest::Approx(J0 * J0 / (3.0 * J)).epsilon(1e-10));
    CHECK(adj.method == "perturbative");

    EffectiveCouplingReport diag = perturbative_jeff(LadderSpec{2, J, J0, Connection::type_b});
    CHECK(diag.j_eff == doctest::Approx(-J0 * J0 / (4.0 * J)).epsilon(1e-10));

    // J0^2 / J parameter scaling of the closed forms
    EffectiveCouplingReport scaled = perturbative_jeff(LadderSpec{2, 5.0, 0.3, Connection::type_a});
    CHECK(scaled.j_eff == doctest::Approx(0.09 / 15.0).epsilon(1e-10));
}

TEST_CASE("perturbative report with J0 = 0 is identically zero") {
    EffectiveCouplingReport rep = perturbative_jeff(LadderSpec{3, 1.0, 0.0, Connection::type_a});
    CHECK(rep.j_eff == 0.0);
    CHECK(rep.epsilon == 0.0);
}

TEST_CASE("perturbative capacity cap") {
    // 8 rungs = 16 ladder sites > 14-site dense-diagonalization cap
    CHECK_THROWS_AS(perturbative_jeff(LadderSpec{8, 1.0, 0.1, Connection::type_a}), CapacityError);
    CHECK_THROWS_AS(perturbative_jeff(LadderSpec{0, 1.0, 0.1, Connection::type_a}), DomainError);
}

TEST_CASE("exact gap agrees with perturbation theory deep in the J0 << J regime") {
    double J = 40.0, J0 = 1.0;
    EffectiveCouplingReport pert = perturbative_jeff(LadderSpec{2, J, J0, Connection::type_b});
    EffectiveCouplingReport exact = exact_spin_gap(LadderSpec{2, J, J0, Connection::type_b});
    CHECK(exact.method == "exact_gap");
    CHECK(exact.gap > 0.0);
    CHECK(std::abs(exact.gap - std::abs(pert.j_eff)) / std::abs(pert.j_eff) < 0.15);
    // diagonal attachment is ferromagnetic: triplet ground state, negative j_eff
    CHECK(exact.ground_spin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(exact.j_eff < 0.0);

    EffectiveCouplingReport exact_a = exact_spin_gap(LadderSpec{2, J, J0, Connection::type_a});
    CHECK(exact_a.ground_spin == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(exact_a.j_eff > 0.0); // singlet ground -> antiferromagnetic
}

TEST_CASE("exact gap with decoupled qubits reports a degenerate ground cluster") {
    EffectiveCouplingReport rep = exact_spin_gap(LadderSpec{2, 1.0, 0.0, Connection::type_a});
    CHECK(rep.degenerate_ground);
    CHECK(rep.gap < 1e-10); // splitting within the degenerate multiplet
    CHECK(rep.j_eff == 0.0);
    REQUIRE(rep.cluster_energies.size() >= 2);
    CHECK(std::abs(rep.cluster_energies[1] - rep.cluster_energies[0]) < 1e-10);
}

TEST_CASE("exact solver capacity cap") {
    CHECK_THROWS_AS(exact_spin_gap(LadderSpec{9, 1.0, 0.1, Connection::type_a}), CapacityError);
}

TEST_CASE("bare ladder is gapped by about half the exchange") {
    // distinct-level gap of the ladder+decoupled-qubits S^z = 0 sector equals
    // the bare ladder singlet-triplet gap; expected > 0.3 J for short ladders
    for (int n_rungs = 2; n_rungs <= 5; ++n_rungs) {
        LadderSpec spec{n_rungs, 1.0, 0.0, Connection::type_a};
        auto sector = std::make_shared<SectorBasis>(
            enumerate_sector(spec.n_sites(), spec.n_sites() / 2));
        HamiltonianMatrix H = heisenberg_ladder_hamiltonian(spec, sector);
        EigenSystem eig = dense_spectrum(H);
        double e0 = eig.values[0];
        double gap = 0.0;
        for (int i = 1; i < eig.values.size(); ++i)
            if (eig.values[i] - e0 > 1e-8) {
                gap = eig.values[i] - e0;
                break;
            }
        CHECK(gap > 0.3);
    }
}

TEST_CASE("Lieb parity rule across connections and rung counts") {
    double J = 1.0, J0 = 0.6;
    GroundSpinReport a2 = lieb_ground_spin(LadderSpec{2, J, J0, Connection::type_a});
    CHECK_FALSE(a2.ambiguous);
    CHECK(a2.spin == doctest::Approx(0.0).epsilon(1e-6));

    GroundSpinReport a3 = lieb_ground_spin(LadderSpec{3, J, J0, Connection::type_a});
    CHECK(a3.spin == doctest::Approx(1.0).epsilon(1e-6));

    GroundSpinReport b2 = lieb_ground_spin(LadderSpec{2, J, J0, Connection::type_b});
    CHECK(b2.spin == doctest::Approx(1.0).epsilon(1e-6));

    GroundSpinReport b3 = lieb_ground_spin(LadderSpec{3, J, J0, Connection::type_b});
    CHECK(b3.spin == doctest::Approx(0.0).epsilon(1e-6));

    CHECK_THROWS_AS(lieb_ground_spin(LadderSpec{2, J, 0.0, Connection::type_a}), DomainError);
}

TEST_CASE("total spin measurement on explicit states") {
    CHECK(spin_from_s2(0.0) == doctest::Approx(0.0));
    CHECK(spin_from_s2(0.75) == doctest::Approx(0.5));
    CHECK(spin_from_s2(2.0) == doctest::Approx(1.0));

    // singlet pair in a 2-site sector: <S^2> = 0
    SectorBasis b2 = enumerate_sector(2, 1);
    Eigen::VectorXd singlet(2);
    double r = 1.0 / std::sqrt(2.0);
    singlet[int(b2.index_of(0b01))] = r;
    singlet[int(b2.index_of(0b10))] = -r;
    CHECK(total_spin2_expectation(singlet, b2) == doctest::Approx(0.0).epsilon(1e-12));

    // triplet m = 0 state: <S^2> = 2
    Eigen::VectorXd triplet(2);
    triplet[int(b2.index_of(0b01))] = r;
    triplet[int(b2.index_of(0b10))] = r;
    CHECK(total_spin2_expectation(triplet, b2) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("reduced coefficients of factorized states") {
    // sites 0,1 carry a spectator singlet; sites 2,3 are the A,B qubits
    SectorBasis basis = enumerate_sector(4, 2);
    auto put = [&](Eigen::VectorXd& v, std::uint64_t bits, double amp) {
        v[int(basis.index_of(bits))] += amp;
    };
    double r = 1.0 / std::sqrt(2.0);

    SUBCASE("AB singlet gives c00 = 1") {
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(int(basis.size()));
        // (|01>-|10>)_{01} x (|01>-|10>)_{23} / 2, bit l = site l
        put(psi, 0b0101, 0.5);  // site0 up, site2 up
        put(psi, 0b1001, -0.5); // site0 up, site3 up
        put(psi, 0b0110, -0.5);
        put(psi, 0b1010, 0.5);
        ReducedStateReport rep = reduced_coefficients(psi, basis, 2, 3);
        CHECK(rep.c00 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.c10 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(rep.c11 == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("AB triplet m=0 gives c10 = 1") {
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(int(basis.size()));
        put(psi, 0b0101, 0.5);
        put(psi, 0b1001, 0.5);
        put(psi, 0b0110, -0.5);
        put(psi, 0b1010, -0.5);
        ReducedStateReport rep = reduced_coefficients(psi, basis, 2, 3);
        CHECK(rep.c10 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.c00 == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("maximally mixed-looking product state splits by completeness") {
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(int(basis.size()));
        put(psi, 0b0101, r); // AB = |up A, down B> branch
        put(psi, 0b0110, r);
        ReducedStateReport rep = reduced_coefficients(psi, basis, 2, 3);
        CHECK(2.0 * rep.c11 + rep.c00 + rep.c10 == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("reduced coefficients require the S^z = 0 sector") {
    SectorBasis wrong = enumerate_sector(4, 3);
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(int(wrong.size()));
    psi[0] = 1.0;
    CHECK_THROWS_AS(reduced_coefficients(psi, wrong, 2, 3), DomainError);
}

TEST_CASE("ladder eigenstates factor into near-ideal qubit states") {
    // Singlet-ground connection for each length: 3 rungs -> type_b,
    // 4 rungs -> type_a (Lieb rule), J/J0 = 20.
    struct Case {
        int n_rungs;
        Connection conn;
    };
    for (Case c : {Case{3, Connection::type_b}, Case{4, Connection::type_a}}) {
        LadderSpec spec{c.n_rungs, 20.0, 1.0, c.conn};
        auto sector = std::make_shared<SectorBasis>(
            enumerate_sector(spec.n_sites(), spec.n_sites() / 2));
        HamiltonianMatrix H = heisenberg_ladder_hamiltonian(spec, sector);
        EigenSystem eig = dense_spectrum(H);

        ReducedStateReport ground = reduced_coefficients(eig.vectors.col(0), *sector);
        CHECK(ground.c00 > 0.9);

        // first state past the ground cluster
        int idx = 1;
        while (idx < eig.values.size() && eig.values[idx] - eig.values[0] < 1e-9) ++idx;
        REQUIRE(idx < eig.values.size());
        ReducedStateReport excited = reduced_coefficients(eig.vectors.col(idx), *sector);
        CHECK(excited.c10 > 0.9);

        CHECK(2.0 * ground.c11 + ground.c00 + ground.c10 == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("scaling fit needs at least three lengths") {
    CHECK_THROWS_AS(jeff_scaling_fit({4, 5}, 20.0, 1.0), DomainError);
}

TEST_CASE("gap scales as the square of the qubit coupling") {
    double J = 40.0;
    EffectiveCouplingReport g1 = exact_spin_gap(LadderSpec{2, J, 1.0, Connection::type_a});
    EffectiveCouplingReport g05 = exact_spin_gap(LadderSpec{2, J, 0.5, Connection::type_a});
    CHECK(std::abs(g1.gap / g05.gap - 4.0) < 0.4); // J0^2 within 10%
}

TEST_CASE("scaling fit returns rows, fit quality and the perturbative column") {
    ScalingFit fit = jeff_scaling_fit({3, 4, 5}, 20.0, 1.0, Connection::type_a);
    REQUIRE(fit.rows.size() == 3);
    for (std::size_t i = 0; i < fit.rows.size(); ++i) {
        CHECK(fit.rows[i].L == 3 + int(i));
        CHECK(fit.rows[i].gap > 0.0);
        CHECK(fit.rows[i].jeff_perturbative != 0.0);
        CHECK(std::abs(fit.rows[i].gap - std::abs(fit.rows[i].jeff_perturbative)) /
                  std::abs(fit.rows[i].jeff_perturbative) <
              0.15);
    }
    // gaps shrink with length; fitted exponent is negative with a solid fit
    CHECK(fit.rows[1].gap < fit.rows[0].gap);
    CHECK(fit.rows[2].gap < fit.rows[1].gap);
    CHECK(fit.exponent < 0.0);
    CHECK(fit.prefactor > 0.0);
    CHECK(fit.r_squared > 0.95);
}
