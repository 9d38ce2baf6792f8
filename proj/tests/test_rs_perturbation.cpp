#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kerr4ls/model.hpp"
#include "kerr4ls/oracle.hpp"
#include "kerr4ls/rs_perturbation.hpp"
#include "test_support.hpp"

using namespace kerr4ls;
using kerr4ls::testing::params_from_rabi;
using kerr4ls::testing::random_valid_params;
using kerr4ls::testing::reference_params;

TEST_CASE("second-order energies, symmetric reference point") {
    // omega_a = omega_b = 1, delta_1 = 0, delta_3 = 1. Frozen from the
    // independent sum over dressed matrix elements:
    //   e2[1] = (1/2)/(0 - 1)              = -0.5
    //   e2[2] = (1/4)/(lambda_m - 1)       = -0.14644660940672624
    //   e2[3] = (1/4)/(lambda_p - 1)       = -0.853553390593274
    //   e2[4] = -(e2[1] + e2[2] + e2[3])   = +1.5
    const SystemParams p = params_from_rabi(1, 1, 0.1, 0.0, 1.0);
    const PerturbationSplit split = make_split(p);
    const PerturbationResult pt = second_order_energies(split);

    CHECK(pt.e2[0] == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(pt.e2[1] == doctest::Approx(-0.14644660940672624).epsilon(1e-13));
    CHECK(pt.e2[2] == doctest::Approx(-0.853553390593274).epsilon(1e-13));
    CHECK(pt.e2[3] == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(std::abs(pt.e2[0] + pt.e2[1] + pt.e2[2] + pt.e2[3]) < 1e-12);
}

TEST_CASE("zero perturbation leaves energies at e0") {
    const SystemParams p = params_from_rabi(0.7, 1.3, 0.0, 0.4, 3.0);
    const PerturbationSplit split = make_split(p);
    CHECK(split.epsilon == 0.0);
    const PerturbationResult pt = second_order_energies(split);
    for (int n = 1; n <= 4; ++n)
        CHECK(perturbed_energy(pt, n, split.epsilon) == pt.e0[n - 1]);
}

TEST_CASE("dark-state correction matches the printed closed form") {
    std::mt19937 rng(47);
    for (int i = 0; i < 200; ++i) {
        const SystemParams p = random_valid_params(rng);
        const RabiSet r = rabi_from_params(p);
        const Detunings d = detunings_from_params(p);
        const PerturbationResult pt = second_order_energies(make_split(p));
        const double oa2 = std::norm(r.omega_a);
        const double ob2 = std::norm(r.omega_b);
        const double expected = -oa2 / (d.delta_3 * (oa2 + ob2));
        CHECK(pt.e2[0] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("first-order silence, intermediate normalization, sum rule") {
    std::mt19937 rng(53);
    for (int i = 0; i < 300; ++i) {
        const PerturbationResult pt =
            second_order_energies(make_split(random_valid_params(rng)));
        for (int n = 0; n < 4; ++n) {
            CHECK(std::abs(pt.e1[n]) < 1e-14);
            CHECK(pt.state1(n, n) == cplx(0.0));
        }
        CHECK(std::abs(pt.e2[0] + pt.e2[1] + pt.e2[2] + pt.e2[3]) < 1e-12);
    }
}

TEST_CASE("closed forms: flags expose the factor-2 misprints") {
    // Eqs for states 1 and 4 agree with the generic engine; the printed
    // forms for states 2 and 3 do not (wrong denominator structure), which
    // the sum rule makes visible.
    const SystemParams p = params_from_rabi(1, 1, 0.1, 0.0, 1.0);
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const LambdaConstants c = lambda_constants(r, d);
    const ClosedFormCorrections cf = closed_form_corrections(c, r, d);

    CHECK(cf.values[0] == doctest::Approx(-0.5).epsilon(1e-13));
    CHECK(cf.values[1] == doctest::Approx(-0.07322330470336312).epsilon(1e-13));
    CHECK(cf.values[3] == doctest::Approx(1.5).epsilon(1e-13));

    CHECK(cf.consistent[0]);
    CHECK_FALSE(cf.consistent[1]);
    CHECK_FALSE(cf.consistent[2]);
    CHECK(cf.consistent[3]);
}

TEST_CASE("closed forms: detuned dark-state value") {
    const SystemParams p = reference_params();
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const LambdaConstants c = lambda_constants(r, d);
    const ClosedFormCorrections cf = closed_form_corrections(c, r, d);
    CHECK(cf.values[0] ==
          doctest::Approx(-0.0019801980198019802).epsilon(1e-13));
}

TEST_CASE("closed-form flags are stable across random draws") {
    std::mt19937 rng(59);
    for (int i = 0; i < 100; ++i) {
        const SystemParams p = random_valid_params(rng);
        const RabiSet r = rabi_from_params(p);
        const Detunings d = detunings_from_params(p);
        const LambdaConstants c = lambda_constants(r, d);
        const ClosedFormCorrections cf = closed_form_corrections(c, r, d);
        CHECK(cf.consistent[0]);
        CHECK(cf.consistent[3]);
        CHECK_FALSE(cf.consistent[1]);
        CHECK_FALSE(cf.consistent[2]);
    }
}

TEST_CASE("perturbed energy assembly at the reference point") {
    const SystemParams p = reference_params(); // |omega_c| = 0.1, eps = 0.05
    const PerturbationSplit split = make_split(p);
    const PerturbationResult pt = second_order_energies(split);
    CHECK(split.epsilon == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(perturbed_energy(pt, 1, split.epsilon) ==
          doctest::Approx(-4.950495049504951e-06).epsilon(1e-12));
    CHECK(perturbed_energy(pt, 4, split.epsilon) ==
          doctest::Approx(5.0 + split.epsilon * split.epsilon * pt.e2[3])
              .epsilon(1e-14));
}

TEST_CASE("perturbed dark state reproduces the first-order |4> amplitude") {
    const SystemParams p = reference_params();
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const LambdaConstants c = lambda_constants(r, d);
    const PerturbationSplit split = make_split(p);
    const PerturbationResult pt = second_order_energies(split);

    const cplx omega_c_eff =
        std::abs(r.omega_c) * std::exp(cplx(0.0, perturbation_phase(r, p.phi)));
    const cplx expected =
        r.omega_a * omega_c_eff / (2.0 * d.delta_3 * c.g_norm);
    const cplx actual = split.epsilon * pt.state1(3, 0);
    CHECK(std::abs(actual - expected) < 1e-10 * std::abs(expected));
}

TEST_CASE("omega_a = 0 leaves the dark state unperturbed") {
    const SystemParams p = params_from_rabi(0, 2.0, 0.5, 0.3, 4.0);
    const PerturbationSplit split = make_split(p);
    const PerturbationResult pt = second_order_energies(split);
    const DressedState ds = perturbed_state(pt, split.basis, 1, split.epsilon);
    CHECK(std::abs(ds.amplitudes(0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(ds.amplitudes(1)) < 1e-15);
    CHECK(std::abs(ds.amplitudes(2)) < 1e-15);
    CHECK(std::abs(ds.amplitudes(3)) < 1e-15);
}

TEST_CASE("perturbed states track oracle eigenvectors as eps shrinks") {
    const SystemParams base = reference_params();
    const PerturbationSplit split = make_split(base);
    const PerturbationResult pt = second_order_energies(split);

    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
        const Matrix4cd h = split.h0 + eps * split.v;
        const EigenDecomposition exact = eigh<4>(h);
        for (int n = 1; n <= 4; ++n) {
            const DressedState approx = perturbed_state(pt, split.basis, n, eps);
            double best = 0.0;
            for (int k = 0; k < 4; ++k)
                best = std::max(
                    best, std::abs(approx.amplitudes.dot(exact.vectors.col(k))));
            CHECK(best > 1.0 - 50.0 * eps * eps);
        }
    }
}

TEST_CASE("ac-Stark consistency of the dark-state shift") {
    std::mt19937 rng(61);
    for (int i = 0; i < 200; ++i) {
        const SystemParams p = random_valid_params(rng);
        const RabiSet r = rabi_from_params(p);
        const Detunings d = detunings_from_params(p);
        const PerturbationSplit split = make_split(p);
        const PerturbationResult pt = second_order_energies(split);

        const double g2 = std::norm(r.omega_a) + std::norm(r.omega_b);
        const double oc2 = std::norm(r.omega_c);
        const double stark =
            (std::norm(r.omega_a) / g2) * (-oc2 / (4.0 * d.delta_3));
        const double pt2 = split.epsilon * split.epsilon * pt.e2[0];
        CHECK(stark == doctest::Approx(pt2).epsilon(1e-12));
    }
}

TEST_CASE("oracle residual ratio: third order generally, fourth for dark") {
    const SystemParams p = reference_params();
    const PerturbationSplit split = make_split(p);
    const PerturbationResult pt = second_order_energies(split);

    const double eps0 = 5e-2;
    std::array<std::array<double, 3>, 4> res;
    for (int k = 0; k < 3; ++k) {
        const double eps = eps0 / (1 << k);
        const EigenDecomposition exact = eigh<4>(split.h0 + eps * split.v);
        const OverlapPairing pairing = match_by_overlap(split.basis, exact);
        for (int n = 0; n < 4; ++n)
            res[n][k] = std::abs(exact.values(pairing.exact_index[n]) -
                                 pt.e0[n] - eps * eps * pt.e2[n]);
    }
    for (int n = 0; n < 4; ++n)
        for (int k = 0; k < 2; ++k)
            CHECK(res[n][k] / res[n][k + 1] >= 7.5);
    for (int k = 0; k < 2; ++k)
        CHECK(res[0][k] / res[0][k + 1] >= 12.0);
}

TEST_CASE("small denominators raise a physics error") {
    const SystemParams p = params_from_rabi(1, 1, 0.1, 0.0, 1e-12);
    CHECK_THROWS_AS(make_split(p), physics_error);

    // bypass the basis guard to exercise the engine's own check
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const Hamiltonian4 ham = build_hamiltonian(p);
    const PerturbationSplit split{ham.h0, ham.v, ham.epsilon,
                                  dressed_basis(r, d, 0.0)};
    CHECK_THROWS_WITH_AS(second_order_energies(split),
                         doctest::Contains("small-denominator"), physics_error);
}
