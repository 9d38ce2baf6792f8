#ifndef KERR4LS_RS_PERTURBATION_HPP
#define KERR4LS_RS_PERTURBATION_HPP

#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "kerr4ls/errors.hpp"
#include "kerr4ls/lambda_spectrum.hpp"
#include "kerr4ls/model.hpp"

namespace kerr4ls {

/// H = h0 + epsilon * v together with the analytic eigenbasis of h0.
struct PerturbationSplit {
    Matrix4cd h0;
    Matrix4cd v;
    double epsilon;
    std::array<DressedState, 4> basis;
};

/// Energy corrections up to second order and first-order state-expansion
/// coefficients. e0/e1/e2 are the coefficients of epsilon^0/1/2; state1(s, n)
/// holds a^{s(1)}_n, the component of the first-order correction of state n
/// along unperturbed state s (intermediate normalization: diagonal zero).
struct PerturbationResult {
    std::array<double, 4> e0;
    std::array<double, 4> e1;
    std::array<double, 4> e2;
    Matrix4cd state1;
};

/// Paper closed forms for the second-order corrections, each compared
/// against the generic engine at the given relative tolerance.
struct ClosedFormCorrections {
    std::array<double, 4> values;
    std::array<bool, 4> consistent;
};

inline PerturbationSplit make_split(const SystemParams& p,
                                    double gap_tol_rel = kGapTolRel) {
    const Hamiltonian4 ham = build_hamiltonian(p);
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    return PerturbationSplit{ham.h0, ham.v, ham.epsilon,
                             dressed_basis(r, d, gap_tol_rel)};
}

inline PerturbationResult second_order_energies(const PerturbationSplit& split,
                                                double gap_tol_rel = kGapTolRel) {
    std::array<double, 4> e0;
    for (int n = 0; n < 4; ++n) e0[n] = split.basis[n].energy;

    if (auto pair = degenerate_pair(e0, gap_tol_rel)) {
        std::ostringstream oss;
        oss << "small-denominator: unperturbed gap between states "
            << pair->first << " and " << pair->second << " is "
            << std::abs(e0[pair->first - 1] - e0[pair->second - 1])
            << ", below tolerance";
        throw physics_error(oss.str());
    }

    Matrix4cd u;
    for (int n = 0; n < 4; ++n) u.col(n) = split.basis[n].amplitudes;
    // symmetrize so rounding cannot break the exact pairwise cancellation
    // behind the second-order trace sum rule
    Matrix4cd vd = u.adjoint() * split.v * u;
    vd = ((vd + vd.adjoint()) / 2.0).eval();

    PerturbationResult out;
    out.e0 = e0;
    out.state1.setZero();
    for (int n = 0; n < 4; ++n) {
        out.e1[n] = vd(n, n).real();
        double sum = 0.0;
        for (int s = 0; s < 4; ++s) {
            if (s == n) continue;
            sum += std::norm(vd(s, n)) / (e0[n] - e0[s]);
            out.state1(s, n) = vd(s, n) / (e0[n] - e0[s]);
        }
        out.e2[n] = sum;
    }
    return out;
}

inline ClosedFormCorrections
closed_form_corrections(const LambdaConstants& c, const RabiSet& r,
                        const Detunings& d, double rel_tol = 1e-9) {
    const double oa2 = std::norm(r.omega_a);
    const double ob2 = std::norm(r.omega_b);
    const double g2 = c.g_norm * c.g_norm;
    const double nm2 = c.n_minus * c.n_minus;
    const double np2 = c.n_plus * c.n_plus;
    const double d3 = d.delta_3;

    ClosedFormCorrections out;
    out.values[0] = -oa2 / (d3 * (oa2 + ob2));
    out.values[1] = -ob2 / (nm2 * (-2.0 * c.lambda_minus + 2.0 * d3));
    out.values[2] = ob2 / (np2 * (2.0 * c.lambda_plus + 2.0 * d3));
    out.values[3] = (4.0 * (d.delta_1 - d3) * d3 + oa2) /
                    (d3 * (g2 + 4.0 * d3 * (d.delta_1 - d3)));

    // Engine values; the v direction is phase-free here since |v_34| = 1
    // regardless of phi, so phi = 0 is representative.
    Hamiltonian4 ham;
    ham.h0.setZero();
    ham.h0(0, 1) = std::conj(r.omega_a) / 2.0;
    ham.h0(1, 0) = r.omega_a / 2.0;
    ham.h0(1, 1) = d.delta_1;
    ham.h0(1, 2) = r.omega_b / 2.0;
    ham.h0(2, 1) = std::conj(r.omega_b) / 2.0;
    ham.h0(3, 3) = d3;
    ham.v.setZero();
    ham.v(2, 3) = 1.0;
    ham.v(3, 2) = 1.0;

    const PerturbationSplit split{ham.h0, ham.v, 0.0, dressed_basis(r, d)};
    const PerturbationResult engine = second_order_energies(split);
    for (int n = 0; n < 4; ++n) {
        const double scale =
            std::max(std::abs(engine.e2[n]), std::abs(out.values[n]));
        out.consistent[n] =
            std::abs(out.values[n] - engine.e2[n]) <= rel_tol * std::max(scale, 1e-300);
    }
    return out;
}

inline double perturbed_energy(const PerturbationResult& result, int n,
                               double epsilon) {
    return result.e0[n - 1] + epsilon * epsilon * result.e2[n - 1];
}

/// First-order perturbed state phi_n ~ phi0_n + eps * sum_s a^{s(1)}_n phi0_s,
/// renormalized. Label and energy carry the second-order perturbed values.
inline DressedState perturbed_state(const PerturbationResult& result,
                                    const std::array<DressedState, 4>& basis,
                                    int n, double epsilon) {
    Vector4cd amps = basis[n - 1].amplitudes;
    for (int s = 0; s < 4; ++s)
        amps += epsilon * result.state1(s, n - 1) * basis[s].amplitudes;
    amps.normalize();
    return DressedState{amps, perturbed_energy(result, n, epsilon), n};
}

} // namespace kerr4ls

#endif
