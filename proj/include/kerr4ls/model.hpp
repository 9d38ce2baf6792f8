#ifndef KERR4LS_MODEL_HPP
#define KERR4LS_MODEL_HPP

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

#include "kerr4ls/errors.hpp"

namespace kerr4ls {

using cplx = std::complex<double>;
using Eigen::Matrix4cd;
using Eigen::Vector4cd;

/// Physical inputs of the four-level N-scheme, hbar = 1 throughout.
/// g_x are the (complex) atom-field couplings, n_x the photon numbers when
/// the atom is in state |1>, delta_x the single-photon detunings and phi the
/// phase of the perturbing coupling.
struct SystemParams {
    cplx g_a{};
    cplx g_b{};
    cplx g_c{};
    int n_a = 1;
    int n_b = 0;
    int n_c = 1;
    double delta_a = 0.0;
    double delta_b = 0.0;
    double delta_c = 0.0;
    double phi = 0.0;
};

struct RabiSet {
    cplx omega_a;
    cplx omega_b;
    cplx omega_c;
};

struct Detunings {
    double delta_1;
    double delta_2; // identically zero under Raman resonance
    double delta_3;
};

/// Total Hamiltonian h and its split h = h0 + epsilon * v, where v is the
/// normalized perturbation direction (unit-modulus entries at (3,4)/(4,3))
/// and epsilon = |omega_c| / 2.
struct Hamiltonian4 {
    Matrix4cd h;
    Matrix4cd h0;
    Matrix4cd v;
    double epsilon;
};

inline void validate_params(const SystemParams& p) {
    if (p.n_a < 0 || p.n_b < 0 || p.n_c < 0)
        throw physics_error("photon numbers must be non-negative");
    if (p.n_a == 0 || p.n_c == 0)
        throw physics_error(
            "degenerate subspace: n_a and n_c must be >= 1 for the "
            "four-dimensional invariant subspace to exist");
    if (p.delta_b != p.delta_a)
        throw physics_error(
            "Raman resonance violated: delta_b must equal delta_a exactly "
            "(delta_2 = 0 required)");
}

inline RabiSet rabi_from_params(const SystemParams& p) {
    validate_params(p);
    return RabiSet{
        2.0 * p.g_a * std::sqrt(static_cast<double>(p.n_a)),
        2.0 * p.g_b * std::sqrt(static_cast<double>(p.n_b + 1)),
        2.0 * p.g_c * std::sqrt(static_cast<double>(p.n_c)),
    };
}

inline Detunings detunings_from_params(const SystemParams& p) {
    if (p.delta_b != p.delta_a)
        throw physics_error(
            "Raman resonance violated: delta_b must equal delta_a exactly "
            "(delta_2 = 0 required)");
    return Detunings{p.delta_a, 0.0, p.delta_c - p.delta_b + p.delta_a};
}

/// Phase used for the perturbation matrix v: the intrinsic phase of omega_c
/// folded together with the extra phase phi, so epsilon stays real >= 0.
inline double perturbation_phase(const RabiSet& r, double phi) {
    return phi + std::arg(r.omega_c);
}

inline Hamiltonian4 build_hamiltonian(const SystemParams& p) {
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);

    Hamiltonian4 out;
    out.h0.setZero();
    out.h0(0, 1) = std::conj(r.omega_a) / 2.0;
    out.h0(1, 0) = r.omega_a / 2.0;
    out.h0(1, 1) = d.delta_1;
    out.h0(1, 2) = r.omega_b / 2.0;
    out.h0(2, 1) = std::conj(r.omega_b) / 2.0;
    out.h0(3, 3) = d.delta_3;

    const double phase = perturbation_phase(r, p.phi);
    out.v.setZero();
    out.v(2, 3) = std::exp(cplx(0.0, -phase));
    out.v(3, 2) = std::exp(cplx(0.0, +phase));

    out.epsilon = std::abs(r.omega_c) / 2.0;
    out.h = out.h0 + out.epsilon * out.v;
    return out;
}

} // namespace kerr4ls

#endif
