#ifndef KERR4LS_TLS_EFFECTIVE_HPP
#define KERR4LS_TLS_EFFECTIVE_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "kerr4ls/lambda_spectrum.hpp"
#include "kerr4ls/model.hpp"

namespace kerr4ls {

using Eigen::Matrix2cd;

/// Pseudo-two-level reduction of {dark state, |4>} with composite field
/// omega_eff = -omega_a * omega_c / G. The omega_c entering here carries the
/// same folded phase as the perturbation matrix v.
struct TlsModel {
    cplx omega_eff;
    double delta_3;
};

inline TlsModel make_tls(const RabiSet& r, const Detunings& d, double phi = 0.0) {
    const LambdaConstants c = lambda_constants(r, d);
    const cplx omega_c_eff =
        std::abs(r.omega_c) * std::exp(cplx(0.0, perturbation_phase(r, phi)));
    return TlsModel{-r.omega_a * omega_c_eff / c.g_norm, d.delta_3};
}

inline Matrix2cd tls_hamiltonian(const TlsModel& m) {
    Matrix2cd h;
    h << 0.0, std::conj(m.omega_eff) / 2.0, m.omega_eff / 2.0, m.delta_3;
    return h;
}

/// Eigenvalue of the two-level Hamiltonian on the branch continuously
/// connected to E = 0 at omega_eff = 0. For delta_3 > 0 this is the lower
/// eigenvalue; for delta_3 < 0 continuity selects the upper branch; at
/// delta_3 = 0 the symmetric splitting gives -|omega|/2.
inline double tls_ground_energy(const TlsModel& m) {
    const double w = std::abs(m.omega_eff);
    if (m.delta_3 == 0.0) return -0.5 * w;
    const double sgn = m.delta_3 > 0.0 ? 1.0 : -1.0;
    const double ad = std::abs(m.delta_3);
    // cancellation-free form of (delta_3 - sgn*sqrt(delta_3^2 + w^2)) / 2
    return -sgn * w * w / (2.0 * (ad + std::sqrt(ad * ad + w * w)));
}

} // namespace kerr4ls

#endif
