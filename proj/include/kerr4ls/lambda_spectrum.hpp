#ifndef KERR4LS_LAMBDA_SPECTRUM_HPP
#define KERR4LS_LAMBDA_SPECTRUM_HPP

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "kerr4ls/errors.hpp"
#include "kerr4ls/model.hpp"

namespace kerr4ls {

/// Normalization constants and eigenvalues of the Raman-resonant lambda
/// subsystem: G^2 = |omega_a|^2 + |omega_b|^2,
/// N_pm^2 = 2(G^2 + delta_1^2 pm delta_1 sqrt(delta_1^2 + G^2)),
/// lambda_pm = (delta_1 pm sqrt(delta_1^2 + G^2)) / 2.
struct LambdaConstants {
    double g_norm;
    double n_minus;
    double n_plus;
    double lambda_minus;
    double lambda_plus;
};

/// One eigenpair of H0 in the bare basis {|1>,|2>,|3>,|4>}; label follows
/// the dressed-state ordering (1 = dark state, 4 = bare |4>).
struct DressedState {
    Vector4cd amplitudes;
    double energy;
    int label;
};

inline constexpr double kGapTolRel = 1e-9;

inline LambdaConstants lambda_constants(const RabiSet& r, const Detunings& d) {
    const double g2 = std::norm(r.omega_a) + std::norm(r.omega_b);
    if (g2 == 0.0)
        throw physics_error(
            "degenerate lambda system: omega_a and omega_b both zero, "
            "dark state undefined");
    const double root = std::sqrt(d.delta_1 * d.delta_1 + g2);
    LambdaConstants c;
    c.g_norm = std::sqrt(g2);
    c.lambda_minus = 0.5 * (d.delta_1 - root);
    c.lambda_plus = 0.5 * (d.delta_1 + root);
    c.n_minus = std::sqrt(2.0 * (g2 + d.delta_1 * d.delta_1 - d.delta_1 * root));
    c.n_plus = std::sqrt(2.0 * (g2 + d.delta_1 * d.delta_1 + d.delta_1 * root));
    return c;
}

/// Unperturbed energies in label order {0, lambda_-, lambda_+, delta_3}.
inline std::array<double, 4> unperturbed_energies(const LambdaConstants& c,
                                                  const Detunings& d) {
    return {0.0, c.lambda_minus, c.lambda_plus, d.delta_3};
}

/// Smallest-gap check for nondegenerate perturbation theory. Returns the
/// colliding (label, label) pair when some gap falls below
/// gap_tol_rel * max(1, spectral spread), or nullopt when all gaps pass.
inline std::optional<std::pair<int, int>>
degenerate_pair(const std::array<double, 4>& e, double gap_tol_rel = kGapTolRel) {
    double lo = e[0], hi = e[0];
    for (double x : e) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double tol = gap_tol_rel * std::max(1.0, hi - lo);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(e[i] - e[j]) <= tol) return std::make_pair(i + 1, j + 1);
    return std::nullopt;
}

inline std::array<DressedState, 4>
dressed_basis(const RabiSet& r, const Detunings& d,
              double gap_tol_rel = kGapTolRel) {
    const LambdaConstants c = lambda_constants(r, d);
    const auto energies = unperturbed_energies(c, d);
    if (auto pair = degenerate_pair(energies, gap_tol_rel)) {
        std::ostringstream oss;
        oss << "nondegenerate PT inapplicable: unperturbed states "
            << pair->first << " and " << pair->second
            << " are (near-)degenerate (energies " << energies[pair->first - 1]
            << ", " << energies[pair->second - 1] << ")";
        throw physics_error(oss.str());
    }

    const double g = c.g_norm;
    std::array<DressedState, 4> basis;

    basis[0].amplitudes << r.omega_b / g, 0.0, -r.omega_a / g, 0.0;
    basis[1].amplitudes << std::conj(r.omega_a) / c.n_minus,
        2.0 * c.lambda_minus / c.n_minus, std::conj(r.omega_b) / c.n_minus, 0.0;
    basis[2].amplitudes << std::conj(r.omega_a) / c.n_plus,
        2.0 * c.lambda_plus / c.n_plus, std::conj(r.omega_b) / c.n_plus, 0.0;
    basis[3].amplitudes << 0.0, 0.0, 0.0, 1.0;

    for (int n = 0; n < 4; ++n) {
        basis[n].energy = energies[n];
        basis[n].label = n + 1;
        basis[n].amplitudes.normalize();
    }
    return basis;
}

} // namespace kerr4ls

#endif
