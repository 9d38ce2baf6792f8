#ifndef KERR4LS_KERR_HPP
#define KERR4LS_KERR_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kerr4ls/errors.hpp"
#include "kerr4ls/lambda_spectrum.hpp"
#include "kerr4ls/model.hpp"
#include "kerr4ls/oracle.hpp"

namespace kerr4ls {

enum class KerrFlag { WeakControl, WeakDetuning, NearDegenerate };

inline const char* to_string(KerrFlag f) {
    switch (f) {
        case KerrFlag::WeakControl: return "WEAK_CONTROL";
        case KerrFlag::WeakDetuning: return "WEAK_DETUNING";
        case KerrFlag::NearDegenerate: return "NEAR_DEGENERATE";
    }
    return "?";
}

/// Cross-Kerr coupling, the oracle dark-state energy it should approximate,
/// and the limit-validity ratios with their warning flags.
struct KerrReport {
    double k_value;
    double dark_energy_exact;
    double dark_energy_kerr;
    double ratio_b_over_a;
    double ratio_b_over_c;
    double ratio_det;
    std::vector<KerrFlag> flags;
};

struct XpmEvolution {
    double phase;
    double t;
    Vector4cd initial_state;
    Vector4cd final_state;
};

// Validity thresholds: one order of magnitude stands in for the paper's ">>".
inline constexpr double kValidityRatio = 10.0;

inline double kerr_coupling(const SystemParams& p) {
    validate_params(p);
    const Detunings d = detunings_from_params(p);
    if (d.delta_3 == 0.0)
        throw physics_error("kerr coupling undefined at delta_3 = 0");
    if (p.g_b == cplx(0.0))
        throw physics_error("kerr coupling undefined for g_b = 0");
    return -std::norm(p.g_a) * std::norm(p.g_c) /
           (d.delta_3 * std::norm(p.g_b) * (p.n_b + 1));
}

inline double kerr_energy(const SystemParams& p) {
    return kerr_coupling(p) * p.n_a * p.n_c;
}

inline XpmEvolution xpm_evolution(const SystemParams& p, double t) {
    XpmEvolution ev;
    ev.t = t;
    ev.phase = kerr_coupling(p) * p.n_a * p.n_c * t;
    ev.initial_state << 1.0, 0.0, 0.0, 0.0;
    ev.final_state = std::exp(cplx(0.0, -ev.phase)) * ev.initial_state;
    return ev;
}

/// Exact dark-state energy: eigenvalue of the full H whose eigenvector has
/// maximal overlap with the analytic unperturbed dark state.
inline double oracle_dark_energy(const SystemParams& p) {
    const Hamiltonian4 ham = build_hamiltonian(p);
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const LambdaConstants c = lambda_constants(r, d);

    Vector4cd dark;
    dark << r.omega_b / c.g_norm, 0.0, -r.omega_a / c.g_norm, 0.0;

    const EigenDecomposition exact = eigh<4>(ham.h);
    int best = 0;
    double best_ov = -1.0;
    for (int k = 0; k < 4; ++k) {
        const double ov = std::norm(dark.dot(exact.vectors.col(k)));
        if (ov > best_ov) {
            best_ov = ov;
            best = k;
        }
    }
    return exact.values(best);
}

inline KerrReport validity_report(const SystemParams& p) {
    validate_params(p);
    const RabiSet r = rabi_from_params(p);
    const Detunings d = detunings_from_params(p);
    const double oa = std::abs(r.omega_a);
    const double ob = std::abs(r.omega_b);
    const double oc = std::abs(r.omega_c);
    const double inf = std::numeric_limits<double>::infinity();

    KerrReport rep;
    rep.ratio_b_over_a = oa > 0.0 ? ob / oa : inf;
    rep.ratio_b_over_c = oc > 0.0 ? ob / oc : inf;
    rep.ratio_det = oc > 0.0 ? d.delta_3 / oc : inf;

    if (std::min(rep.ratio_b_over_a, rep.ratio_b_over_c) < kValidityRatio)
        rep.flags.push_back(KerrFlag::WeakControl);
    if (rep.ratio_det < kValidityRatio)
        rep.flags.push_back(KerrFlag::WeakDetuning);
    const LambdaConstants c = lambda_constants(r, d);
    if (degenerate_pair(unperturbed_energies(c, d)))
        rep.flags.push_back(KerrFlag::NearDegenerate);

    rep.dark_energy_exact = oracle_dark_energy(p);
    if (d.delta_3 != 0.0 && p.g_b != cplx(0.0)) {
        rep.k_value = kerr_coupling(p);
        rep.dark_energy_kerr = kerr_energy(p);
    } else {
        rep.k_value = std::numeric_limits<double>::quiet_NaN();
        rep.dark_energy_kerr = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

} // namespace kerr4ls

#endif
