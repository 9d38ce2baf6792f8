#ifndef KERR4LS_ORACLE_HPP
#define KERR4LS_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "kerr4ls/errors.hpp"
#include "kerr4ls/lambda_spectrum.hpp"
#include "kerr4ls/model.hpp"
#include "kerr4ls/rs_perturbation.hpp"

namespace kerr4ls {

/// Exact eigendecomposition of a small complex Hermitian matrix.
/// values ascending; vectors column-matched, orthonormal, with the first
/// significant component of each vector rotated real positive so output is
/// a deterministic function of the input bits.
template <int N>
struct EigenDecompositionT {
    Eigen::Matrix<double, N, 1> values;
    Eigen::Matrix<cplx, N, N> vectors;
    double residual;
};

using EigenDecomposition = EigenDecompositionT<4>;

template <int N>
EigenDecompositionT<N> eigh(const Eigen::Matrix<cplx, N, N>& h) {
    static_assert(N == 2 || N == 4, "oracle handles 2x2 and 4x4 problems");

    const double hmax = h.cwiseAbs().maxCoeff();
    const double herm = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (herm >= 1e-12 * std::max(1.0, hmax))
        throw solver_error("eigh: input matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<cplx, N, N>> solver(h);
    if (solver.info() != Eigen::Success)
        throw solver_error("eigh: eigensolver failed to converge");

    EigenDecompositionT<N> out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();

    // Phase canonicalization: first component above threshold made real >= 0.
    for (int k = 0; k < N; ++k) {
        for (int i = 0; i < N; ++i) {
            const cplx a = out.vectors(i, k);
            if (std::abs(a) > 1e-8) {
                out.vectors.col(k) *= std::conj(a) / std::abs(a);
                break;
            }
        }
    }

    out.residual = 0.0;
    for (int k = 0; k < N; ++k) {
        const double r =
            (h * out.vectors.col(k) - out.values(k) * out.vectors.col(k))
                .cwiseAbs()
                .maxCoeff();
        out.residual = std::max(out.residual, r);
    }
    if (out.residual >= 1e-12 * std::max(1.0, hmax)) {
        std::ostringstream oss;
        oss << "eigh: residual " << out.residual << " exceeds tolerance";
        throw solver_error(oss.str());
    }
    return out;
}

/// Bijection between an approximate orthonormal set and the oracle's exact
/// eigenvectors maximizing the total squared overlap. exact_index[n] is the
/// exact column matched to approx state n; overlap[n] the matched |<.|.>|.
struct OverlapPairing {
    std::array<int, 4> exact_index;
    std::array<double, 4> overlap;
};

inline OverlapPairing match_by_overlap(const std::array<DressedState, 4>& approx,
                                       const EigenDecomposition& exact) {
    Eigen::Matrix4d ov2;
    for (int n = 0; n < 4; ++n)
        for (int k = 0; k < 4; ++k)
            ov2(n, k) = std::norm(approx[n].amplitudes.dot(exact.vectors.col(k)));

    std::array<int, 4> perm = {0, 1, 2, 3};
    std::array<int, 4> best = perm;
    double best_score = -1.0;
    do {
        double s = 0.0;
        for (int n = 0; n < 4; ++n) s += ov2(n, perm[n]);
        if (s > best_score) {
            best_score = s;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    OverlapPairing out;
    for (int n = 0; n < 4; ++n) {
        out.exact_index[n] = best[n];
        out.overlap[n] = std::sqrt(ov2(n, best[n]));
        // Ambiguity guard: a runner-up overlap this close means the exact
        // spectrum is effectively degenerate for matching purposes.
        for (int k = 0; k < 4; ++k) {
            if (k == best[n]) continue;
            if (std::abs(out.overlap[n] - std::sqrt(ov2(n, k))) < 1e-6) {
                std::ostringstream oss;
                oss << "ambiguous overlap pairing for state " << (n + 1)
                    << ": candidates " << best[n] + 1 << " and " << k + 1
                    << " overlap within 1e-6 (suggests degeneracy)";
                throw physics_error(oss.str());
            }
        }
    }
    return out;
}

/// Empirical convergence order of the second-order energy truncation for one
/// state: least-squares slope of log residual vs log epsilon. Points below
/// the noise floor are excluded; with fewer than two usable points the slope
/// is unavailable and the state is reported saturated.
struct ConvergenceEstimate {
    double slope;
    bool saturated;
    std::vector<double> residuals; // one per schedule point, NaN if unused
};

struct ConvergenceScan {
    std::vector<double> epsilons;
    std::array<ConvergenceEstimate, 4> states;
};

inline ConvergenceScan convergence_scan(const SystemParams& params,
                                        const std::vector<double>& eps_schedule) {
    if (eps_schedule.size() < 3)
        throw config_error("convergence scan needs at least 3 epsilon values");
    for (size_t i = 0; i + 1 < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] > eps_schedule[i + 1]) || eps_schedule.back() <= 0.0)
            throw config_error("epsilon schedule must be descending and positive");

    const PerturbationSplit split = make_split(params);
    const PerturbationResult pt = second_order_energies(split);

    double lo = pt.e0[0], hi = pt.e0[0];
    double min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        lo = std::min(lo, pt.e0[i]);
        hi = std::max(hi, pt.e0[i]);
        for (int j = i + 1; j < 4; ++j)
            min_gap = std::min(min_gap, std::abs(pt.e0[i] - pt.e0[j]));
    }
    if (eps_schedule.front() >= min_gap)
        throw config_error(
            "largest epsilon must stay below the smallest unperturbed gap");
    const double noise_floor = 1e-13 * std::max(hi - lo, 1.0);

    ConvergenceScan scan;
    scan.epsilons = eps_schedule;

    std::array<std::vector<double>, 4> res;
    for (double eps : eps_schedule) {
        const Matrix4cd h = split.h0 + eps * split.v;
        const EigenDecomposition exact = eigh<4>(h);
        const OverlapPairing pairing = match_by_overlap(split.basis, exact);
        for (int n = 0; n < 4; ++n) {
            const double e_exact = exact.values(pairing.exact_index[n]);
            res[n].push_back(std::abs(e_exact - pt.e0[n] - eps * eps * pt.e2[n]));
        }
    }

    for (int n = 0; n < 4; ++n) {
        ConvergenceEstimate& est = scan.states[n];
        est.residuals = res[n];
        // least-squares fit of log r vs log eps over points above the floor
        std::vector<double> x, y;
        for (size_t i = 0; i < eps_schedule.size(); ++i) {
            if (res[n][i] > noise_floor) {
                x.push_back(std::log(eps_schedule[i]));
                y.push_back(std::log(res[n][i]));
            }
        }
        if (x.size() < 2) {
            est.saturated = true;
            est.slope = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        est.saturated = false;
        const double n_pts = static_cast<double>(x.size());
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n_pts;
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / n_pts;
        double sxx = 0.0, sxy = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        est.slope = sxy / sxx;
    }
    return scan;
}

} // namespace kerr4ls

#endif
