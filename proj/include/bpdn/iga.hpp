#pragma once

#include <cstddef>
#include <vector>

#include "bpdn/model.hpp"
#include "bpdn/trace.hpp"

namespace bpdn {

/// Diagonal Gaussian in natural parameters. Precisions are stored inverted:
/// inv_prec[n] == 0 means infinite precision, i.e. the coordinate is pinned at 0.
struct DiagGaussianState {
    Vector lambda;
    Vector inv_prec;

    Vector mean() const { return inv_prec.cwiseProduct(lambda); }
};

/// Increment (xi_m, diag Xi_m) that the m-projection of auxiliary point m
/// adds to its incoming natural parameters.
struct Belief {
    Vector xi;
    Vector xi_diag;
};

struct IgaState {
    DiagGaussianState target;          ///< lambda_0, Lambda_0^{-1}
    Vector extra_lambda_hat;           ///< sum of xi_m
    Vector extra_prec_hat;             ///< sum of diag Xi_m
    std::vector<DiagGaussianState> aux;
    std::vector<Belief> beliefs;
    std::size_t iter = 0;
    std::size_t clamp_events = 0;
};

struct IgaConfig {
    std::size_t max_iter = 100;
    double damping = 1.0;      ///< alpha in (0, 1]; 1 is undamped
    double tol = 1e-8;         ///< relative l2 change of the target mean
    double prec_floor = 1e-10; ///< clamp threshold on 1 - Xi_m Lambda_0^{-1}

    void validate() const;
};

/// Belief of one measurement row in O(N). With v = aux.inv_prec, w = v .* aux.lambda,
/// s = a.w and q = a^2.v:
///   xi_diag[n] = a_n^2 / (1 + q - a_n^2 v_n)
///   xi[n]      = a_n (y - s + a_n w_n) / (1 + q - a_n^2 v_n)
/// `row` is only used to label a NumericalError.
Belief compute_belief_row(const Eigen::Ref<const Vector>& a_row, double y_m, const DiagGaussianState& aux,
                          std::size_t row = 0);

/// Reference path for compute_belief_row: forms Lambda_m + a a^T, inverts it
/// densely, m-projects onto the diagonal and subtracts the incoming
/// parameters. Requires every aux.inv_prec entry > 0 and N <= 512.
/// O(N^3); intended for tests.
Belief compute_belief_row_dense_oracle(const Eigen::Ref<const Vector>& a_row, double y_m,
                                       const DiagGaussianState& aux);

/// Zero natural means and identity precisions everywhere.
IgaState init_iga_state(const ProblemInstance& inst);

/// One full IGA sweep: beliefs, extra point, thresholded target, auxiliary
/// points, damping. Throws DivergenceError on a non-finite parameter.
IgaState iga_step(const IgaState& state, const ProblemInstance& inst, const IgaConfig& cfg);

/// Iterates iga_step until the target mean and the extra point stop moving,
/// or max_iter is hit.
/// Throws SolverDiverged with the partial trace.
SolverTrace run_iga(const ProblemInstance& inst, const IgaConfig& cfg);

/// Same as run_iga but also hands back the final state.
SolverTrace run_iga(const ProblemInstance& inst, const IgaConfig& cfg, IgaState& final_state);

/// max_m |mu_m - mu_0|_inf, where mu_m is the mean of auxiliary point m
/// (evaluated with Sherman-Morrison). Coordinates whose auxiliary precision was
/// clamped to infinity while the target is active are skipped: the pinned
/// auxiliary carries no mean there. Zero at a fixed point.
double check_m_condition(const IgaState& state, const ProblemInstance& inst);

/// Largest violation of the linear e-condition identities over coordinates
/// with finite target precision:
///   sum_m lambda_m + lambda_hat_0 - M lambda_0   and
///   sum_m Lambda_m + Lambda_hat_0 - M Lambda_0.
double e_condition_residual(const IgaState& state);

}  // namespace bpdn
