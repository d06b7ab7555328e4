#pragma once

#include <cstddef>

#include "bpdn/model.hpp"
#include "bpdn/trace.hpp"

namespace bpdn {

/// Approximate message passing for the LASSO with threshold kappa (1 + tau_z).
struct AmpState {
    Vector mu;
    Vector z;            ///< residual of the previous step
    double tau_z = 0.0;
    double gamma = 0.0;  ///< kappa * tau_z
    std::size_t iter = 0;
};

struct AmpConfig {
    std::size_t max_iter = 100;
    double tol = 1e-8;
    double initial_tau_z = 0.0;

    void validate() const;
};

/// mu = 0, z = y, tau_z as given.
AmpState init_amp_state(const ProblemInstance& inst, double initial_tau_z = 0.0);

/// One AMP iteration, ordered like aiga_step. f is the fraction of nonzero
/// entries of mu, which equals <eta'> of the step that produced mu:
///   tau_z' = (f/delta) (1 + tau_z)
///   z'     = y - A mu + (f/delta) z
///   mu'    = eta(A^T z' + mu, kappa (1 + tau_z'))
AmpState amp_step(const AmpState& state, const ProblemInstance& inst);

SolverTrace run_amp(const ProblemInstance& inst, const AmpConfig& cfg);

}  // namespace bpdn
