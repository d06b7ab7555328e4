#pragma once

#include <cstddef>

#include "bpdn/model.hpp"
#include "bpdn/trace.hpp"

namespace bpdn {

/// Scalar-precision state of the approximate IGA.
struct AigaState {
    Vector lambda0;          ///< target natural mean
    Vector inv_prec0;        ///< target inverse precision, entries in {0, 1/prec_hat}
    Vector lambda_hat0;      ///< extra-point natural mean
    double prec_hat = 1.0;   ///< extra-point precision, shared by every coordinate
    Vector z;                ///< Onsager-corrected residual of the previous step
    double iota = 0.0;       ///< fraction of |lambda_hat0| above kappa
    std::size_t iter = 0;

    Vector mean() const { return inv_prec0.cwiseProduct(lambda0); }
};

struct AigaConfig {
    std::size_t max_iter = 100;
    double tol = 1e-8;
    double initial_prec_hat = 1.0;  ///< Lambda_hat_0 at t = 0, in (0, 1]

    void validate() const;
};

/// lambda0 = 0, infinite target precision, z = y, iota = 0.
AigaState init_aiga_state(const ProblemInstance& inst, double initial_prec_hat = 1.0);

/// One AIGA iteration, with mu = inv_prec0 .* lambda0 and delta = M/N:
///   prec_hat'    = 1 / (1 + (iota/delta) / prec_hat)
///   z'           = y - A mu + (iota/delta) z
///   lambda_hat0' = prec_hat' (A^T z' + mu)
///   iota'        = #{|lambda_hat0'| > kappa} / N
///   (lambda0', inv_prec0') = upsilon_pair(lambda_hat0', prec_hat', kappa)
AigaState aiga_step(const AigaState& state, const ProblemInstance& inst);

SolverTrace run_aiga(const ProblemInstance& inst, const AigaConfig& cfg);

}  // namespace bpdn
