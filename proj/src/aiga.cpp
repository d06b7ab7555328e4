#include "bpdn/aiga.hpp"

#include <cmath>

#include "bpdn/errors.hpp"
#include "bpdn/shrinkage.hpp"

namespace bpdn {

void AigaConfig::validate() const {
    if (!(tol >= 0.0)) throw ConfigError("AIGA tolerance must be nonnegative");
    if (!(initial_prec_hat > 0.0 && initial_prec_hat <= 1.0)) {
        throw ConfigError("AIGA initial Lambda_hat must lie in (0, 1]");
    }
}

AigaState init_aiga_state(const ProblemInstance& inst, double initial_prec_hat) {
    const auto n = static_cast<Eigen::Index>(inst.n());
    AigaState s;
    s.lambda0 = Vector::Zero(n);
    s.inv_prec0 = Vector::Zero(n);
    s.lambda_hat0 = Vector::Zero(n);
    s.prec_hat = initial_prec_hat;
    s.z = inst.y;
    s.iota = 0.0;
    return s;
}

AigaState aiga_step(const AigaState& state, const ProblemInstance& inst) {
    const auto n = static_cast<Eigen::Index>(inst.n());
    if (state.lambda0.size() != n || state.z.size() != inst.y.size()) {
        throw ConfigError("aiga_step: state dimensions do not match the instance");
    }
    const double onsager = state.iota / inst.delta();
    const Vector mu = state.mean();

    AigaState next;
    next.iter = state.iter + 1;
    next.prec_hat = 1.0 / (1.0 + onsager / state.prec_hat);
    next.z = inst.y - inst.a * mu + onsager * state.z;
    next.lambda_hat0 = next.prec_hat * (inst.a.transpose() * next.z + mu);

    next.lambda0.resize(n);
    next.inv_prec0.resize(n);
    Eigen::Index active = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double lh = next.lambda_hat0(k);
        if (!std::isfinite(lh)) throw DivergenceError("AIGA lambda_hat diverged", next.iter, static_cast<std::size_t>(k));
        const ThresholdPair p = upsilon_pair(lh, next.prec_hat, inst.kappa);
        next.lambda0(k) = p.lambda;
        next.inv_prec0(k) = p.inv_precision;
        if (p.active()) ++active;
    }
    next.iota = static_cast<double>(active) / static_cast<double>(n);
    if (!std::isfinite(next.prec_hat)) throw DivergenceError("AIGA Lambda_hat diverged", next.iter, 0);
    return next;
}

SolverTrace run_aiga(const ProblemInstance& inst, const AigaConfig& cfg) {
    cfg.validate();
    SolverTrace trace;
    trace.algorithm = "aiga";
    AigaState state = init_aiga_state(inst, cfg.initial_prec_hat);
    {
        IterationRecord rec = make_record(0, state.mean(), inst);
        rec.prec_hat = state.prec_hat;
        rec.z_norm = state.z.norm();
        trace.records.push_back(std::move(rec));
    }
    for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
        try {
            state = aiga_step(state, inst);
        } catch (const DivergenceError& e) {
            throw SolverDiverged(e, std::move(trace));
        }
        const Vector& prev = trace.records.back().estimate;
        IterationRecord rec = make_record(t, state.mean(), inst);
        rec.iota = state.iota;
        rec.prec_hat = state.prec_hat;
        rec.z_norm = state.z.norm();
        rec.relative_change = relative_change(rec.estimate, prev);
        // t == 1 can leave the estimate at 0 while the internal state still moves.
        const bool done = t >= 2 && rec.relative_change < cfg.tol;
        trace.records.push_back(std::move(rec));
        if (done) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

}  // namespace bpdn
