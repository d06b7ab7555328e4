#include "bpdn/amp.hpp"

#include <cmath>

#include "bpdn/errors.hpp"
#include "bpdn/shrinkage.hpp"

namespace bpdn {

void AmpConfig::validate() const {
    if (!(tol >= 0.0)) throw ConfigError("AMP tolerance must be nonnegative");
    if (!(initial_tau_z >= 0.0) || !std::isfinite(initial_tau_z)) {
        throw ConfigError("AMP initial tau_z must be finite and nonnegative");
    }
}

AmpState init_amp_state(const ProblemInstance& inst, double initial_tau_z) {
    AmpState s;
    s.mu = Vector::Zero(static_cast<Eigen::Index>(inst.n()));
    s.z = inst.y;
    s.tau_z = initial_tau_z;
    s.gamma = inst.kappa * initial_tau_z;
    return s;
}

AmpState amp_step(const AmpState& state, const ProblemInstance& inst) {
    const auto n = static_cast<Eigen::Index>(inst.n());
    if (state.mu.size() != n || state.z.size() != inst.y.size()) {
        throw ConfigError("amp_step: state dimensions do not match the instance");
    }
    const double active = static_cast<double>((state.mu.array() != 0.0).count()) / static_cast<double>(n);
    const double onsager = active / inst.delta();

    AmpState next;
    next.iter = state.iter + 1;
    next.tau_z = onsager * (1.0 + state.tau_z);
    next.gamma = inst.kappa * next.tau_z;
    next.z = inst.y - inst.a * state.mu + onsager * state.z;

    const Vector pseudo = inst.a.transpose() * next.z + state.mu;
    const double threshold = inst.kappa * (1.0 + next.tau_z);
    next.mu.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!std::isfinite(pseudo(k))) throw DivergenceError("AMP estimate diverged", next.iter, static_cast<std::size_t>(k));
        next.mu(k) = eta(pseudo(k), threshold);
    }
    if (!std::isfinite(next.tau_z)) throw DivergenceError("AMP tau_z diverged", next.iter, 0);
    return next;
}

SolverTrace run_amp(const ProblemInstance& inst, const AmpConfig& cfg) {
    cfg.validate();
    SolverTrace trace;
    trace.algorithm = "amp";
    AmpState state = init_amp_state(inst, cfg.initial_tau_z);
    {
        IterationRecord rec = make_record(0, state.mu, inst);
        rec.tau_z = state.tau_z;
        rec.z_norm = state.z.norm();
        trace.records.push_back(std::move(rec));
    }
    for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
        try {
            state = amp_step(state, inst);
        } catch (const DivergenceError& e) {
            throw SolverDiverged(e, std::move(trace));
        }
        const Vector& prev = trace.records.back().estimate;
        IterationRecord rec = make_record(t, state.mu, inst);
        rec.tau_z = state.tau_z;
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
