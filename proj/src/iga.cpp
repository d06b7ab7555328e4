#include "bpdn/iga.hpp"

#include <algorithm>
#include <cmath>

#include "bpdn/errors.hpp"
#include "bpdn/shrinkage.hpp"

namespace bpdn {

void IgaConfig::validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("IGA damping must lie in (0, 1]");
    if (!(tol >= 0.0)) throw ConfigError("IGA tolerance must be nonnegative");
    if (!(prec_floor >= 0.0)) throw ConfigError("IGA prec_floor must be nonnegative");
}

Belief compute_belief_row(const Eigen::Ref<const Vector>& a_row, double y_m, const DiagGaussianState& aux,
                          std::size_t row) {
    const Eigen::Index n = a_row.size();
    if (aux.lambda.size() != n || aux.inv_prec.size() != n) {
        throw ConfigError("compute_belief_row: auxiliary state length does not match the row");
    }
    const Vector w = aux.inv_prec.cwiseProduct(aux.lambda);
    const double s = a_row.dot(w);
    const Vector a2 = a_row.cwiseAbs2();
    const double q = a2.dot(aux.inv_prec);
    if (!std::isfinite(s) || !std::isfinite(q)) throw NumericalError("non-finite row sums", row);

    Belief b{Vector(n), Vector(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const double a = a_row(k);
        if (a == 0.0) {
            b.xi(k) = 0.0;
            b.xi_diag(k) = 0.0;
            continue;
        }
        const double denom = 1.0 + q - a2(k) * aux.inv_prec(k);
        b.xi_diag(k) = a2(k) / denom;
        b.xi(k) = a * (y_m - s + a * w(k)) / denom;
        if (!std::isfinite(b.xi(k)) || !std::isfinite(b.xi_diag(k))) {
            throw NumericalError("non-finite belief", row);
        }
    }
    return b;
}

Belief compute_belief_row_dense_oracle(const Eigen::Ref<const Vector>& a_row, double y_m,
                                       const DiagGaussianState& aux) {
    const Eigen::Index n = a_row.size();
    if (n > 512) throw OracleError("dense oracle limited to N <= 512");
    if (aux.lambda.size() != n || aux.inv_prec.size() != n) throw OracleError("dense oracle: length mismatch");
    if ((aux.inv_prec.array() <= 0.0).any()) {
        throw OracleError("dense oracle needs every auxiliary inverse precision > 0");
    }
    const Vector prec = aux.inv_prec.cwiseInverse();
    Eigen::MatrixXd p = prec.asDiagonal();
    p += a_row * a_row.transpose();

    Eigen::FullPivLU<Eigen::MatrixXd> lu(p);
    if (!lu.isInvertible()) throw OracleError("dense oracle: singular auxiliary precision");
    const Eigen::MatrixXd cov = lu.inverse();
    const Vector mu = cov * (aux.lambda + a_row * y_m);

    const Vector proj_prec = cov.diagonal().cwiseInverse();
    const Vector proj_lambda = proj_prec.cwiseProduct(mu);
    return {proj_lambda - aux.lambda, proj_prec - prec};
}

IgaState init_iga_state(const ProblemInstance& inst) {
    const auto m = static_cast<Eigen::Index>(inst.m());
    const auto n = static_cast<Eigen::Index>(inst.n());
    IgaState s;
    s.target = {Vector::Zero(n), Vector::Ones(n)};
    s.extra_lambda_hat = Vector::Zero(n);
    s.extra_prec_hat = Vector::Zero(n);
    s.aux.assign(static_cast<std::size_t>(m), DiagGaussianState{Vector::Zero(n), Vector::Ones(n)});
    s.beliefs.assign(static_cast<std::size_t>(m), Belief{Vector::Zero(n), Vector::Zero(n)});
    return s;
}

namespace {

void check_finite(const Vector& v, std::size_t iter, const char* what) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v(k))) throw DivergenceError(what, iter, static_cast<std::size_t>(k));
    }
}

}  // namespace

IgaState iga_step(const IgaState& state, const ProblemInstance& inst, const IgaConfig& cfg) {
    const std::size_t m_count = inst.m();
    const auto n = static_cast<Eigen::Index>(inst.n());
    if (state.aux.size() != m_count || state.target.lambda.size() != n) {
        throw ConfigError("iga_step: state dimensions do not match the instance");
    }
    const double alpha = cfg.damping;
    const std::size_t iter = state.iter + 1;

    IgaState next;
    next.iter = iter;
    next.clamp_events = state.clamp_events;
    next.beliefs.reserve(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const auto idx = static_cast<Eigen::Index>(m);
        next.beliefs.push_back(compute_belief_row(inst.a.row(idx).transpose(), inst.y(idx), state.aux[m], m));
    }

    next.extra_lambda_hat = Vector::Zero(n);
    next.extra_prec_hat = Vector::Zero(n);
    for (const auto& b : next.beliefs) {
        next.extra_lambda_hat += b.xi;
        next.extra_prec_hat += b.xi_diag;
    }

    DiagGaussianState target{Vector(n), Vector(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        // An all-zero column has no precision and stays on the inactive branch.
        const ThresholdPair p = next.extra_prec_hat(k) > 0.0
                                    ? upsilon_pair(next.extra_lambda_hat(k), next.extra_prec_hat(k), inst.kappa)
                                    : ThresholdPair{};
        target.lambda(k) = p.lambda;
        target.inv_prec(k) = p.inv_precision;
    }

    next.aux.reserve(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const Belief& b = next.beliefs[m];
        DiagGaussianState aux{target.lambda - b.xi, Vector(n)};
        for (Eigen::Index k = 0; k < n; ++k) {
            const double v0 = target.inv_prec(k);
            if (v0 == 0.0) {
                aux.inv_prec(k) = 0.0;
                continue;
            }
            // Lambda_m = Lambda_0 - Xi_m, inverted without leaving the inverse domain.
            const double denom = 1.0 - b.xi_diag(k) * v0;
            if (denom <= cfg.prec_floor) {
                aux.inv_prec(k) = 0.0;
                ++next.clamp_events;
            } else {
                aux.inv_prec(k) = v0 / denom;
            }
        }
        if (alpha < 1.0) {
            aux.lambda = (1.0 - alpha) * state.aux[m].lambda + alpha * aux.lambda;
            aux.inv_prec = (1.0 - alpha) * state.aux[m].inv_prec + alpha * aux.inv_prec;
        }
        check_finite(aux.lambda, iter, "auxiliary lambda diverged");
        check_finite(aux.inv_prec, iter, "auxiliary inverse precision diverged");
        next.aux.push_back(std::move(aux));
    }

    if (alpha < 1.0) {
        target.lambda = (1.0 - alpha) * state.target.lambda + alpha * target.lambda;
        target.inv_prec = (1.0 - alpha) * state.target.inv_prec + alpha * target.inv_prec;
    }
    check_finite(target.lambda, iter, "target lambda diverged");
    check_finite(target.inv_prec, iter, "target inverse precision diverged");
    next.target = std::move(target);
    return next;
}

SolverTrace run_iga(const ProblemInstance& inst, const IgaConfig& cfg, IgaState& state) {
    cfg.validate();
    SolverTrace trace;
    trace.algorithm = "iga";
    state = init_iga_state(inst);
    trace.records.push_back(make_record(0, state.target.mean(), inst));
    Vector prev_extra = state.extra_lambda_hat;

    for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
        try {
            state = iga_step(state, inst, cfg);
        } catch (const DivergenceError& e) {
            throw SolverDiverged(e, std::move(trace));
        } catch (const NumericalError& e) {
            throw SolverDiverged(DivergenceError(e.what(), t, 0), std::move(trace));
        }
        const Vector& prev = trace.records.back().estimate;
        IterationRecord rec = make_record(t, state.target.mean(), inst);
        rec.clamp_events = state.clamp_events;
        rec.relative_change = relative_change(rec.estimate, prev);
        // The target mean can sit at 0 while damped precisions are still
        // moving, so the extra point has to settle as well.
        const double extra_change = relative_change(state.extra_lambda_hat, prev_extra);
        prev_extra = state.extra_lambda_hat;
        const bool done = t >= 2 && rec.relative_change < cfg.tol && extra_change < cfg.tol;
        trace.records.push_back(std::move(rec));
        if (done) {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

SolverTrace run_iga(const ProblemInstance& inst, const IgaConfig& cfg) {
    IgaState state;
    return run_iga(inst, cfg, state);
}

double check_m_condition(const IgaState& state, const ProblemInstance& inst) {
    const Vector mu0 = state.target.mean();
    double worst = 0.0;
    for (std::size_t m = 0; m < state.aux.size(); ++m) {
        const auto idx = static_cast<Eigen::Index>(m);
        const auto a = inst.a.row(idx).transpose();
        const DiagGaussianState& aux = state.aux[m];
        // (Lambda + a a^T)^{-1} c = V c - V a (a^T V c) / (1 + a^T V a), with V = Lambda^{-1}.
        const Vector c = aux.lambda + a * inst.y(idx);
        const Vector vc = aux.inv_prec.cwiseProduct(c);
        const Vector va = aux.inv_prec.cwiseProduct(a);
        const double r = 1.0 + a.dot(va);
        const Vector mu_m = vc - va * (a.dot(vc) / r);
        for (Eigen::Index k = 0; k < mu0.size(); ++k) {
            if (aux.inv_prec(k) == 0.0 && state.target.inv_prec(k) > 0.0) continue;
            worst = std::max(worst, std::abs(mu_m(k) - mu0(k)));
        }
    }
    return worst;
}

double e_condition_residual(const IgaState& state) {
    const auto n = state.target.lambda.size();
    const auto m_count = static_cast<double>(state.aux.size());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double v0 = state.target.inv_prec(k);
        if (!(v0 > 0.0)) continue;
        double lambda_sum = 0.0;
        double prec_sum = 0.0;
        bool prec_finite = true;
        for (const auto& aux : state.aux) {
            lambda_sum += aux.lambda(k);
            if (aux.inv_prec(k) > 0.0) {
                prec_sum += 1.0 / aux.inv_prec(k);
            } else {
                prec_finite = false;
            }
        }
        worst = std::max(worst, std::abs(lambda_sum + state.extra_lambda_hat(k) - m_count * state.target.lambda(k)));
        if (prec_finite) {
            worst = std::max(worst, std::abs(prec_sum + state.extra_prec_hat(k) - m_count / v0));
        }
    }
    return worst;
}

}  // namespace bpdn
