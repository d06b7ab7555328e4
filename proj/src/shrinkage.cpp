#include "bpdn/shrinkage.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "bpdn/errors.hpp"

namespace bpdn {

Moments laplace_prior_moments_quadrature(double lambda_hat, double prec_hat, double kappa,
                                         const QuadratureConfig& q) {
    if (!(prec_hat > 0.0) || !(kappa > 0.0) || !std::isfinite(lambda_hat)) {
        throw ConfigError("quadrature: need finite lambda_hat, Lambda_hat > 0 and kappa > 0");
    }
    if (!(q.beta > 0.0) || !(q.half_width_sigmas > 0.0) || q.node_count < 101) {
        throw ConfigError("quadrature: need beta > 0, half_width > 0 and node_count >= 101");
    }

    const double center = lambda_hat / prec_hat;
    const double half_width = q.half_width_sigmas / std::sqrt(q.beta * prec_hat);
    const double lo = center - half_width;
    const double step = 2.0 * half_width / static_cast<double>(q.node_count - 1);

    std::vector<double> nodes(q.node_count);
    std::vector<double> log_w(q.node_count);
    double log_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.node_count; ++i) {
        const double h = lo + step * static_cast<double>(i);
        nodes[i] = h;
        log_w[i] = -q.beta * (kappa * std::abs(h) + 0.5 * prec_hat * h * h - h * lambda_hat);
        if (!std::isfinite(log_w[i])) throw OracleError("quadrature: non-finite integrand");
        log_max = std::max(log_max, log_w[i]);
    }

    std::vector<double> w(q.node_count);
    for (std::size_t i = 0; i < q.node_count; ++i) {
        const double end_weight = (i == 0 || i + 1 == q.node_count) ? 0.5 : 1.0;
        w[i] = end_weight * std::exp(log_w[i] - log_max);
    }

    double z = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < q.node_count; ++i) {
        z += w[i];
        first += w[i] * nodes[i];
    }
    if (!(z > 0.0) || !std::isfinite(z)) throw OracleError("quadrature: zero normalizer");
    const double mean = first / z;

    double second = 0.0;
    for (std::size_t i = 0; i < q.node_count; ++i) {
        const double d = nodes[i] - mean;
        second += w[i] * d * d;
    }
    const double variance = second / z;
    if (!(variance > 0.0) || !std::isfinite(mean)) throw OracleError("quadrature: degenerate moments");
    return {mean, variance};
}

}  // namespace bpdn
