#pragma once

#include <cmath>
#include <cstddef>

namespace bpdn {

// Soft-threshold family for the Laplace prior. Every function uses the same
// boundary convention: |x| == threshold falls on the inactive (zero) branch.

/// Natural parameters of the Gaussian matched to a thresholded coordinate.
/// inv_precision == 0 encodes infinite precision (the coordinate is pinned at 0).
struct ThresholdPair {
    double lambda = 0.0;
    double inv_precision = 0.0;

    double mean() const noexcept { return lambda * inv_precision; }
    bool active() const noexcept { return inv_precision > 0.0; }
};

namespace detail {
inline double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace detail

/// eta(mu, tau) = (|mu| - tau) sign(mu) when |mu| > tau, else 0.
inline double eta(double mu, double tau) noexcept {
    const double mag = std::abs(mu);
    return mag > tau ? (mag - tau) * detail::sign(mu) : 0.0;
}

inline double eta_prime(double mu, double tau) noexcept { return std::abs(mu) > tau ? 1.0 : 0.0; }

/// Posterior mean of the kappa-Laplace prior tilted by exp(h lambda_hat - 0.5 Lambda_hat h^2)
/// in the zero-temperature limit.
inline double zeta(double lambda_hat, double prec_hat, double kappa) noexcept {
    const double mag = std::abs(lambda_hat);
    // Same operation order as upsilon_pair(...).mean(), so the two agree bitwise.
    return mag > kappa ? ((mag - kappa) * detail::sign(lambda_hat)) * (1.0 / prec_hat) : 0.0;
}

/// d zeta / d lambda_hat.
inline double zeta_prime(double lambda_hat, double prec_hat, double kappa) noexcept {
    return std::abs(lambda_hat) > kappa ? 1.0 / prec_hat : 0.0;
}

/// (upsilon, 1/Upsilon): the Gaussian with the same limiting mean and variance
/// as zeta / zeta_prime. The inactive branch returns (0, 0).
inline ThresholdPair upsilon_pair(double lambda_hat, double prec_hat, double kappa) noexcept {
    const double mag = std::abs(lambda_hat);
    if (mag > kappa) return {(mag - kappa) * detail::sign(lambda_hat), 1.0 / prec_hat};
    return {};
}

struct QuadratureConfig {
    double beta = 1e4;
    double half_width_sigmas = 12.0;
    std::size_t node_count = 4001;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean and variance of p(h) ~ exp{-beta (kappa|h| + 0.5 Lambda_hat h^2 - h lambda_hat)}
/// by the trapezoid rule on a grid centred at lambda_hat / Lambda_hat spanning
/// half_width_sigmas * (beta Lambda_hat)^(-1/2) each side.
///
/// Finite-beta reference for zeta (mean) and zeta_prime (beta * variance).
/// Throws ConfigError on invalid arguments, OracleError on a degenerate integral.
Moments laplace_prior_moments_quadrature(double lambda_hat, double prec_hat, double kappa,
                                         const QuadratureConfig& q = {});

}  // namespace bpdn
