#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bpdn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One BPDN/LASSO problem: minimise kappa*|h|_1 + 0.5*|y - A h|^2.
///
/// `a` is M x N, row m holds the coefficients of measurement m. The optional
/// fields carry the generating ground truth when the instance is synthetic.
struct ProblemInstance {
    Matrix a;
    Vector y;
    double kappa = 0.0;
    std::optional<Vector> h_true;
    std::optional<double> sigma_z2;
    std::optional<std::uint64_t> seed;
    std::optional<double> rho;

    std::size_t m() const noexcept { return static_cast<std::size_t>(a.rows()); }
    std::size_t n() const noexcept { return static_cast<std::size_t>(a.cols()); }
    /// Undersampling ratio M/N.
    double delta() const noexcept { return static_cast<double>(m()) / static_cast<double>(n()); }

    /// Throws SchemaError when any invariant is broken.
    void validate() const;
};

struct SyntheticConfig {
    std::size_t m = 0;
    std::size_t n = 0;
    double rho = 0.05;
    double snr_db = 20.0;  ///< +infinity means noiseless
    double kappa = 0.05;
    std::uint64_t seed = 0;
};

/// Random streams split off one instance seed. Each stream seeds its own
/// mt19937_64 with splitmix64(seed ^ (tag * golden-ratio constant)), so the
/// matrix, the signal and the noise are reproducible independently.
enum class Stream : std::uint64_t { matrix = 1, signal = 2, noise = 3 };

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept;

/// Seed of Monte-Carlo sample `index` under `master`.
constexpr std::uint64_t sample_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return master ^ index;
}

/// sigma_z^2 = (n*rho/m) * 10^(-snr_db/10), i.e. SNR = E|Ah|^2 / (M sigma_z^2)
/// with unit-variance Bernoulli-Gaussian nonzeros and N(0, 1/M) entries.
double noise_variance_from_snr(double snr_db, double rho, std::size_t m, std::size_t n);

/// A_mn ~ N(0, 1/M), h_n ~ BG(rho) with unit-variance nonzeros, y = A h + z.
ProblemInstance generate_instance(const SyntheticConfig& cfg);

/// (1/L) sum_l |est_l - truth_l|^2 / |truth_l|^2.
double nmse(std::span<const Vector> estimates, std::span<const Vector> truths);
double nmse(const Vector& estimate, const Vector& truth);

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);
ProblemInstance load_instance(const std::filesystem::path& path);

}  // namespace bpdn
