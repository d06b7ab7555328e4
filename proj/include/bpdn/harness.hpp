#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "bpdn/model.hpp"

namespace bpdn {

// ---------------------------------------------------------------------------
// AMP / AIGA lockstep audit

/// Initial conditions of the two recursions. They are matched when
/// 1 / prec_hat0 == 1 + tau_z0.
struct EquivalenceInit {
    double prec_hat0 = 1.0;
    double tau_z0 = 0.0;

    static EquivalenceInit matched(double prec_hat0) { return {prec_hat0, 1.0 / prec_hat0 - 1.0}; }
};

/// Deviations of one comparison point. Step 0 compares the initial states.
struct StepDeviation {
    std::size_t step = 0;
    double dz = 0.0;     ///< |z_amp - z_aiga|_inf
    double dmu = 0.0;    ///< |mu_amp - inv_prec0 .* lambda0|_inf
    double dprec = 0.0;  ///< |(1 + tau_z) - 1 / prec_hat|
};

struct EquivalenceReport {
    std::size_t iters = 0;  ///< lockstep iterations completed
    double max_dz = 0.0;
    double max_dmu = 0.0;
    double max_dprec = 0.0;
    double tol = 0.0;
    bool pass = true;
    bool diverged = false;
    std::string failure;
    std::vector<StepDeviation> profile;
};

/// Runs amp_step and aiga_step side by side for `iters` iterations and records
/// the deviations of the paired quantities (1 + tau_z^t vs 1 / Lambda_hat^{t+1},
/// z^t, mu^{t+1}). Never stops early on a mismatch.
EquivalenceReport audit_equivalence(const ProblemInstance& inst, std::size_t iters, double tol,
                                    const EquivalenceInit& init = {});

// ---------------------------------------------------------------------------
// Factor-to-variable message identities

struct CorrespondenceReport {
    std::size_t trials = 0;
    std::size_t passed = 0;
    std::size_t skipped_coordinates = 0;  ///< coordinates with a_mn == 0
    double max_error = 0.0;
    std::string witness;  ///< first violation, empty when all trials pass

    bool all_passed() const noexcept { return passed == trials; }
};

/// For random (a_m, y_m, lambda_m, Lambda_m^{-1}) draws, checks that the belief
/// of compute_belief_row reproduces the MP factor-to-variable message:
///   1 / Xi_nn        == (1 + sum_{n' != n} a_n'^2 v_n') / a_n^2
///   xi_n / Xi_nn     == (y - sum_{n' != n} a_n' v_n' lambda_n') / a_n
/// with right-hand sides summed directly. Relative tolerance 1e-10.
CorrespondenceReport check_mp_iga_correspondence(std::uint64_t seed, std::size_t trials, std::size_t n = 16,
                                                 double tol = 1e-10);

// ---------------------------------------------------------------------------
// Monte-Carlo NMSE experiments

enum class Algorithm { iga, aiga, amp };

std::string_view algorithm_name(Algorithm a) noexcept;
/// Accepts "iga", "aiga", "amp" in any case; throws ConfigError otherwise.
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
    std::size_t m = 128;
    std::size_t n = 256;
    double rho = 0.05;
    double kappa = 0.05;
    std::vector<double> snr_db_list{20.0, 40.0};
    std::size_t sample_count = 20;
    std::size_t max_iter = 50;
    std::vector<Algorithm> algorithms{Algorithm::iga, Algorithm::aiga, Algorithm::amp};
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> output_path;

    void validate() const;
};

/// Reads a JSON object whose keys mirror the ExperimentConfig fields.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ExperimentRow {
    Algorithm algorithm = Algorithm::amp;
    double snr_db = 0.0;
    std::size_t sample_count = 0;  ///< samples that entered the averages
    std::size_t iter = 0;
    double nmse = 0.0;
    double mean_iota = 0.0;
    double mean_residual = 0.0;
    std::size_t diverged_count = 0;
    double wall_ms = 0.0;  ///< mean solve time per sample
};

/// For every SNR, solves `sample_count` instances (seed of sample l is
/// sample_seed(cfg.seed, l)) with every requested algorithm for exactly
/// max_iter undamped iterations and averages the per-iteration metrics.
/// Rows are ordered by (algorithm, snr, iter). `threads == 0` picks the
/// hardware concurrency.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, unsigned threads = 0);

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);
void write_experiment_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path);

}  // namespace bpdn
