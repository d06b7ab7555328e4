#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bpdn/errors.hpp"
#include "bpdn/model.hpp"

namespace bpdn {

/// Snapshot after one iteration (record 0 is the initial state).
struct IterationRecord {
    std::size_t iter = 0;
    Vector estimate;
    std::optional<double> nmse;       ///< present when the instance carries h_true
    double residual_norm = 0.0;       ///< |y - A estimate|_2
    double iota = 0.0;                ///< fraction of nonzero coordinates of the estimate
    std::optional<double> prec_hat;   ///< AIGA scalar Lambda_hat_0
    std::optional<double> tau_z;      ///< AMP tau_z
    std::optional<double> z_norm;     ///< |z|_2 of the Onsager-corrected residual
    std::size_t clamp_events = 0;     ///< IGA: cumulative precision clamps
    double relative_change = 0.0;
};

struct SolverTrace {
    std::string algorithm;
    std::vector<IterationRecord> records;
    bool converged = false;

    std::size_t iterations() const noexcept { return records.empty() ? 0 : records.back().iter; }
    const Vector& final_estimate() const { return records.back().estimate; }
};

/// Raised by the run_* drivers; carries everything recorded before the failure.
class SolverDiverged : public DivergenceError {
public:
    SolverDiverged(const DivergenceError& cause, SolverTrace partial)
        : DivergenceError(cause), partial_(std::move(partial)) {}

    const SolverTrace& partial_trace() const noexcept { return partial_; }

private:
    SolverTrace partial_;
};

/// Shared stopping rule: |mu_new - mu_old|_2 / max(|mu_old|_2, 1e-12).
double relative_change(const Vector& next, const Vector& prev);

/// Fills the estimate-derived fields (NMSE, residual, active fraction).
IterationRecord make_record(std::size_t iter, Vector estimate, const ProblemInstance& inst);

/// 17 significant digits, so every printed double round-trips.
std::string format_double(double x);

void write_trace_csv(const SolverTrace& trace, std::ostream& out);
void write_trace_csv(const SolverTrace& trace, const std::filesystem::path& path);

}  // namespace bpdn
