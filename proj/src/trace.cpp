#include "bpdn/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bpdn {

double relative_change(const Vector& next, const Vector& prev) {
    return (next - prev).norm() / std::max(prev.norm(), 1e-12);
}

IterationRecord make_record(std::size_t iter, Vector estimate, const ProblemInstance& inst) {
    IterationRecord rec;
    rec.iter = iter;
    rec.residual_norm = (inst.y - inst.a * estimate).norm();
    const auto nonzero = (estimate.array() != 0.0).count();
    rec.iota = static_cast<double>(nonzero) / static_cast<double>(estimate.size());
    if (inst.h_true && inst.h_true->squaredNorm() > 0.0) rec.nmse = nmse(estimate, *inst.h_true);
    rec.estimate = std::move(estimate);
    return rec;
}

std::string format_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

namespace {
std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
}  // namespace

void write_trace_csv(const SolverTrace& trace, std::ostream& out) {
    out << "algorithm,iter,nmse,residual_norm,iota,prec_hat,tau_z,z_norm,clamp_events,relative_change\n";
    for (const auto& r : trace.records) {
        out << trace.algorithm << ',' << r.iter << ',' << opt(r.nmse) << ',' << format_double(r.residual_norm)
            << ',' << format_double(r.iota) << ',' << opt(r.prec_hat) << ',' << opt(r.tau_z) << ','
            << opt(r.z_norm) << ',' << r.clamp_events << ',' << format_double(r.relative_change) << '\n';
    }
}

void write_trace_csv(const SolverTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_trace_csv(trace, out);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace bpdn
