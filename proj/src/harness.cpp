#include "bpdn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bpdn/aiga.hpp"
#include "bpdn/amp.hpp"
#include "bpdn/errors.hpp"
#include "bpdn/iga.hpp"
#include "bpdn/trace.hpp"

namespace bpdn {

// ---------------------------------------------------------------------------

namespace {

void record(EquivalenceReport& rep, StepDeviation dev) {
    rep.max_dz = std::max(rep.max_dz, dev.dz);
    rep.max_dmu = std::max(rep.max_dmu, dev.dmu);
    rep.max_dprec = std::max(rep.max_dprec, dev.dprec);
    rep.profile.push_back(dev);
}

double inf_norm_diff(const Vector& a, const Vector& b) {
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

EquivalenceReport audit_equivalence(const ProblemInstance& inst, std::size_t iters, double tol,
                                    const EquivalenceInit& init) {
    if (!(tol >= 0.0)) throw ConfigError("audit_equivalence: tolerance must be nonnegative");
    if (!(init.prec_hat0 > 0.0) || !(init.tau_z0 >= 0.0)) {
        throw ConfigError("audit_equivalence: need Lambda_hat_0 > 0 and tau_z >= 0");
    }
    EquivalenceReport rep;
    rep.tol = tol;

    AigaState aiga = init_aiga_state(inst, init.prec_hat0);
    AmpState amp = init_amp_state(inst, init.tau_z0);
    record(rep, {0, inf_norm_diff(amp.z, aiga.z), inf_norm_diff(amp.mu, aiga.mean()),
                 std::abs((1.0 + amp.tau_z) - 1.0 / aiga.prec_hat)});

    for (std::size_t t = 1; t <= iters; ++t) {
        try {
            aiga = aiga_step(aiga, inst);
            amp = amp_step(amp, inst);
        } catch (const DivergenceError& e) {
            rep.diverged = true;
            rep.failure = e.what();
            break;
        }
        rep.iters = t;
        record(rep, {t, inf_norm_diff(amp.z, aiga.z), inf_norm_diff(amp.mu, aiga.mean()),
                     std::abs((1.0 + amp.tau_z) - 1.0 / aiga.prec_hat)});
    }
    rep.pass = !rep.diverged && rep.max_dz <= tol && rep.max_dmu <= tol && rep.max_dprec <= tol;
    return rep;
}

// ---------------------------------------------------------------------------

CorrespondenceReport check_mp_iga_correspondence(std::uint64_t seed, std::size_t trials, std::size_t n,
                                                 double tol) {
    if (trials < 1) throw ConfigError("check_mp_iga_correspondence: trials must be >= 1");
    if (n < 1) throw ConfigError("check_mp_iga_correspondence: n must be >= 1");
    const auto nn = static_cast<Eigen::Index>(n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    CorrespondenceReport rep;
    rep.trials = trials;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Vector a(nn);
        DiagGaussianState aux{Vector(nn), Vector(nn)};
        for (Eigen::Index k = 0; k < nn; ++k) {
            // Roughly one coordinate in ten gets an exact zero coefficient.
            a(k) = unif(rng) < 0.1 ? 0.0 : scale * gauss(rng);
            aux.lambda(k) = gauss(rng);
            aux.inv_prec(k) = 0.1 + 1.9 * unif(rng);
        }
        const double y = gauss(rng);
        const Belief b = compute_belief_row(a, y, aux);

        bool ok = true;
        for (Eigen::Index k = 0; k < nn && ok; ++k) {
            if (a(k) == 0.0) {
                ++rep.skipped_coordinates;
                continue;
            }
            double prec_excl = 1.0;
            double mean_excl = y;
            for (Eigen::Index j = 0; j < nn; ++j) {
                if (j == k) continue;
                prec_excl += a(j) * a(j) * aux.inv_prec(j);
                mean_excl -= a(j) * aux.inv_prec(j) * aux.lambda(j);
            }
            const double var_rhs = prec_excl / (a(k) * a(k));
            const double mean_rhs = mean_excl / a(k);
            const double var_lhs = 1.0 / b.xi_diag(k);
            const double mean_lhs = b.xi(k) / b.xi_diag(k);
            const double err_var = std::abs(var_lhs - var_rhs) / std::max(1.0, std::abs(var_rhs));
            const double err_mean = std::abs(mean_lhs - mean_rhs) / std::max(1.0, std::abs(mean_rhs));
            rep.max_error = std::max({rep.max_error, err_var, err_mean});
            if (!(err_var <= tol && err_mean <= tol)) {
                ok = false;
                if (rep.witness.empty()) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "trial " << trial << " coordinate " << k << ": 1/Xi " << var_lhs << " vs " << var_rhs
                       << ", xi/Xi " << mean_lhs << " vs " << mean_rhs;
                    rep.witness = os.str();
                }
            }
        }
        if (ok) ++rep.passed;
    }
    return rep;
}

// ---------------------------------------------------------------------------

std::string_view algorithm_name(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::iga: return "iga";
        case Algorithm::aiga: return "aiga";
        case Algorithm::amp: return "amp";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "iga") return Algorithm::iga;
    if (lower == "aiga") return Algorithm::aiga;
    if (lower == "amp") return Algorithm::amp;
    throw ConfigError("unknown algorithm \"" + std::string(name) + "\"");
}

void ExperimentConfig::validate() const {
    if (m < 1 || n < 1) throw ConfigError("experiment: m and n must be >= 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("experiment: rho must lie in (0, 1]");
    if (!(kappa > 0.0)) throw ConfigError("experiment: kappa must be positive");
    if (snr_db_list.empty()) throw ConfigError("experiment: snr_db_list is empty");
    if (sample_count < 1) throw ConfigError("experiment: sample_count must be >= 1");
    if (algorithms.empty()) throw ConfigError("experiment: algorithms is empty");
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    using nlohmann::json;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");

    static const std::vector<std::string> known{"m", "n", "rho", "kappa", "snr_db_list", "sample_count",
                                                "max_iter", "algorithms", "seed", "output_path"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown experiment config key \"" + key + "\"");
        }
    }

    ExperimentConfig cfg;
    try {
        if (j.contains("m")) cfg.m = j["m"].get<std::size_t>();
        if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
        if (j.contains("rho")) cfg.rho = j["rho"].get<double>();
        if (j.contains("kappa")) cfg.kappa = j["kappa"].get<double>();
        if (j.contains("snr_db_list")) cfg.snr_db_list = j["snr_db_list"].get<std::vector<double>>();
        if (j.contains("sample_count")) cfg.sample_count = j["sample_count"].get<std::size_t>();
        if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<std::size_t>();
        if (j.contains("algorithms")) {
            cfg.algorithms.clear();
            for (const auto& name : j["algorithms"]) cfg.algorithms.push_back(parse_algorithm(name.get<std::string>()));
        }
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("output_path")) cfg.output_path = j["output_path"].get<std::string>();
    } catch (const json::type_error& e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

namespace {

struct SampleRun {
    std::optional<SolverTrace> trace;  ///< empty when the solver diverged
    double wall_ms = 0.0;
};

SolverTrace solve(Algorithm algo, const ProblemInstance& inst, std::size_t max_iter) {
    switch (algo) {
        case Algorithm::iga: {
            IgaConfig c;
            c.max_iter = max_iter;
            c.tol = 0.0;
            return run_iga(inst, c);
        }
        case Algorithm::aiga: {
            AigaConfig c;
            c.max_iter = max_iter;
            c.tol = 0.0;
            return run_aiga(inst, c);
        }
        case Algorithm::amp: {
            AmpConfig c;
            c.max_iter = max_iter;
            c.tol = 0.0;
            return run_amp(inst, c);
        }
    }
    throw ConfigError("unreachable algorithm");
}

bool usable(const SolverTrace& trace, std::size_t max_iter) {
    if (trace.records.size() != max_iter + 1) return false;
    return std::all_of(trace.records.begin(), trace.records.end(),
                       [](const IterationRecord& r) { return r.nmse.has_value() && std::isfinite(*r.nmse); });
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, unsigned threads) {
    cfg.validate();
    const std::size_t n_snr = cfg.snr_db_list.size();
    const std::size_t n_alg = cfg.algorithms.size();
    const std::size_t L = cfg.sample_count;

    // runs[(snr * L + sample) * n_alg + alg]
    std::vector<SampleRun> runs(n_snr * L * n_alg);
    const std::size_t jobs = n_snr * L;
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t job = next++; job < jobs; job = next++) {
            const std::size_t s = job / L;
            const std::size_t l = job % L;
            SyntheticConfig sc;
            sc.m = cfg.m;
            sc.n = cfg.n;
            sc.rho = cfg.rho;
            sc.snr_db = cfg.snr_db_list[s];
            sc.kappa = cfg.kappa;
            sc.seed = sample_seed(cfg.seed, l);
            const ProblemInstance inst = generate_instance(sc);
            for (std::size_t a = 0; a < n_alg; ++a) {
                SampleRun& run = runs[job * n_alg + a];
                const auto start = std::chrono::steady_clock::now();
                try {
                    run.trace = solve(cfg.algorithms[a], inst, cfg.max_iter);
                } catch (const DivergenceError&) {
                    run.trace.reset();
                }
                run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::vector<ExperimentRow> rows;
    rows.reserve(n_alg * n_snr * (cfg.max_iter + 1));
    for (std::size_t a = 0; a < n_alg; ++a) {
        for (std::size_t s = 0; s < n_snr; ++s) {
            std::vector<const SolverTrace*> ok;
            double wall = 0.0;
            for (std::size_t l = 0; l < L; ++l) {
                const SampleRun& run = runs[(s * L + l) * n_alg + a];
                wall += run.wall_ms;
                if (run.trace && usable(*run.trace, cfg.max_iter)) ok.push_back(&*run.trace);
            }
            const std::size_t diverged = L - ok.size();
            for (std::size_t t = 0; t <= cfg.max_iter; ++t) {
                ExperimentRow row;
                row.algorithm = cfg.algorithms[a];
                row.snr_db = cfg.snr_db_list[s];
                row.sample_count = ok.size();
                row.iter = t;
                row.diverged_count = diverged;
                row.wall_ms = wall / static_cast<double>(L);
                if (ok.empty()) {
                    row.nmse = row.mean_iota = row.mean_residual = std::numeric_limits<double>::quiet_NaN();
                } else {
                    // Summed in sample order so the averages are reproducible.
                    double nmse_sum = 0.0, iota_sum = 0.0, res_sum = 0.0;
                    for (const SolverTrace* tr : ok) {
                        const IterationRecord& r = tr->records[t];
                        nmse_sum += *r.nmse;
                        iota_sum += r.iota;
                        res_sum += r.residual_norm;
                    }
                    const auto cnt = static_cast<double>(ok.size());
                    row.nmse = nmse_sum / cnt;
                    row.mean_iota = iota_sum / cnt;
                    row.mean_residual = res_sum / cnt;
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
    out << "algorithm,snr_db,sample_count,iter,nmse,mean_iota,mean_residual,diverged_count,wall_ms\n";
    for (const auto& r : rows) {
        out << algorithm_name(r.algorithm) << ',' << format_double(r.snr_db) << ',' << r.sample_count << ','
            << r.iter << ',' << format_double(r.nmse) << ',' << format_double(r.mean_iota) << ','
            << format_double(r.mean_residual) << ',' << r.diverged_count << ',' << format_double(r.wall_ms) << '\n';
    }
}

void write_experiment_csv(const std::vector<ExperimentRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_experiment_csv(rows, out);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace bpdn
