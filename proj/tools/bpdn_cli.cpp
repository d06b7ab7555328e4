// Command-line front end: generate instances, run solvers, audit AMP/AIGA
// equivalence, check MP/IGA identities and run NMSE sweeps.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 divergence, 5 audit failure.

#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bpdn/aiga.hpp"
#include "bpdn/amp.hpp"
#include "bpdn/errors.hpp"
#include "bpdn/harness.hpp"
#include "bpdn/iga.hpp"
#include "bpdn/model.hpp"
#include "bpdn/trace.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kIo = 3, kDiverged = 4, kAuditFailed = 5 };

using bpdn::format_double;

const CLI::Validator kFraction(
    [](std::string& s) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(s);
        } catch (const std::exception&) {
            return "value " + s + " is not a number";
        }
        return (v > 0.0 && v <= 1.0) ? std::string() : "value " + s + " must lie in (0, 1]";
    },
    "(0,1]");

const CLI::Validator kPositive(
    [](std::string& s) -> std::string {
        double v = 0.0;
        try {
            v = std::stod(s);
        } catch (const std::exception&) {
            return "value " + s + " is not a number";
        }
        return v > 0.0 ? std::string() : "value " + s + " must be positive";
    },
    "POSITIVE");

struct GenerateArgs {
    bpdn::SyntheticConfig cfg;
    std::string out;
};

int cmd_generate(const GenerateArgs& args) {
    const bpdn::ProblemInstance inst = bpdn::generate_instance(args.cfg);
    bpdn::save_instance(inst, args.out);
    const auto nnz = (inst.h_true->array() != 0.0).count();
    std::cout << "generated m=" << inst.m() << " n=" << inst.n() << " nnz=" << nnz
              << " sigma_z2=" << format_double(*inst.sigma_z2) << " -> " << args.out << '\n';
    return kOk;
}

struct SolveArgs {
    std::string algo;
    std::string in;
    std::size_t iters = 100;
    std::optional<double> damping;
    double tol = 1e-8;
    std::string trace_out;
};

void print_summary(const bpdn::SolverTrace& trace) {
    const auto& last = trace.records.back();
    std::cout << "algo=" << trace.algorithm << " iters=" << last.iter
              << " converged=" << (trace.converged ? "yes" : "no");
    if (last.nmse) std::cout << " nmse=" << format_double(*last.nmse);
    std::cout << " residual=" << format_double(last.residual_norm) << '\n';
}

int cmd_solve(const SolveArgs& args) {
    if (args.damping && args.algo != "iga") {
        std::cerr << "error: --damping only applies to --algo iga\n";
        return kUsage;
    }
    const bpdn::ProblemInstance inst = bpdn::load_instance(args.in);
    bpdn::SolverTrace trace;
    try {
        switch (bpdn::parse_algorithm(args.algo)) {
            case bpdn::Algorithm::iga: {
                bpdn::IgaConfig c;
                c.max_iter = args.iters;
                c.tol = args.tol;
                if (args.damping) c.damping = *args.damping;
                trace = bpdn::run_iga(inst, c);
                break;
            }
            case bpdn::Algorithm::aiga: {
                bpdn::AigaConfig c;
                c.max_iter = args.iters;
                c.tol = args.tol;
                trace = bpdn::run_aiga(inst, c);
                break;
            }
            case bpdn::Algorithm::amp: {
                bpdn::AmpConfig c;
                c.max_iter = args.iters;
                c.tol = args.tol;
                trace = bpdn::run_amp(inst, c);
                break;
            }
        }
    } catch (const bpdn::SolverDiverged& e) {
        if (!args.trace_out.empty()) bpdn::write_trace_csv(e.partial_trace(), args.trace_out);
        std::cerr << "error: " << e.what() << '\n';
        return kDiverged;
    }
    if (!args.trace_out.empty()) bpdn::write_trace_csv(trace, args.trace_out);
    print_summary(trace);
    return kOk;
}

struct EquivArgs {
    std::string in;
    std::size_t iters = 50;
    double tol = 1e-8;
    double prec_hat0 = 1.0;
    std::optional<double> tau_z0;
};

int cmd_equiv(const EquivArgs& args) {
    const bpdn::ProblemInstance inst = bpdn::load_instance(args.in);
    bpdn::EquivalenceInit init = bpdn::EquivalenceInit::matched(args.prec_hat0);
    if (args.tau_z0) init.tau_z0 = *args.tau_z0;
    const bpdn::EquivalenceReport rep = bpdn::audit_equivalence(inst, args.iters, args.tol, init);
    std::cout << "iters=" << rep.iters << " max_dz=" << format_double(rep.max_dz)
              << " max_dmu=" << format_double(rep.max_dmu) << " max_dprec=" << format_double(rep.max_dprec)
              << ' ' << (rep.pass ? "PASS" : "FAIL") << '\n';
    if (rep.diverged) {
        std::cerr << "error: " << rep.failure << '\n';
        return kDiverged;
    }
    return rep.pass ? kOk : kAuditFailed;
}

struct SweepArgs {
    std::string config;
    std::string out;
    unsigned threads = 0;
};

int cmd_sweep(const SweepArgs& args) {
    bpdn::ExperimentConfig cfg;
    try {
        cfg = bpdn::load_experiment_config(args.config);
    } catch (const bpdn::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    std::filesystem::path out = args.out;
    if (out.empty()) {
        if (!cfg.output_path) {
            std::cerr << "error: no output path (--out or \"output_path\")\n";
            return kUsage;
        }
        out = *cfg.output_path;
    }
    const auto rows = bpdn::run_experiment(cfg, args.threads);
    bpdn::write_experiment_csv(rows, out);
    std::size_t diverged = 0;
    for (const auto& r : rows) diverged = std::max(diverged, r.diverged_count);
    std::cout << "rows=" << rows.size() << " max_diverged=" << diverged << " -> " << out.string() << '\n';
    return kOk;
}

struct CorrespondArgs {
    std::size_t trials = 1000;
    std::uint64_t seed = 5;
    std::size_t n = 16;
};

int cmd_correspond(const CorrespondArgs& args) {
    const auto rep = bpdn::check_mp_iga_correspondence(args.seed, args.trials, args.n);
    std::cout << "passed=" << rep.passed << '/' << rep.trials << " skipped_coordinates=" << rep.skipped_coordinates
              << " max_error=" << format_double(rep.max_error) << '\n';
    if (!rep.all_passed()) {
        std::cerr << "witness: " << rep.witness << '\n';
        return kAuditFailed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BPDN/LASSO workbench: IGA, AIGA and AMP solvers with equivalence audits"};
    app.require_subcommand(1, 1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic instance as JSON");
    generate->add_option("--m", gen.cfg.m, "measurements")->required()->check(CLI::PositiveNumber);
    generate->add_option("--n", gen.cfg.n, "unknowns")->required()->check(CLI::PositiveNumber);
    generate->add_option("--rho", gen.cfg.rho, "sparsity fraction")->required()->check(kFraction);
    generate->add_option("--snr-db", gen.cfg.snr_db, "SNR in dB (inf for noiseless)")->required();
    generate->add_option("--kappa", gen.cfg.kappa, "l1 weight")->required()->check(kPositive);
    generate->add_option("--seed", gen.cfg.seed, "master seed")->required();
    generate->add_option("--out", gen.out, "output instance file")->required();

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Run one solver on an instance");
    solve_cmd->add_option("--algo", solve.algo, "iga | aiga | amp")
        ->required()
        ->check(CLI::IsMember({"iga", "aiga", "amp"}));
    solve_cmd->add_option("--in", solve.in, "instance file")->required();
    solve_cmd->add_option("--iters", solve.iters, "maximum iterations")->capture_default_str();
    solve_cmd->add_option("--damping", solve.damping, "IGA damping in (0,1]")->check(kFraction);
    solve_cmd->add_option("--tol", solve.tol, "relative-change stopping tolerance")->capture_default_str();
    solve_cmd->add_option("--trace-out", solve.trace_out, "per-iteration CSV trace");

    EquivArgs eq;
    auto* equiv = app.add_subcommand("equiv", "Lockstep AMP vs AIGA audit");
    equiv->add_option("--in", eq.in, "instance file")->required();
    equiv->add_option("--iters", eq.iters, "lockstep iterations")->capture_default_str();
    equiv->add_option("--tol", eq.tol, "pass threshold on every deviation")->capture_default_str();
    equiv->add_option("--prec-hat0", eq.prec_hat0, "initial AIGA Lambda_hat")->check(kFraction)->capture_default_str();
    equiv->add_option("--tau-z0", eq.tau_z0, "initial AMP tau_z (default: matched)")->check(CLI::NonNegativeNumber);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo NMSE experiment from a JSON config");
    sweep->add_option("--config", sw.config, "experiment config JSON")->required();
    sweep->add_option("--out", sw.out, "results CSV (overrides output_path)");
    sweep->add_option("--threads", sw.threads, "worker threads (0 = all cores)")->capture_default_str();

    CorrespondArgs co;
    auto* correspond = app.add_subcommand("correspond", "Check the MP/IGA message identities");
    correspond->add_option("--trials", co.trials, "random trials")->check(CLI::PositiveNumber)->capture_default_str();
    correspond->add_option("--seed", co.seed, "seed")->capture_default_str();
    correspond->add_option("--n", co.n, "row length")->check(CLI::PositiveNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        std::cerr << (parsed.empty() ? app.help() : parsed.front()->help());
        return kUsage;
    }

    try {
        if (*generate) return cmd_generate(gen);
        if (*solve_cmd) return cmd_solve(solve);
        if (*equiv) return cmd_equiv(eq);
        if (*sweep) return cmd_sweep(sw);
        if (*correspond) return cmd_correspond(co);
    } catch (const bpdn::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const bpdn::SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    } catch (const bpdn::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const bpdn::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDiverged;
    }
    return kUsage;
}
