#include "bpdn/model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "bpdn/errors.hpp"

namespace bpdn {

namespace {

constexpr int kFormatVersion = 1;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

bool all_finite(const auto& v) { return v.allFinite(); }

}  // namespace

void ProblemInstance::validate() const {
    if (a.rows() < 1 || a.cols() < 1) throw SchemaError("instance needs m >= 1 and n >= 1");
    if (y.size() != a.rows()) {
        throw SchemaError("y has " + std::to_string(y.size()) + " entries, expected m = " +
                          std::to_string(a.rows()));
    }
    if (!all_finite(a)) throw SchemaError("matrix a has non-finite entries");
    if (!all_finite(y)) throw SchemaError("y has non-finite entries");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw SchemaError("kappa must be positive and finite");
    if (h_true) {
        if (h_true->size() != a.cols()) {
            throw SchemaError("h_true has " + std::to_string(h_true->size()) +
                              " entries, expected n = " + std::to_string(a.cols()));
        }
        if (!all_finite(*h_true)) throw SchemaError("h_true has non-finite entries");
    }
    if (sigma_z2 && !(*sigma_z2 >= 0.0 && std::isfinite(*sigma_z2))) {
        throw SchemaError("sigma_z2 must be a finite nonnegative number");
    }
    if (rho && !(*rho > 0.0 && *rho <= 1.0)) throw SchemaError("rho must lie in (0, 1]");
}

std::uint64_t stream_seed(std::uint64_t seed, Stream stream) noexcept {
    return splitmix64(seed ^ (static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ull));
}

double noise_variance_from_snr(double snr_db, double rho, std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) throw ConfigError("noise_variance_from_snr: m and n must be >= 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("noise_variance_from_snr: rho must lie in (0, 1]");
    if (std::isnan(snr_db)) throw ConfigError("noise_variance_from_snr: snr_db is NaN");
    const double signal_power = static_cast<double>(n) * rho / static_cast<double>(m);
    return signal_power * std::pow(10.0, -snr_db / 10.0);
}

ProblemInstance generate_instance(const SyntheticConfig& cfg) {
    if (cfg.m < 1 || cfg.n < 1) throw ConfigError("generate_instance: m and n must be >= 1");
    if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) throw ConfigError("generate_instance: rho must lie in (0, 1]");
    if (!(cfg.kappa > 0.0) || !std::isfinite(cfg.kappa)) {
        throw ConfigError("generate_instance: kappa must be positive");
    }
    const double sigma_z2 = noise_variance_from_snr(cfg.snr_db, cfg.rho, cfg.m, cfg.n);
    const auto m = static_cast<Eigen::Index>(cfg.m);
    const auto n = static_cast<Eigen::Index>(cfg.n);

    ProblemInstance inst;
    inst.kappa = cfg.kappa;
    inst.seed = cfg.seed;
    inst.rho = cfg.rho;
    inst.sigma_z2 = sigma_z2;

    {
        std::mt19937_64 rng(stream_seed(cfg.seed, Stream::matrix));
        std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(cfg.m)));
        inst.a.resize(m, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) inst.a(i, j) = gauss(rng);
    }

    Vector h(n);
    {
        // Both draws happen for every coordinate so the support pattern does
        // not shift the amplitudes of later coordinates.
        std::mt19937_64 rng(stream_seed(cfg.seed, Stream::signal));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double u = unif(rng);
            const double g = gauss(rng);
            h(j) = u < cfg.rho ? g : 0.0;
        }
    }

    inst.y = inst.a * h;
    if (sigma_z2 > 0.0) {
        std::mt19937_64 rng(stream_seed(cfg.seed, Stream::noise));
        std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_z2));
        for (Eigen::Index i = 0; i < m; ++i) inst.y(i) += gauss(rng);
    }
    inst.h_true = std::move(h);
    return inst;
}

double nmse(std::span<const Vector> estimates, std::span<const Vector> truths) {
    if (estimates.empty()) throw MetricError("nmse: need at least one sample");
    if (estimates.size() != truths.size()) throw MetricError("nmse: estimate/truth count mismatch");
    double sum = 0.0;
    for (std::size_t l = 0; l < estimates.size(); ++l) {
        const auto& est = estimates[l];
        const auto& truth = truths[l];
        if (est.size() != truth.size()) throw MetricError("nmse: vector length mismatch at sample " + std::to_string(l));
        const double denom = truth.squaredNorm();
        if (!(denom > 0.0)) throw MetricError("nmse: zero-norm truth at sample " + std::to_string(l));
        sum += (est - truth).squaredNorm() / denom;
    }
    return sum / static_cast<double>(estimates.size());
}

double nmse(const Vector& estimate, const Vector& truth) {
    return nmse(std::span<const Vector>(&estimate, 1), std::span<const Vector>(&truth, 1));
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
    inst.validate();
    using nlohmann::json;
    json j;
    j["format_version"] = kFormatVersion;
    j["m"] = inst.m();
    j["n"] = inst.n();
    j["kappa"] = inst.kappa;
    json rows = json::array();
    for (Eigen::Index i = 0; i < inst.a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < inst.a.cols(); ++k) row.push_back(inst.a(i, k));
        rows.push_back(std::move(row));
    }
    j["a"] = std::move(rows);
    j["y"] = std::vector<double>(inst.y.data(), inst.y.data() + inst.y.size());
    if (inst.h_true) j["h_true"] = std::vector<double>(inst.h_true->data(), inst.h_true->data() + inst.h_true->size());
    if (inst.sigma_z2) j["sigma_z2"] = *inst.sigma_z2;
    if (inst.seed) j["seed"] = *inst.seed;
    if (inst.rho) j["rho"] = *inst.rho;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    // nlohmann/json emits the shortest representation that round-trips a double.
    out << j.dump(1) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

namespace {

Vector read_vector(const nlohmann::json& arr, const char* key) {
    if (!arr.is_array()) throw SchemaError(std::string("\"") + key + "\" must be an array");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) throw SchemaError(std::string("\"") + key + "\" holds a non-number");
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    }
    return v;
}

}  // namespace

ProblemInstance load_instance(const std::filesystem::path& path) {
    using nlohmann::json;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    if (!in && !in.eof()) throw IoError("read failed for " + path.string());
    if (!j.is_object()) throw SchemaError("instance file must hold a JSON object");

    if (j.contains("format_version") &&
        (!j["format_version"].is_number_integer() || j["format_version"].get<int>() != kFormatVersion)) {
        throw SchemaError("unsupported format_version");
    }
    for (const char* key : {"m", "n", "kappa", "a", "y"}) {
        if (!j.contains(key)) throw SchemaError(std::string("missing key \"") + key + "\"");
    }
    if (!j["m"].is_number_unsigned() || !j["n"].is_number_unsigned()) {
        throw SchemaError("\"m\" and \"n\" must be nonnegative integers");
    }
    const auto m = j["m"].get<std::size_t>();
    const auto n = j["n"].get<std::size_t>();
    if (!j["kappa"].is_number()) throw SchemaError("\"kappa\" must be a number");

    ProblemInstance inst;
    inst.kappa = j["kappa"].get<double>();

    const auto& rows = j["a"];
    if (!rows.is_array() || rows.size() != m) {
        throw SchemaError("\"a\" must hold m = " + std::to_string(m) + " rows");
    }
    inst.a.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        const auto& row = rows[i];
        if (!row.is_array() || row.size() != n) {
            throw SchemaError("row " + std::to_string(i) + " of \"a\" must hold n = " + std::to_string(n) + " numbers");
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!row[k].is_number()) throw SchemaError("\"a\" holds a non-number");
            inst.a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
        }
    }
    inst.y = read_vector(j["y"], "y");
    if (j.contains("h_true") && !j["h_true"].is_null()) inst.h_true = read_vector(j["h_true"], "h_true");
    if (j.contains("sigma_z2") && !j["sigma_z2"].is_null()) {
        if (!j["sigma_z2"].is_number()) throw SchemaError("\"sigma_z2\" must be a number");
        inst.sigma_z2 = j["sigma_z2"].get<double>();
    }
    if (j.contains("seed") && !j["seed"].is_null()) {
        if (!j["seed"].is_number_unsigned()) throw SchemaError("\"seed\" must be an unsigned integer");
        inst.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("rho") && !j["rho"].is_null()) {
        if (!j["rho"].is_number()) throw SchemaError("\"rho\" must be a number");
        inst.rho = j["rho"].get<double>();
    }
    inst.validate();
    return inst;
}

}  // namespace bpdn
