#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include <json.hpp>

#include "bpdn/errors.hpp"
#include "bpdn/model.hpp"

using namespace bpdn;

namespace {

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

}  // namespace

TEST_CASE("noise variance from SNR") {
    CHECK(noise_variance_from_snr(0.0, 0.5, 10, 10) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(noise_variance_from_snr(10.0, 0.05, 512, 1024) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(noise_variance_from_snr(20.0, 0.05, 512, 1024) == doctest::Approx(0.001).epsilon(1e-14));
    CHECK(noise_variance_from_snr(std::numeric_limits<double>::infinity(), 0.05, 512, 1024) == 0.0);
}

TEST_CASE("generator shape and sparsity") {
    const auto inst = generate_instance({512, 1024, 0.05, 20.0, 0.05, 1});
    REQUIRE(inst.m() == 512);
    REQUIRE(inst.n() == 1024);
    REQUIRE(inst.h_true);
    const auto nnz = (inst.h_true->array() != 0.0).count();
    // Binomial(1024, 0.05): mean 51.2, sd about 7.
    CHECK(nnz > 51.2 - 5 * 7.0);
    CHECK(nnz < 51.2 + 5 * 7.0);
    CHECK(*inst.sigma_z2 == doctest::Approx(0.001).epsilon(1e-14));
    CHECK(inst.kappa == 0.05);
}

TEST_CASE("noiseless instance has y = A h") {
    const auto inst = generate_instance({4, 4, 1.0, std::numeric_limits<double>::infinity(), 0.05, 9});
    CHECK(*inst.sigma_z2 == 0.0);
    CHECK((inst.y - inst.a * *inst.h_true).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generator is deterministic per seed") {
    const SyntheticConfig cfg{16, 32, 0.2, 20.0, 0.05, 42};
    const auto a = generate_instance(cfg);
    const auto b = generate_instance(cfg);
    CHECK(a.a == b.a);
    CHECK(a.y == b.y);
    CHECK(*a.h_true == *b.h_true);

    auto other = cfg;
    other.seed = 43;
    CHECK(generate_instance(other).a != a.a);
}

TEST_CASE("streams are independent: the SNR only changes the noise") {
    const auto quiet = generate_instance({16, 32, 0.2, 40.0, 0.05, 5});
    const auto loud = generate_instance({16, 32, 0.2, 10.0, 0.05, 5});
    CHECK(quiet.a == loud.a);
    CHECK(*quiet.h_true == *loud.h_true);
    CHECK(quiet.y != loud.y);
    // Noise direction is shared, only its scale differs.
    const Vector zq = quiet.y - quiet.a * *quiet.h_true;
    const Vector zl = loud.y - loud.a * *loud.h_true;
    CHECK((zl - zq * std::sqrt(*loud.sigma_z2 / *quiet.sigma_z2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix entries have mean 0 and variance 1/M") {
    const auto inst = generate_instance({1000, 1000, 0.05, 20.0, 0.05, 2});
    const double count = 1e6;
    const double mean = inst.a.sum() / count;
    const double var = (inst.a.array() - mean).square().sum() / (count - 1.0);
    const double target = 1.0 / 1000.0;
    CHECK(std::abs(mean) < 5.0 * std::sqrt(target / count));
    CHECK(std::abs(var - target) < 5.0 * target * std::sqrt(2.0 / count));
}

TEST_CASE("empirical noise power follows the SNR convention") {
    const auto inst = generate_instance({2000, 400, 0.1, 10.0, 0.05, 3});
    const Vector z = inst.y - inst.a * *inst.h_true;
    const double s2 = z.squaredNorm() / 2000.0;
    // sigma^2 = (400 * 0.1 / 2000) * 0.1 = 0.002; sample variance sd = s2 * sqrt(2/2000).
    CHECK(*inst.sigma_z2 == doctest::Approx(0.002).epsilon(1e-14));
    CHECK(std::abs(s2 - 0.002) < 5.0 * 0.002 * std::sqrt(2.0 / 2000.0));
}

TEST_CASE("invalid generator configs") {
    CHECK_THROWS_AS(generate_instance({0, 4, 0.1, 20.0, 0.05, 0}), ConfigError);
    CHECK_THROWS_AS(generate_instance({4, 0, 0.1, 20.0, 0.05, 0}), ConfigError);
    CHECK_THROWS_AS(generate_instance({4, 4, 1.5, 20.0, 0.05, 0}), ConfigError);
    CHECK_THROWS_AS(generate_instance({4, 4, 0.0, 20.0, 0.05, 0}), ConfigError);
    CHECK_THROWS_AS(generate_instance({4, 4, 0.1, 20.0, -1.0, 0}), ConfigError);
}

TEST_CASE("nmse") {
    Vector h(3);
    h << 1.0, -2.0, 0.5;
    CHECK(nmse(h, h) == 0.0);
    CHECK(nmse(Vector::Zero(3), h) == doctest::Approx(1.0));

    // Per-sample ratios 0.1 and 0.3 average to 0.2.
    Vector t1(1), t2(1), e1(1), e2(1);
    t1 << 1.0;
    t2 << 1.0;
    e1 << 1.0 + std::sqrt(0.1);
    e2 << 1.0 - std::sqrt(0.3);
    const std::vector<Vector> est{e1, e2};
    const std::vector<Vector> tru{t1, t2};
    CHECK(nmse(est, tru) == doctest::Approx(0.2).epsilon(1e-14));

    CHECK_THROWS_AS(nmse(h, Vector::Zero(3)), MetricError);
    CHECK_THROWS_AS(nmse(h, Vector::Ones(2)), MetricError);
}

TEST_CASE("instance round trip") {
    const auto inst = generate_instance({6, 10, 0.3, 15.0, 0.07, 11});
    const auto path = temp_file("bpdn_test_roundtrip.json");
    save_instance(inst, path);
    const auto back = load_instance(path);
    CHECK(back.a == inst.a);
    CHECK(back.y == inst.y);
    CHECK(back.kappa == inst.kappa);
    REQUIRE(back.h_true);
    CHECK(*back.h_true == *inst.h_true);
    CHECK(back.sigma_z2 == inst.sigma_z2);
    CHECK(back.seed == inst.seed);
    CHECK(back.rho == inst.rho);
    std::filesystem::remove(path);
}

TEST_CASE("loading malformed instances") {
    const auto path = temp_file("bpdn_test_bad.json");

    write_text(path, R"({"m": 2, "n": 2, "kappa": 0.1, "a": [[1, 0], [0, 1]], "y": [1, 2, 3]})");
    CHECK_THROWS_AS(load_instance(path), SchemaError);

    write_text(path, R"({"m": 2, "n": 2, "kappa": 0.1, "a": [[1, 0], [0]], "y": [1, 2]})");
    CHECK_THROWS_AS(load_instance(path), SchemaError);

    write_text(path, R"({"m": 2, "n": 2, "a": [[1, 0], [0, 1]], "y": [1, 2]})");
    CHECK_THROWS_AS(load_instance(path), SchemaError);

    write_text(path, "{ not json");
    CHECK_THROWS_AS(load_instance(path), SchemaError);

    write_text(path, R"({"m": 2, "n": 2, "kappa": 0.1, "a": [[1, 0], [0, 1]], "y": [1, 2]})");
    const auto ok = load_instance(path);
    CHECK_FALSE(ok.h_true);
    CHECK_FALSE(ok.sigma_z2);
    CHECK(ok.y(1) == 2.0);

    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_instance(path), IoError);
}
