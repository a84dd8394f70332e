#include <doctest.h>

#include <cmath>
#include <fstream>

#include "beamsim/codebook.hpp"
#include "beamsim/config.hpp"
#include "beamsim/errors.hpp"
#include "beamsim/rng.hpp"
#include "beamsim/stats.hpp"

using namespace beamsim;

namespace {

// Brute-force ring distance: walk both directions, take the shorter.
int circ_dist_oracle(int a, int b, int B) {
    int fwd = 0, cur = a;
    while (cur != b) {
        cur = cur % B + 1;
        ++fwd;
    }
    int bwd = 0;
    cur = a;
    while (cur != b) {
        cur = cur == 1 ? B : cur - 1;
        ++bwd;
    }
    return std::min(fwd, bwd);
}

// Sort-and-interpolate percentile, written independently of the library.
double percentile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p / 100.0 * (static_cast<double>(v.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] * (1.0 - (pos - i)) + v[j] * (pos - i);
}

}  // namespace

TEST_CASE("circ_dist basics") {
    CHECK(circ_dist(1, 1, 21) == 0);
    CHECK(circ_dist(1, 21, 21) == 1);
    CHECK(circ_dist(3, 14, 21) == circ_dist_oracle(3, 14, 21));
    CHECK(circ_dist(3, 14, 21) == 10);
    CHECK_THROWS_AS(circ_dist(0, 5, 21), std::domain_error);
    CHECK_THROWS_AS(circ_dist(1, 22, 21), std::domain_error);
}

TEST_CASE("circ_dist properties against brute force") {
    Rng rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        const int B = rng.uniform_int(2, 40);
        const int a = rng.uniform_int(1, B);
        const int b = rng.uniform_int(1, B);
        const int d = circ_dist(a, b, B);
        CHECK(d == circ_dist_oracle(a, b, B));
        CHECK(d == circ_dist(b, a, B));
        CHECK(d <= B / 2);
        const int c = rng.uniform_int(1, B);
        CHECK(circ_dist(a, c, B) <= circ_dist(a, b, B) + circ_dist(b, c, B));
    }
}

TEST_CASE("zscore_row examples") {
    const std::vector<double> constant{5, 5, 5};
    for (double v : zscore_row(constant)) CHECK(v == 0.0);

    const auto two = zscore_row(std::vector<double>{0, 2});
    CHECK(two[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(two[1] == doctest::Approx(1.0).epsilon(1e-12));

    const auto four = zscore_row(std::vector<double>{1, 2, 3, 4});
    const double sd = std::sqrt(1.25);
    for (int i = 0; i < 4; ++i)
        CHECK(four[i] == doctest::Approx(((i + 1) - 2.5) / sd).epsilon(1e-12));
    CHECK(four[0] < four[1]);
    CHECK(four[2] < four[3]);

    CHECK_THROWS_AS(zscore_row(std::vector<double>{1.0}), std::domain_error);
}

TEST_CASE("zscore_row shift/scale invariance") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(2, 30);
        std::vector<double> v(n), w(n);
        const double c = rng.uniform01() * 10 + 0.1;
        const double d = rng.normal(0, 5);
        for (int i = 0; i < n; ++i) {
            v[i] = rng.normal(0, 3);
            w[i] = c * v[i] + d;
        }
        const auto zv = zscore_row(v);
        const auto zw = zscore_row(w);
        double m = 0, s2 = 0;
        for (double x : zv) m += x;
        m /= n;
        for (double x : zv) s2 += (x - m) * (x - m);
        if (zv != std::vector<double>(n, 0.0)) {
            CHECK(std::abs(m) < 1e-9);
            CHECK(std::sqrt(s2 / n) == doctest::Approx(1.0).epsilon(1e-9));
        }
        for (int i = 0; i < n; ++i) CHECK(zv[i] == doctest::Approx(zw[i]).epsilon(1e-9));
    }
}

TEST_CASE("percentile examples and oracle agreement") {
    CHECK(percentile(std::vector<double>{4}, 99.7) == 4.0);
    CHECK(percentile(std::vector<double>{1, 2, 3, 4, 5}, 50) == 3.0);
    CHECK(percentile(std::vector<double>{0, 10}, 20) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(percentile(std::vector<double>{}, 50), std::domain_error);
    CHECK_THROWS_AS(percentile(std::vector<double>{1}, -1), std::domain_error);
    CHECK_THROWS_AS(percentile(std::vector<double>{1}, 101), std::domain_error);

    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rng.uniform_int(1, 60);
        std::vector<double> v(n);
        for (auto& x : v) x = rng.uniform01() * 100;
        const double p = rng.uniform01() * 100;
        CHECK(percentile(v, p) == doctest::Approx(percentile_oracle(v, p)).epsilon(1e-12));
        CHECK(percentile(v, 0) == *std::min_element(v.begin(), v.end()));
        CHECK(percentile(v, 100) == *std::max_element(v.begin(), v.end()));
    }
}

TEST_CASE("percentile monotone in p") {
    Rng rng(123);
    std::vector<double> v(40);
    for (auto& x : v) x = rng.uniform01() * 50;
    double prev = percentile(v, 0);
    for (double p = 1; p <= 100; p += 1) {
        const double cur = percentile(v, p);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("codebook validation") {
    CHECK_THROWS_AS(Codebook(1), std::domain_error);
    const Codebook cb(21);
    CHECK(cb.contains(1));
    CHECK(cb.contains(21));
    CHECK_FALSE(cb.contains(0));
    CHECK_FALSE(cb.contains(22));
}

TEST_CASE("policy config validation") {
    PolicyConfig c;
    CHECK_NOTHROW(c.validate());
    c.lambda = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PolicyConfig{};
    c.K_mid = c.K_max;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PolicyConfig{};
    c.H_low = c.H_high;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PolicyConfig{};
    c.delta = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("temperature config validation") {
    TemperatureConfig t;
    CHECK_NOTHROW(t.validate());
    t.T_min = 2.0;
    t.T0 = 1.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
    t = TemperatureConfig{};
    t.s_min = 0.0;
    CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("config file round trip and unknown keys") {
    const char* path = "test_cfg.json";
    {
        std::ofstream out(path);
        out << R"({"policy": {"lambda": 0.25, "K_max": 5}, "temperature": {"T0": 1.5, "T_max": 4.0}})";
    }
    const auto cfg = load_config_file(path);
    const auto pc = policy_config_from_json(cfg.at("policy"));
    CHECK(pc.lambda == 0.25);
    CHECK(pc.K_max == 5);
    const auto tc = temperature_config_from_json(cfg.at("temperature"));
    CHECK(tc.T0 == 1.5);

    {
        std::ofstream out(path);
        out << R"({"policy": {"lamda": 0.25}})";  // misspelled key
    }
    const auto bad = load_config_file(path);
    CHECK_THROWS_AS(policy_config_from_json(bad.at("policy")), ConfigError);

    {
        std::ofstream out(path);
        out << R"({"polcy": {}})";
    }
    CHECK_THROWS_AS(load_config_file(path), ConfigError);
    std::remove(path);
}

TEST_CASE("rng determinism and substreams") {
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng s1 = Rng::substream(5, 1);
    Rng s2 = Rng::substream(5, 2);
    CHECK(s1.next_u64() != s2.next_u64());
    for (int i = 0; i < 1000; ++i) {
        const double u = Rng(i).uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const int k = Rng(i).uniform_int(3, 9);
        CHECK(k >= 3);
        CHECK(k <= 9);
    }
}
