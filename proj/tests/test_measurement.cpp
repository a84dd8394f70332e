#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "beamsim/measurement.hpp"
#include "beamsim/rng.hpp"
#include "beamsim/stats.hpp"

using namespace beamsim;

namespace {

double percentile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p / 100.0 * (static_cast<double>(v.size()) - 1.0);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    const std::size_t j = std::min(i + 1, v.size() - 1);
    return v[i] * (1.0 - (pos - i)) + v[j] * (pos - i);
}

double proxy_oracle(const std::vector<double>& v, double eps = 1e-12) {
    return 10.0 * std::log10(percentile_oracle(v, 99.7) / (percentile_oracle(v, 20.0) + eps));
}

}  // namespace

TEST_CASE("snr proxy examples") {
    // equal signal and noise percentiles cancel
    CHECK(snr_proxy_db(std::vector<double>{1, 1, 1, 1}, 99.7, 20.0, 0.0) == 0.0);

    // ratio of 100 reads as 20 dB: 20th percentile pinned by the low block
    std::vector<double> v(100, 1.0);
    for (int i = 0; i < 60; ++i) v[i] = 100.0;  // perc20 = 1, perc99.7 = 100
    CHECK(snr_proxy_db(v, 99.7, 20.0, 0.0) == doctest::Approx(20.0).epsilon(1e-9));

    CHECK_THROWS_AS(snr_proxy_db(std::vector<double>{}, 99.7, 20.0, 1e-12), std::domain_error);
    CHECK_THROWS_AS(snr_proxy_db(std::vector<double>{1.0}, 20.0, 99.7, 1e-12), std::domain_error);

    // dead recording reads as 0 dB, not -inf
    CHECK(snr_proxy_db(std::vector<double>{0, 0, 0, 0}) == 0.0);
}

TEST_CASE("snr proxy matches the sort-and-interpolate oracle on constructed draws") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const double sig = rng.uniform01() * 50.0;
        std::vector<double> v(1000);
        // half pilot samples, half floor samples
        for (int i = 0; i < 1000; ++i)
            v[i] = rng.exponential(i < 500 ? 1.0 + sig : 1.0);
        CHECK(snr_proxy_db(v) == doctest::Approx(proxy_oracle(v)).epsilon(1e-9));
    }
}

TEST_CASE("snr proxy scale invariance and percentile monotonicity") {
    Rng rng(11);
    std::vector<double> v(400);
    for (auto& x : v) x = rng.exponential(3.0);
    const double base = snr_proxy_db(v, 99.7, 20.0, 0.0);
    for (double c : {0.01, 0.5, 7.0, 1234.5}) {
        std::vector<double> w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = c * v[i];
        CHECK(snr_proxy_db(w, 99.7, 20.0, 0.0) == doctest::Approx(base).epsilon(1e-9));
    }
    double prev = snr_proxy_db(v, 30.0, 20.0, 0.0);
    for (double ps : {45.0, 60.0, 80.0, 95.0, 99.7}) {
        const double cur = snr_proxy_db(v, ps, 20.0, 0.0);
        CHECK(cur >= prev - 1e-12);
        prev = cur;
    }
}

TEST_CASE("oracle beam selection") {
    CHECK(oracle_beam(std::vector<double>{0, 5, 3}) == 2);
    CHECK(oracle_beam(std::vector<double>{7, 7, 1}) == 1);  // tie -> lowest index
    CHECK_THROWS_AS(oracle_beam(std::vector<double>{1.0, std::nan("")}), std::domain_error);

    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> row(21);
        for (auto& x : row) x = rng.normal(0, 10);
        int best = 1;
        for (int b = 2; b <= 21; ++b)
            if (row[b - 1] > row[best - 1]) best = b;
        CHECK(oracle_beam(row) == best);
        // strictly increasing transforms keep the winner
        std::vector<double> warped(21);
        for (int b = 0; b < 21; ++b) warped[b] = std::tanh(row[b] / 20.0) * 3.0 + 1.0;
        CHECK(oracle_beam(warped) == best);
    }
}

TEST_CASE("hybrid target blending") {
    const std::vector<double> r{1.0, 4.0, 2.0};
    const std::vector<double> prior{0.2, 0.5, 0.3};

    const auto all_iq = hybrid_target(r, prior, 1.0);
    const auto zi = zscore_row(r);
    for (int i = 0; i < 3; ++i) CHECK(all_iq.values[i] == doctest::Approx(zi[i]).epsilon(1e-12));

    const auto all_prior = hybrid_target(r, prior, 0.0);
    const auto zp = zscore_row(prior);
    for (int i = 0; i < 3; ++i)
        CHECK(all_prior.values[i] == doctest::Approx(zp[i]).epsilon(1e-12));

    // constant prior degenerates to zeros, halving the IQ term
    const auto half = hybrid_target(std::vector<double>{0.0, 2.0}, std::vector<double>{0.5, 0.5}, 0.5);
    CHECK(half.values[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(half.values[1] == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(hybrid_target(r, std::vector<double>{0.5, 0.5}, 0.5), std::domain_error);
    CHECK_THROWS_AS(hybrid_target(r, std::vector<double>{0.2, 0.2, 0.2}, 0.5), std::domain_error);
}

TEST_CASE("hybrid target keeps the IQ argmax under a constant prior") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> r(8);
        for (auto& x : r) x = rng.normal(0, 4);
        const std::vector<double> uniform(8, 1.0 / 8.0);
        const double alpha = 0.05 + 0.95 * rng.uniform01();
        const auto h = hybrid_target(r, uniform, alpha);
        CHECK(argmax_index(h.values) == argmax_index(r));
    }
}

TEST_CASE("p2 objective") {
    SweepOutcome o;
    o.snr_lock_db = 10.0;
    o.K = 2;
    o.outage = false;
    CHECK(p2_objective(std::vector<SweepOutcome>{o}, 1.0, 5.0, 0.0) == doctest::Approx(8.0));

    Rng rng(8);
    std::vector<SweepOutcome> outs(100);
    for (auto& x : outs) {
        x.snr_lock_db = rng.normal(8, 6);
        x.K = rng.uniform_int(1, 5);
        x.outage = x.snr_lock_db < 0.0;
    }
    // penalties vanish
    double m = 0;
    for (const auto& x : outs) m += x.snr_lock_db;
    CHECK(p2_objective(outs, 0.0, 0.0, 0.0) == doctest::Approx(m / 100).epsilon(1e-12));

    // independent loop-and-average oracle
    const double cK = 0.3, cOut = 2.5, theta = 1.0;
    double acc = 0;
    for (const auto& x : outs) acc += x.snr_lock_db - cK * x.K - (x.snr_lock_db < theta ? cOut : 0.0);
    CHECK(p2_objective(outs, cK, cOut, theta) == doctest::Approx(acc / 100).epsilon(1e-12));

    CHECK_THROWS_AS(p2_objective(std::vector<SweepOutcome>{}, 1, 1, 0), std::domain_error);
}

TEST_CASE("reward row invariant") {
    const auto row = RewardRow::from_values(3, {1.0, 9.0, 9.0, 2.0});
    CHECK(row.oracle == 2);
    CHECK(row.t == 3);
    CHECK_THROWS_AS(RewardRow::from_values(0, {1.0, std::nan("")}), std::domain_error);
}
