#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "beamsim/dataset.hpp"
#include "beamsim/errors.hpp"
#include "beamsim/measurement.hpp"
#include "beamsim/rng.hpp"

using namespace beamsim;

TEST_CASE("sweep record cross-field contract") {
    SweepRecord s;
    s.t = 0;
    CHECK_THROWS_AS(s.validate(3), std::domain_error);  // neither field present

    s.reward_row = std::vector<double>{1.0, 5.0, 2.0};
    s.oracle_beam = 2;
    CHECK_NOTHROW(s.validate(3));

    s.oracle_beam = 1;  // not the argmax
    CHECK_THROWS_AS(s.validate(3), std::domain_error);
    s.oracle_beam = 2;

    // consistent iq alongside the row
    Rng rng(5);
    std::vector<std::vector<double>> iq(3);
    std::vector<double> row(3);
    for (int b = 0; b < 3; ++b) {
        iq[b].resize(64);
        for (auto& x : iq[b]) x = rng.exponential(1.0 + b);
        row[b] = snr_proxy_db(iq[b]);
    }
    SweepRecord both;
    both.iq_power = iq;
    both.reward_row = row;
    both.oracle_beam = oracle_beam(row);
    CHECK_NOTHROW(both.validate(3));

    (*both.reward_row)[0] += 1e-6;  // out of tolerance with the proxy
    CHECK_THROWS_AS(both.validate(3), std::domain_error);
}

TEST_CASE("feature stats standardize train columns and freeze constants") {
    SynthDataset ds;
    ds.B = 2;
    for (int t = 0; t < 50; ++t) {
        SweepRecord s;
        s.t = t;
        s.features = {static_cast<double>(t), 1.0, -0.5 * t};
        s.reward_row = std::vector<double>{0.0, 1.0};
        s.oracle_beam = 2;
        ds.sweeps.push_back(s);
    }
    const auto stats = fit_feature_stats(ds);
    CHECK(stats.mean[1] == doctest::Approx(1.0));
    CHECK(stats.std[1] == doctest::Approx(0.0));
    const auto z = stats.apply(ds.sweeps[10].features);
    CHECK(z[1] == 0.0);  // constant column maps to zero
    double m0 = 0, v0 = 0;
    for (const auto& s : ds.sweeps) m0 += stats.apply(s.features)[0];
    m0 /= 50;
    for (const auto& s : ds.sweeps) {
        const double c = stats.apply(s.features)[0] - m0;
        v0 += c * c;
    }
    CHECK(std::abs(m0) < 1e-9);
    CHECK(std::sqrt(v0 / 50) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("csv round trip preserves rewards, features, and labels") {
    SynthDataset ds;
    ds.B = 4;
    ds.layout.bins_per_modality = 4;
    ds.split = "test";
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        SweepRecord s;
        s.t = t;
        s.features.resize(ds.layout.dim());
        for (auto& x : s.features) x = rng.normal(0, 1);
        std::vector<double> row(4);
        for (auto& x : row) x = rng.normal(10, 5);
        s.oracle_beam = oracle_beam(row);
        s.reward_row = row;
        ds.sweeps.push_back(s);
    }
    ds.norm_stats = fit_feature_stats(ds);
    write_dataset("rt_ds", ds);

    const auto back = read_dataset("rt_ds");
    REQUIRE(back.sweeps.size() == ds.sweeps.size());
    CHECK(back.B == 4);
    CHECK(back.split == "test");
    REQUIRE(back.norm_stats.has_value());
    for (std::size_t i = 0; i < ds.sweeps.size(); ++i) {
        CHECK(back.sweeps[i].t == ds.sweeps[i].t);
        CHECK(*back.sweeps[i].oracle_beam == *ds.sweeps[i].oracle_beam);
        for (int b = 0; b < 4; ++b)
            CHECK((*back.sweeps[i].reward_row)[b] == (*ds.sweeps[i].reward_row)[b]);
        for (std::size_t k = 0; k < ds.sweeps[i].features.size(); ++k)
            CHECK(back.sweeps[i].features[k] == ds.sweeps[i].features[k]);
    }
    for (const auto& suffix : {".rewards.csv", ".features.csv", ".meta.json"})
        std::remove((std::string("rt_ds") + suffix).c_str());
}

TEST_CASE("import rejects malformed csv") {
    {
        std::ofstream out("bad.csv");
        out << "beam_1,beam_2\n1.0,2.0\n";
    }
    CHECK_THROWS_AS(import_csv("bad.csv", ""), ConfigError);
    std::remove("bad.csv");
    CHECK_THROWS_AS(import_csv("missing_file.csv", ""), ConfigError);
}
