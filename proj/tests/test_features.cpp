#include <cmath>
#include <cstring>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "ozone/features.hpp"

using namespace ozone;

namespace {

HourlySeries make_series(std::string name, const Eigen::VectorXd& v) {
    return {std::move(name), HourlyStamp::from_civil(2010, 1, 1, 0), v};
}

AmiCurve curve_of(const std::vector<double>& bits) {
    AmiCurve c{"x", {}};
    for (std::size_t i = 0; i < bits.size(); ++i) c.points.push_back({static_cast<int>(i), bits[i]});
    return c;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("AMI of a perfectly dependent 2x2 table is one bit") {
    const std::vector<double> x{0, 0, 1, 1, 0, 1};
    CHECK(ami(x, x, AmiConfig{2, 2}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("AMI matches the double-sum oracle") {
    oracle::Gen g(41);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<std::size_t>(g.integer(2, 3000));
        const int nx = g.integer(2, 24), ny = g.integer(2, 24);
        auto x = g.uniforms(n, -5, 5);
        std::vector<double> y(n);
        const double coupling = g.uniform(0, 2);
        for (std::size_t i = 0; i < n; ++i) y[i] = coupling * x[i] * x[i] + g.normal();
        x[0] = -5.5;
        x[1] = 7.0;
        y[0] = -30.0;
        y[1] = 50.0;
        CHECK(oracle::rel_err(ami(x, y, {nx, ny}), oracle::ami(x, y, nx, ny)) < 1e-12);
    }
}

TEST_CASE("AMI of a series with itself is its binned entropy") {
    oracle::Gen g(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = g.uniforms(static_cast<std::size_t>(g.integer(10, 5000)), 0, 1);
        const int bins = g.integer(2, 32);
        CHECK(std::fabs(ami(x, x, {bins, bins}) - oracle::entropy(x, bins)) < 1e-12);
    }
}

TEST_CASE("AMI is symmetric, non-negative and invariant to positive affine maps") {
    oracle::Gen g(47);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<std::size_t>(g.integer(2, 2000));
        std::vector<double> x(n), y(n), x2(n);
        for (std::size_t i = 0; i < n; ++i) {
            // multiples of 1/8 keep 2x + 3 exact in binary floating point
            x[i] = g.integer(-400, 400) / 8.0;
            y[i] = g.uniform(0, 1) < 0.5 ? x[i] + g.normal() : g.normal();
            x2[i] = 2.0 * x[i] + 3.0;
        }
        x[0] = -60;
        x[1] = 60;
        x2[0] = 2.0 * x[0] + 3.0;
        x2[1] = 2.0 * x[1] + 3.0;
        const int nx = g.integer(2, 20), ny = g.integer(2, 20);
        const double a = ami(x, y, {nx, ny});
        CHECK(a >= 0.0);
        CHECK(std::fabs(a - ami(y, x, {ny, nx})) < 1e-12);
        CHECK(std::fabs(a - ami(x2, y, {nx, ny})) < 1e-12);
    }
}

TEST_CASE("AMI of independent uniforms is near zero") {
    oracle::Gen g(53);
    const auto x = g.uniforms(100000, 0, 1);
    const auto y = g.uniforms(100000, 0, 1);
    CHECK(ami(x, y) < 0.02);
}

TEST_CASE("AMI drops missing pairs and reports degenerate input") {
    const std::vector<double> x{1, 2, kMissing, 4, 5};
    const std::vector<double> y{1, kMissing, 3, 4, 5};
    const std::vector<double> xs{1, 4, 5}, ys{1, 4, 5};
    CHECK(ami(x, y, {4, 4}) == ami(xs, ys, {4, 4}));
    CHECK_THROWS_AS(ami(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DataError);
    CHECK_THROWS_AS(ami(std::vector<double>{1}, std::vector<double>{1}), DataError);
    CHECK_THROWS_AS(ami(std::vector<double>{1, 2}, std::vector<double>{1, 2}, {1, 4}), ConfigError);
}

TEST_CASE("bin probabilities sum to one") {
    oracle::Gen g(59);
    const auto x = g.uniforms(1000, -3, 9);
    const double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end());
    std::vector<int> counts(16, 0);
    for (double v : x) {
        const int b = equal_width_bin(v, lo, hi, 16);
        REQUIRE(b >= 0);
        REQUIRE(b < 16);
        ++counts[static_cast<std::size_t>(b)];
    }
    double total = 0;
    for (int c : counts) total += c / 1000.0;
    CHECK(std::fabs(total - 1.0) < 1e-12);
    CHECK(equal_width_bin(hi, lo, hi, 16) == 15);
    CHECK(equal_width_bin(lo, lo, hi, 16) == 0);
}

TEST_CASE("AMI curve has one point per lag and peaks at the true delay") {
    oracle::Gen g(61);
    const Eigen::Index n = 3000;
    Eigen::VectorXd x(n), y(n);
    for (auto& v : x) v = g.normal();
    for (Eigen::Index t = 0; t < n; ++t) y[t] = t >= 30 ? x[t - 30] : g.normal();
    const auto curve = ami_curve(make_series("x", x), make_series("y", y), 72);
    REQUIRE(curve.points.size() == 73);
    const auto best = std::max_element(curve.points.begin(), curve.points.end(),
                                       [](const AmiPoint& a, const AmiPoint& b) { return a.bits < b.bits; });
    CHECK(best->lag == 30);

    for (int lag : {0, 5, 72}) {
        const auto L = static_cast<std::size_t>(lag);
        const std::vector<double> xs(x.data(), x.data() + n - L), ys(y.data() + L, y.data() + n);
        CHECK(curve.points[L].bits == doctest::Approx(oracle::ami(xs, ys, 16, 16)).epsilon(1e-12));
    }
}

TEST_CASE("a self-paired curve is maximal at lag zero") {
    oracle::Gen g(67);
    Eigen::VectorXd x(2000);
    double s = 0;
    for (auto& v : x) v = s = 0.9 * s + g.normal();
    const auto curve = ami_curve(make_series("x", x), make_series("x", x), 72);
    for (std::size_t i = 1; i < curve.points.size(); ++i) CHECK(curve.points[i].bits < curve.points[0].bits);
}

TEST_CASE("AMI curve errors carry the lag") {
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(100, 0, 1);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(100, 0, 1);
    for (Eigen::Index i = 50; i < 100; ++i) x[i] = kMissing;
    y.head(60).setConstant(kMissing);
    try {
        ami_curve(make_series("x", x), make_series("y", y), 20);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("lag 0") != std::string::npos);
    }
    HourlySeries shifted = make_series("y", y);
    shifted.start = shifted.start + 1;
    CHECK_THROWS_AS(ami_curve(make_series("x", x), shifted, 5), IntegrityError);
}

TEST_CASE("lag selection prefers local maxima") {
    std::vector<double> bits(73, 0.1);
    bits[24] = 0.9;
    CHECK(select_lags(curve_of(bits), 1).lags == std::vector<int>{24});

    std::vector<double> peaks(73);
    for (int l = 0; l <= 72; ++l) peaks[l] = 1.0 - l / 100.0 + 0.3 * std::cos(2 * std::numbers::pi * l / 24.0);
    CHECK(select_lags(curve_of(peaks), 3).lags == std::vector<int>{0, 24, 48});

    std::vector<double> falling(73);
    for (int l = 0; l <= 72; ++l) falling[l] = 1.0 / (1 + l);
    CHECK(select_lags(curve_of(falling), 2).lags == std::vector<int>{0, 1});

    std::vector<double> flat(5, 0.5);
    CHECK(select_lags(curve_of(flat), 2).lags == std::vector<int>{0, 1});  // ties to the smaller lag
    CHECK_THROWS_AS(select_lags(curve_of(flat), 6), ConfigError);
    CHECK_THROWS_AS(select_lags(curve_of(flat), 0), ConfigError);
}

TEST_CASE("lag selection agrees with a brute-force ranking") {
    oracle::Gen g(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int len = g.integer(1, 73);
        std::vector<double> bits(static_cast<std::size_t>(len));
        for (auto& b : bits) b = g.integer(0, 6) / 4.0;  // coarse values force ties
        const int k = g.integer(1, len);
        const auto got = select_lags(curve_of(bits), k);

        std::vector<std::tuple<int, double, int>> ranked;  // (not-a-peak, -bits, lag)
        for (int i = 0; i < len; ++i) {
            const bool left = i == 0 || bits[i] > bits[i - 1];
            const bool right = i == len - 1 || bits[i] > bits[i + 1];
            ranked.emplace_back(left && right ? 0 : 1, -bits[i], i);
        }
        std::sort(ranked.begin(), ranked.end());
        std::vector<int> expected;
        for (int i = 0; i < k; ++i) expected.push_back(std::get<2>(ranked[i]));
        std::sort(expected.begin(), expected.end());
        CHECK(got.lags == expected);
        CHECK(std::is_sorted(got.lags.begin(), got.lags.end()));
    }
}

TEST_CASE("time indices") {
    const auto t0 = time_indices(HourlyStamp::from_civil(2024, 1, 1, 0));
    CHECK(t0.hour_sin == 0.0);
    CHECK(t0.hour_cos == 1.0);
    CHECK(t0.weekday == 1);
    const auto t6 = time_indices(HourlyStamp::from_civil(2024, 1, 7, 6));
    CHECK(std::fabs(t6.hour_sin - 1.0) < 1e-12);
    CHECK(std::fabs(t6.hour_cos) < 1e-12);
    CHECK(t6.weekday == 7);
    for (int h = 0; h < 24 * 14; ++h) {
        const auto ti = time_indices(HourlyStamp::from_civil(2015, 6, 1, 0) + h);
        CHECK(std::fabs(ti.hour_sin * ti.hour_sin + ti.hour_cos * ti.hour_cos - 1.0) < 1e-12);
    }
    CHECK(scaled_weekday(1) == -1.0);
    CHECK(scaled_weekday(7) == 1.0);
}

TEST_CASE("design matrix window arithmetic") {
    Dataset d(HourlyStamp::from_civil(2010, 1, 1, 0), 100);
    d.add("o3", Eigen::VectorXd::LinSpaced(100, 0, 99));
    FeatureSpec spec;
    spec.predictors = {{"o3", {0, 24, 48}}};
    const auto dm = build_design_matrix(d, spec);
    CHECK(dm.inputs.cols() == 3);
    CHECK(dm.rows() == 28);
    CHECK(dm.issue_stamps.front() == d.start() + 48);
    CHECK(dm.issue_stamps.back() == d.last() - 24);
    CHECK(dm.targets[0] == 72.0);
    CHECK(dm.inputs.row(0) == Eigen::RowVector3d(48, 24, 0));
}

TEST_CASE("column count for O3+NO2+TI") {
    FeatureSpec spec;
    spec.predictors = {{"o3", {0, 24, 48}}, {"no2", {1, 2, 3}}};
    spec.include_time_indices = true;
    CHECK(spec.input_count() == 9);
    CHECK(spec.column_names() ==
          std::vector<std::string>{"o3@0", "o3@24", "o3@48", "no2@1", "no2@2", "no2@3", "weekday", "hour_sin",
                                   "hour_cos"});
    spec.horizon = 12;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("design matrix entries match independent lookups") {
    oracle::Gen g(73);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = g.integer(80, 400);
        const auto start = HourlyStamp::from_hours(g.integer(300000, 400000));
        Dataset d(start, n);
        for (const char* name : {"o3", "no2", "temp"}) {
            Eigen::VectorXd v(n);
            for (auto& x : v) x = g.uniform(0, 1) < 0.03 ? kMissing : g.normal();
            d.add(name, v);
        }
        FeatureSpec spec;
        for (const char* name : {"o3", "no2", "temp"}) {
            if (std::string(name) != "o3" && g.uniform(0, 1) < 0.4) continue;
            std::vector<int> lags;
            for (int l = 0; l <= 50; ++l) {
                if (g.uniform(0, 1) < 0.08) lags.push_back(l);
            }
            if (lags.empty()) lags.push_back(g.integer(0, 50));
            spec.predictors.push_back({name, lags});
        }
        spec.include_time_indices = g.uniform(0, 1) < 0.5;
        DesignMatrix dm;
        try {
            dm = build_design_matrix(d, spec);
        } catch (const DataError&) {
            continue;
        }

        // brute-force row enumeration
        std::vector<HourlyStamp> expected_rows;
        for (Eigen::Index t = 0; t < n; ++t) {
            bool ok = t + 24 < n && !is_missing(d.series("o3").values[t + 24]);
            for (const auto& p : spec.predictors) {
                for (int l : p.lags) ok = ok && t - l >= 0 && !is_missing(d.series(p.predictor).values[t - l]);
            }
            if (ok) expected_rows.push_back(d.stamp(t));
        }
        REQUIRE(dm.issue_stamps == expected_rows);

        for (Eigen::Index r = 0; r < dm.rows(); ++r) {
            const auto t = *d.index_of(dm.issue_stamps[static_cast<std::size_t>(r)]);
            Eigen::Index c = 0;
            for (const auto& p : spec.predictors) {
                for (int l : p.lags) {
                    const double want = d.series(p.predictor).values[t - l];
                    CHECK(std::memcmp(&dm.inputs(r, c), &want, sizeof(double)) == 0);
                    ++c;
                }
            }
            if (spec.include_time_indices) {
                const auto valid = d.stamp(t + 24);
                CHECK(dm.inputs(r, c) == 2.0 * (valid.weekday() - 1) / 6.0 - 1.0);
                CHECK(dm.inputs(r, c + 1) == std::sin(2 * std::numbers::pi * valid.hour() / 24.0));
                CHECK(dm.inputs(r, c + 2) == std::cos(2 * std::numbers::pi * valid.hour() / 24.0));
            }
            CHECK(dm.targets[r] == d.series("o3").values[t + 24]);
        }
    }
}

TEST_CASE("a span too short for the window is an error") {
    Dataset d(HourlyStamp::from_civil(2010, 1, 1, 0), 60);
    d.add("o3", Eigen::VectorXd::Ones(60));
    FeatureSpec spec;
    spec.predictors = {{"o3", {0, 48}}};
    CHECK_THROWS_AS(build_design_matrix(d, spec), DataError);
}

TEST_CASE("shift_forward") {
    const auto s = make_series("x", Eigen::Vector4d(1, 2, 3, 4));
    const auto f = shift_forward(s, 2);
    CHECK(f.values[0] == 3);
    CHECK(f.values[1] == 4);
    CHECK(is_missing(f.values[2]));
    CHECK(is_missing(f.values[3]));
}

}  // TEST_SUITE
