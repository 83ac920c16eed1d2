#include <cstring>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "ozone/timeseries.hpp"

using namespace ozone;

namespace {

Dataset parse(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

std::string serialize(const Dataset& d) {
    std::ostringstream out;
    write_csv(d, out);
    return out.str();
}

Dataset random_years(oracle::Gen& g, int start_year, int years, double missing_rate) {
    const auto start = HourlyStamp::from_civil(start_year, 1, 1, 0);
    const auto n = HourlyStamp::from_civil(start_year + years, 1, 1, 0) - start;
    Dataset d(start, n);
    for (const char* name : {"a", "b"}) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = g.uniform(0, 100) < 100 * missing_rate ? kMissing : g.normal(50, 10);
        d.add(name, v);
    }
    return d;
}

// Mean over every stamp with the same (pooled) day of year and hour.
double brute_slot_mean(const Dataset& d, const std::string& var, int doy, int hour) {
    const auto& v = d.series(var).values;
    double sum = 0;
    int count = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        const auto s = d.stamp(i);
        if (std::min(s.day_of_year(), 365) == doy && s.hour() == hour && !is_missing(v[i])) {
            sum += v[i];
            ++count;
        }
    }
    return count ? sum / count : kMissing;
}

}  // namespace

TEST_SUITE("timeseries") {

TEST_CASE("stamps follow the proleptic Gregorian calendar") {
    const auto s = HourlyStamp::parse("2012-02-29T23:00");
    CHECK(s.year() == 2012);
    CHECK(s.month() == 2);
    CHECK(s.day() == 29);
    CHECK(s.day_of_year() == 60);
    CHECK(s.hour() == 23);
    CHECK((s + 1).to_string() == "2012-03-01T00:00");
    CHECK(HourlyStamp::parse("2012-12-31T05:00").day_of_year() == 366);
    CHECK(HourlyStamp::parse("2024-01-01T00:00").weekday() == 1);  // Monday
    CHECK(HourlyStamp::parse("2024-01-07T12:00").weekday() == 7);  // Sunday
    CHECK(HourlyStamp::parse("1999-12-31T23:00").weekday() == 5);  // Friday
    CHECK(s.add_years(1).to_string() == "2013-03-01T23:00");
    CHECK(HourlyStamp::parse("2010-07-04T08:00").add_years(2).to_string() == "2012-07-04T08:00");
}

TEST_CASE("weekday advances by one every 24 hours across a long span") {
    auto s = HourlyStamp::from_civil(1900, 1, 1, 0);  // a Monday
    CHECK(s.weekday() == 1);
    for (int day = 0; day < 50000; ++day, s = s + 24) CHECK_EQ(s.weekday(), day % 7 + 1);
}

TEST_CASE("timestamp round-trips through text") {
    oracle::Gen g(7);
    for (int k = 0; k < 2000; ++k) {
        const auto s = HourlyStamp::from_hours(g.integer(-2000000, 2000000));
        CHECK(HourlyStamp::parse(s.to_string()) == s);
    }
}

TEST_CASE("malformed timestamps are rejected") {
    CHECK_THROWS_AS(HourlyStamp::parse("2010-02-30T00:00"), ParseError);
    CHECK_THROWS_AS(HourlyStamp::parse("2010-01-01 00:00"), ParseError);
    CHECK_THROWS_AS(HourlyStamp::parse("2010-01-01T24:00"), ParseError);
    CHECK_THROWS_AS(HourlyStamp::parse("2010-01-01T03:30"), ParseError);
}

TEST_CASE("empty cells become missing values") {
    const auto d = parse("timestamp,o3\n2010-01-01T00:00,10\n2010-01-01T01:00,\n2010-01-01T02:00,12\n");
    REQUIRE(d.size() == 3);
    const auto& v = d.series("o3").values;
    CHECK(v[0] == 10);
    CHECK(is_missing(v[1]));
    CHECK(v[2] == 12);
}

TEST_CASE("absent rows are inserted as all-missing") {
    const auto d = parse("timestamp,o3,no2\n2010-01-01T01:00,1,2\n2010-01-01T03:00,3,4\n");
    REQUIRE(d.size() == 3);
    CHECK(d.stamp(1).to_string() == "2010-01-01T02:00");
    CHECK(is_missing(d.series("o3").values[1]));
    CHECK(is_missing(d.series("no2").values[1]));
}

TEST_CASE("duplicate and non-monotone stamps are integrity errors") {
    CHECK_THROWS_AS(parse("timestamp,o3\n2010-01-01T01:00,1\n2010-01-01T01:00,2\n"), IntegrityError);
    CHECK_THROWS_AS(parse("timestamp,o3\n2010-01-01T02:00,1\n2010-01-01T01:00,2\n"), IntegrityError);
}

TEST_CASE("parse errors name the offending row") {
    try {
        parse("timestamp,o3\n2010-01-01T00:00,1\n2010-01-01X01:00,2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("timestamp,o3\n2010-01-01T00:00,abc\n"), ParseError);
    CHECK_THROWS_AS(parse("time,o3\n2010-01-01T00:00,1\n"), ParseError);
    CHECK_THROWS_AS(parse("timestamp,o3\n"), DataError);
    CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("schema selects and requires columns") {
    std::istringstream in("timestamp,o3,no2\n2010-01-01T00:00,1,2\n");
    const auto d = parse_csv(in, {"no2"});
    CHECK(d.names() == std::vector<std::string>{"no2"});
    std::istringstream in2("timestamp,o3\n2010-01-01T00:00,1\n");
    CHECK_THROWS(parse_csv(in2, {"no2"}));
}

TEST_CASE("ingest then re-serialization reproduces values bit-exactly") {
    oracle::Gen g(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto start = HourlyStamp::from_civil(2010, 3, 1, 0);
        const Eigen::Index n = g.integer(2, 200);
        Dataset d(start, n);
        for (const char* name : {"x", "y"}) {
            Eigen::VectorXd v(n);
            for (auto& x : v) x = g.uniform(0, 1) < 0.1 ? kMissing : g.normal(0, 1e3) * std::pow(10.0, g.integer(-8, 8));
            d.add(name, v);
        }
        const auto text = serialize(d);
        const auto back = parse(text);
        REQUIRE(back.size() == n);
        for (const char* name : {"x", "y"}) {
            const auto& a = d.series(name).values;
            const auto& b = back.series(name).values;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (is_missing(a[i])) {
                    CHECK(is_missing(b[i]));
                } else {
                    CHECK(std::memcmp(&a[i], &b[i], sizeof(double)) == 0);
                }
            }
        }
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("imputation uses the same day and hour across years") {
    const auto start = HourlyStamp::from_civil(2009, 1, 1, 0);
    const auto n = HourlyStamp::from_civil(2012, 1, 1, 0) - start;
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0);
    const auto at = [&](int year) {
        return HourlyStamp::from_civil(year, 4, 10, 6) - start;  // day 100, hour 6
    };
    REQUIRE(HourlyStamp::from_civil(2009, 4, 10, 6).day_of_year() == 100);
    v[at(2009)] = 8;
    v[at(2010)] = kMissing;
    v[at(2011)] = 12;
    Dataset d(start, n);
    d.add("o3", v);
    const auto out = impute_missing(d);
    CHECK(out.series("o3").values[at(2010)] == 10.0);
}

TEST_CASE("imputation without missing values is the identity") {
    oracle::Gen g(3);
    const auto d = random_years(g, 2009, 2, 0.0);
    const auto out = impute_missing(d);
    CHECK(out.series("a").values == d.series("a").values);
    CHECK(out.series("b").values == d.series("b").values);
}

TEST_CASE("slots missing in every year need the hour-of-day fallback") {
    oracle::Gen g(5);
    auto d = random_years(g, 2009, 2, 0.0);
    Eigen::VectorXd v = d.series("a").values;
    for (int year : {2009, 2010}) v[HourlyStamp::from_civil(year, 1, 5, 3) - d.start()] = kMissing;
    d = d.with_values("a", v);

    try {
        impute_missing(d);
        FAIL("expected UnresolvableSlotError");
    } catch (const UnresolvableSlotError& e) {
        REQUIRE(e.slots().size() == 1);
        CHECK(e.slots()[0].variable == "a");
        CHECK(e.slots()[0].day_of_year == 5);
        CHECK(e.slots()[0].hour == 3);
    }

    const auto out = impute_missing(d, ImputeOptions{true});
    double sum = 0;
    int count = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d.stamp(i).hour() == 3 && !is_missing(v[i])) {
            sum += v[i];
            ++count;
        }
    }
    const double expected = sum / count;
    CHECK(out.series("a").values[HourlyStamp::from_civil(2009, 1, 5, 3) - d.start()] == doctest::Approx(expected).epsilon(1e-13));
    CHECK(out.series("a").values[HourlyStamp::from_civil(2010, 1, 5, 3) - d.start()] == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("imputation properties on random multi-year data") {
    oracle::Gen g(17);
    for (int trial = 0; trial < 4; ++trial) {
        const int start_year = g.integer(2000, 2010);
        const auto d = random_years(g, start_year, 3, g.uniform(0.0, 0.2));
        const auto once = impute_missing(d, ImputeOptions{true});
        const auto twice = impute_missing(once, ImputeOptions{true});
        for (const char* name : {"a", "b"}) {
            const auto& raw = d.series(name).values;
            const auto& a = once.series(name).values;
            CHECK(a.allFinite());
            CHECK(twice.series(name).values == a);  // idempotent
            int probes = 0;
            for (Eigen::Index i = 0; i < d.size(); ++i) {
                if (!is_missing(raw[i])) {
                    CHECK(a[i] == raw[i]);
                } else if (probes++ < 30) {
                    const auto s = d.stamp(i);
                    const double expected = brute_slot_mean(d, name, std::min(s.day_of_year(), 365), s.hour());
                    if (!is_missing(expected)) CHECK(a[i] == doctest::Approx(expected).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("leap day shares the day-365 slot") {
    const auto start = HourlyStamp::from_civil(2011, 1, 1, 0);
    const auto n = HourlyStamp::from_civil(2013, 1, 1, 0) - start;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v[HourlyStamp::from_civil(2011, 12, 31, 5) - start] = 4.0;  // day 365
    v[HourlyStamp::from_civil(2012, 12, 30, 5) - start] = 8.0;  // day 365 of a leap year
    v[HourlyStamp::from_civil(2012, 12, 31, 5) - start] = kMissing;  // day 366
    Dataset d(start, n);
    d.add("x", v);
    const auto table = ImputationTable::fit(d);
    CHECK(ImputationTable::slot_index(366, 5) == ImputationTable::slot_index(365, 5));
    CHECK(table.slot_count("x", 365, 5) == 2);
    CHECK(*table.slot_mean("x", 366, 5) == 6.0);
    CHECK(impute_missing(d).series("x").values[HourlyStamp::from_civil(2012, 12, 31, 5) - start] == 6.0);
}

TEST_CASE("imputation needs a full year") {
    Dataset d(HourlyStamp::from_civil(2010, 1, 1, 0), 100);
    d.add("x", Eigen::VectorXd::Ones(100));
    CHECK_THROWS_AS(impute_missing(d), DataError);
}

TEST_CASE("imputation table survives a CSV round trip") {
    oracle::Gen g(23);
    const auto d = random_years(g, 2009, 2, 0.05);
    const auto table = ImputationTable::fit(d);
    std::stringstream ss;
    table.write_csv(ss);
    const auto back = ImputationTable::read_csv(ss);
    CHECK(back.variables() == table.variables());
    const auto& a = table.stats("a");
    const auto& b = back.stats("a");
    CHECK(a.slot_count == b.slot_count);
    for (std::size_t i = 0; i < a.slot_mean.size(); ++i) {
        if (a.slot_count[i] > 0) CHECK(a.slot_mean[i] == b.slot_mean[i]);
    }
    CHECK(a.hour_mean == b.hour_mean);
    CHECK(back.apply(d, ImputeOptions{true}).series("a").values == table.apply(d, ImputeOptions{true}).series("a").values);
}

TEST_CASE("scaling fits min and max") {
    Dataset d(HourlyStamp::from_civil(2010, 1, 1, 0), 101);
    d.add("x", Eigen::VectorXd::LinSpaced(101, 0, 100));
    Eigen::VectorXd y(101);
    y.setConstant(3.0);
    y[0] = -5;
    y[1] = 9;
    y[2] = kMissing;
    d.add("y", y);
    const auto p = fit_scaling(d, {"x", "y"});
    CHECK(p.at("x") == ScalingRange{0, 100});
    CHECK(p.at("y") == ScalingRange{-5, 9});
    CHECK_THROWS_AS(p.at("z"), ConfigError);

    Dataset c(d.start(), 5);
    c.add("k", Eigen::VectorXd::Constant(5, 2.0));
    CHECK_THROWS_AS(fit_scaling(c, {"k"}), DataError);
}

TEST_CASE("scaling map endpoints and extrapolation") {
    const ScalingRange r{0, 100};
    CHECK(r.forward(0.0) == -1.0);
    CHECK(r.forward(100.0) == 1.0);
    CHECK(r.forward(50.0) == 0.0);
    CHECK(r.forward(150.0) == 2.0);
    const ScalingRange q{-7.25, 31.5};
    CHECK(q.forward((q.min + q.max) / 2) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("scaling round trip and range on random data") {
    oracle::Gen g(29);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = g.integer(2, 500);
        Dataset d(HourlyStamp::from_civil(2010, 1, 1, 0), n);
        const double centre = g.uniform(-1e3, 1e3);
        const double spread = std::pow(10.0, g.uniform(-2, 3));
        Eigen::VectorXd v(n);
        for (auto& x : v) x = centre + spread * g.normal();
        v[0] = centre - spread;
        v[n - 1] = centre + spread;
        d.add("v", v);
        const auto p = fit_scaling(d, {"v"});
        const auto scaled = apply_scaling(d, p);
        const auto& s = scaled.series("v").values;
        CHECK(s.minCoeff() >= -1.0);
        CHECK(s.maxCoeff() <= 1.0);
        const auto back = invert_scaling(scaled, p).series("v").values;
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK(oracle::rel_err(back[i], v[i]) < 1e-12);
            CHECK(s[i] == p.at("v").forward(v[i]));  // array and scalar paths agree
        }
    }
}

TEST_CASE("scaling rejects unknown variables") {
    Dataset d(HourlyStamp::from_civil(2010, 1, 1, 0), 3);
    d.add("x", Eigen::Vector3d(1, 2, 3));
    ScalingParams p;
    p.set("y", {0, 1});
    CHECK_THROWS_AS(apply_scaling(d, p), ConfigError);
    CHECK_THROWS_AS(p.set("z", {1, 1}), DataError);
}

}  // TEST_SUITE
