#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "latalign/registry_data.hpp"
#include "latalign/synthetic.hpp"
#include "test_support.hpp"

using namespace latalign;

namespace {

std::string parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        (void)parse_instrument_csv(in, "in.csv");
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

Series sums(std::vector<double> times, const std::vector<double>& s) {
    std::vector<std::vector<double>> rows;
    for (double v : s) rows.push_back({v, 0.0});
    return testing::make_series(std::move(times), rows, 2);
}

Cohort two_item_cohort(std::vector<PatientRecord> ps) {
    Cohort c;
    c.baseline_columns = {"age", "sex"};
    c.categorical_columns = {"sex"};
    c.scale_r.item_max = {40, 40};
    c.scale_s.item_max = {40, 40};
    c.patients = std::move(ps);
    return c;
}

}  // namespace

TEST_CASE("instrument CSV parsing") {
    std::istringstream ok("patient_id,time_months,item_1,item_2\nP1,0,1,2\nP1,6.5,2,2\nP2,0,0,1\n");
    const auto rows = parse_instrument_csv(ok, "in.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].patient_id == "P1");
    CHECK(rows[1].time == 6.5);
    CHECK(rows[1].items == std::vector<double>{2, 2});

    std::istringstream header_only("patient_id,time_months,item_1\n");
    CHECK(parse_instrument_csv(header_only, "in.csv").empty());
}

TEST_CASE("CSV errors carry the source and line number") {
    CHECK(parse_error("id,time_months,item_1\n").find("in.csv:1:") == 0);
    CHECK(parse_error("patient_id,time_months,item_2\n").find("in.csv:1:") == 0);
    CHECK(parse_error("patient_id,time_months,item_1\nP1,0,1\nP1,3\n").find("in.csv:3:") == 0);
    CHECK(parse_error("patient_id,time_months,item_1\nP1,0,abc\n").find("in.csv:2:") == 0);
    CHECK(parse_error("patient_id,time_months,item_1\nP1,0,nan\n").find("in.csv:2:") == 0);
    CHECK(parse_error("patient_id,time_months,item_1\n,0,1\n").find("in.csv:2:") == 0);
    CHECK_FALSE(parse_error("").empty());
}

TEST_CASE("cohort write and load round trip") {
    const auto dir = testing::scratch_dir("cohort_round_trip");
    Cohort c = two_item_cohort({
        {"A", {"61.5", "f"}, sums({0, 3.25, 9}, {1, 2, 30}), sums({0, 9}, {4, 5})},
        {"B", {"70", "m"}, sums({0, 6}, {7, 8}), Series{}},
    });
    c.patients[0].r.items(1, 1) = 0.1;  // non-integer value survives the text form
    write_cohort(c, dir);
    const Cohort back = load_cohort(dir);
    CHECK(back.baseline_columns == c.baseline_columns);
    CHECK(back.categorical_columns == c.categorical_columns);
    CHECK(back.scale_r.item_max == c.scale_r.item_max);
    REQUIRE(back.patients.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.patients[i].id == c.patients[i].id);
        CHECK(back.patients[i].baseline == c.patients[i].baseline);
        CHECK(back.patients[i].r.times == c.patients[i].r.times);
        CHECK(back.patients[i].r.items.data == c.patients[i].r.items.data);
        CHECK(back.patients[i].s.times == c.patients[i].s.times);
        CHECK(back.patients[i].s.items.data == c.patients[i].s.items.data);
    }
    const auto dir2 = testing::scratch_dir("cohort_round_trip_2");
    write_cohort(back, dir2);
    CHECK(testing::slurp(dir / files::kInstrumentR) == testing::slurp(dir2 / files::kInstrumentR));
}

TEST_CASE("duplicate observations are rejected") {
    const auto dir = testing::scratch_dir("cohort_dup");
    const Cohort c = two_item_cohort({{"A", {"61", "f"}, sums({0, 3}, {1, 2}), Series{}}});
    write_cohort(c, dir);
    {
        std::ofstream out(dir / files::kInstrumentR, std::ios::app);
        out << "A,3,5,5\n";
    }
    CHECK_THROWS_AS(load_cohort(dir), DataError);
}

TEST_CASE("format_double round trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 123456789.125})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(3.0) == "3");
}

TEST_CASE("quantile uses linear interpolation") {
    CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
    CHECK(quantile({4, 1, 3, 2}, 0.75) == 3.25);
    CHECK(quantile({5}, 0.3) == 5.0);
    CHECK(quantile({1, 19, 18}, 0.5) == 18.0);
    CHECK_THROWS_AS(quantile({}, 0.5), PreconditionError);
}

TEST_CASE("rescale and logit") {
    CHECK(rescale_item(0.0, 2.0) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(rescale_item(2.0, 2.0) == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(rescale_item(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(logit(0.5) == 0.0);
    for (double max : {1.0, 2.0, 12.0})
        for (int v = 0; v <= static_cast<int>(max); ++v) {
            const double p = rescale_item(v, max);
            CHECK(std::abs(inverse_logit(logit(p)) - p) < 1e-12);
            CHECK(std::isfinite(logit(p)));
        }
}

TEST_CASE("outlier rule") {
    const Series s = sums({0, 3, 6, 9}, {10, 11, 30, 12});
    CHECK(outlier_threshold({&s}) == 18.0);
    CHECK(outlier_time_points(s, 18.0) == std::vector<std::size_t>{2});
    const Series flat = sums({0, 1}, {3, 3});
    CHECK(outlier_threshold({&flat}) == 0.0);
    const Series one = sums({0}, {3});
    CHECK(std::isinf(outlier_threshold({&one})));
}

TEST_CASE("preprocessing filters and transforms") {
    Cohort c = two_item_cohort({
        // R differences over the cohort 1, 19, 18, 2, 4: threshold 2 * (18 - 2) = 32, nothing flagged.
        {"keep", {"60", "f"}, sums({0, 3, 6, 9}, {10, 11, 30, 12}), Series{}},
        {"flat", {"65", "m"}, sums({0, 2}, {5, 5}), sums({0}, {1})},
        {"short", {"62", "m"}, sums({0}, {5}), Series{}},
        {"low", {"64", "f"}, sums({0, 1, 2}, {5, 6, 5}), Series{}},
    });
    c.scale_s.item_max = {40, 40};
    PreprocessLog log;
    const Cohort out = preprocess(c, &log);
    CHECK(out.transformed);
    std::vector<std::string> ids;
    for (const auto& p : out.patients) ids.push_back(p.id);
    CHECK(ids == std::vector<std::string>{"keep"});
    CHECK(out.patients[0].r.size() == 4);
    CHECK(out.patients[0].r.items(2, 0) == doctest::Approx(logit(rescale_item(30, 40))).epsilon(1e-15));
    // Sum variance of (5, 6, 5) is 1/3 < 0.5.
    std::map<std::string, std::string> first;
    for (const auto& e : log.events) first.emplace(e.patient_id, e.what);
    CHECK(first["low"] == "low_variance");
    CHECK(first["flat"] == "low_variance");
    CHECK(first["short"] == "too_few_time_points");
    CHECK(std::count_if(log.events.begin(), log.events.end(),
                        [](const PreprocessEvent& e) { return e.what == "patient_removed"; }) == 3);
    // Already transformed input is returned unchanged.
    const Cohort again = preprocess(out);
    CHECK(again.patients[0].r.items.data == out.patients[0].r.items.data);
}

TEST_CASE("baseline standardization") {
    const Cohort c = two_item_cohort({
        {"A", {"60", "f"}, sums({0, 1}, {1, 5}), Series{}},
        {"B", {"70", "m"}, sums({0, 1}, {1, 5}), Series{}},
        {"C", {"80", "f"}, sums({0, 1}, {1, 5}), Series{}},
    });
    const auto stats = BaselineStats::fit(c);
    CHECK(stats.width() == 3);
    const auto e = stats.encode({"80", "m"});
    CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 1.0);
    const auto back = BaselineStats::from_json(stats.to_json());
    CHECK(back.encode({"65", "f"}) == stats.encode({"65", "f"}));
    CHECK_THROWS_AS(stats.encode({"x", "f"}), DataError);
    CHECK_THROWS_AS(stats.encode({"60"}), DataError);
}

TEST_CASE("subscale construction") {
    const auto syn = generate_synthetic(GeneratorConfig{.n_patients = 20});
    const Cohort& c = syn.cohort;
    CHECK(c.items_s() == 5);
    for (const auto& p : c.patients) {
        CHECK(p.s.times == p.r.times);
        for (std::size_t k = 0; k < p.r.size(); ++k) CHECK(p.s.items(k, 3) == p.r.items(k, 14));
    }
    const Cohort sub = make_subscale(c, {0, 19});
    CHECK(sub.scale_s.item_max == std::vector<double>{2, 1});
    CHECK(sub.patients[0].s.items(0, 1) == sub.patients[0].r.items(0, 19));
    CHECK_THROWS_AS(make_subscale(c, {}), ConfigError);
    CHECK_THROWS_AS(make_subscale(c, {20}), ConfigError);
}

TEST_CASE("synthetic generator") {
    GeneratorConfig g;
    const auto a = generate_synthetic(g);
    CHECK(a.cohort.patients.size() == 500);
    std::vector<double> visits;
    for (const auto& p : a.cohort.patients) {
        visits.push_back(static_cast<double>(p.r.size()));
        CHECK(p.r.size() >= 3);
        CHECK(p.r.times.front() == 0.0);
        CHECK(std::is_sorted(p.r.times.begin(), p.r.times.end()));
        for (std::size_t k = 0; k < p.r.size(); ++k)
            for (std::size_t j = 0; j < 20; ++j) {
                const double v = p.r.items(k, j);
                CHECK(v == std::round(v));
                CHECK(v >= 0.0);
                CHECK(v <= a.cohort.scale_r.item_max[j]);
            }
    }
    const double median = quantile(visits, 0.5);
    CHECK(median >= 5.0);
    CHECK(median <= 9.0);

    const auto b = generate_synthetic(g);
    CHECK(b.cohort.patients[17].r.items.data == a.cohort.patients[17].r.items.data);
    g.seed = 2;
    const auto c = generate_synthetic(g);
    CHECK(c.cohort.patients[17].r.items.data != a.cohort.patients[17].r.items.data);

    g.n_patients = 1;
    CHECK(generate_synthetic(g).cohort.patients.size() == 1);
    g.n_patients = 0;
    CHECK_THROWS_AS(g.validate(), ConfigError);
    CHECK_THROWS_AS(GeneratorConfig::from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
}
