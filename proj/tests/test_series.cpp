#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "srrc/series.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "srrc_series_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

using Labels = std::vector<std::uint8_t>;

} // namespace

TEST_CASE("labeled csv parses values and labels") {
    const auto path = temp_file("labeled.csv");
    write_file(path, "timestamp,value,is_anomaly\n1,0.5,0\n2,0.7,1\n3,0.6,0\n");

    const auto series = srrc::load_csv(path.string(), srrc::CsvSchema{});
    REQUIRE(series.size() == 3);
    CHECK(series.values[0] == 0.5);
    CHECK(series.values[1] == 0.7);
    CHECK(series.values[2] == 0.6);
    REQUIRE(series.has_labels());
    CHECK(*series.labels == Labels{0, 1, 0});
}

TEST_CASE("csv errors carry the offending line number") {
    const auto path = temp_file("bad.csv");
    write_file(path, "timestamp,value,is_anomaly\n1,0.5,0\n2,not_a_number,0\n");
    CHECK_THROWS_WITH_AS(srrc::load_csv(path.string(), srrc::CsvSchema{}),
                         doctest::Contains("line 3"), std::runtime_error);

    const auto short_path = temp_file("short.csv");
    write_file(short_path, "timestamp,value,is_anomaly\n1,0.5\n");
    CHECK_THROWS_AS(srrc::load_csv(short_path.string(), srrc::CsvSchema{}), std::runtime_error);
}

TEST_CASE("value-only schema leaves labels absent") {
    const auto path = temp_file("values.csv");
    write_file(path, "t,v\n0,1.25\n1,-2.5\n");
    srrc::CsvSchema schema;
    schema.label_column = -1;
    const auto series = srrc::load_csv(path.string(), schema);
    REQUIRE(series.size() == 2);
    CHECK(series.values[1] == -2.5);
    CHECK_FALSE(series.has_labels());
}

TEST_CASE("columns can be picked by header name") {
    const auto path = temp_file("named.csv");
    write_file(path, "is_anomaly,reading,timestamp\n0,0.5,1\n1,0.75,2\n");
    srrc::CsvSchema schema;
    schema.value_column_name = "reading";
    schema.label_column_name = "is_anomaly";
    const auto series = srrc::load_csv(path.string(), schema);
    REQUIRE(series.size() == 2);
    CHECK(series.values[1] == 0.75);
    CHECK(*series.labels == Labels{0, 1});
}

TEST_CASE("csv round trip preserves doubles exactly") {
    srrc::LabeledSeries series;
    series.values = {0.1, -1.0 / 3.0, 2.718281828459045, 1e-17};
    series.labels = Labels{0, 1, 0, 1};

    const auto path = temp_file("roundtrip.csv");
    srrc::save_csv(series, path.string());
    const auto back = srrc::load_csv(path.string(), srrc::CsvSchema{});
    CHECK(back.values == series.values);
    CHECK(back.labels == series.labels);
}

TEST_CASE("min-max normalization maps to the unit interval") {
    srrc::LabeledSeries series;
    series.values = {2.0, 4.0, 3.0};
    series.labels = Labels{0, 0, 1};
    const auto scaled = srrc::minmax_normalize(series);
    CHECK(scaled.values == std::vector<double>{0.0, 1.0, 0.5});
    CHECK(scaled.labels == series.labels);

    srrc::LabeledSeries flat;
    flat.values = {5.0, 5.0, 5.0};
    const auto zeroed = srrc::minmax_normalize(flat);
    CHECK(zeroed.values == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("normalization with external stats reuses those bounds") {
    srrc::LabeledSeries series;
    series.values = {0.0, 10.0};
    const auto scaled = srrc::minmax_normalize_with(series, 0.0, 20.0);
    CHECK(scaled.values == std::vector<double>{0.0, 0.5});
}

TEST_CASE("split sizes use exact percentage arithmetic") {
    auto counts = srrc::split_counts(3000, 0.49, 0.21);
    CHECK(counts.train == 1470);
    CHECK(counts.validation == 630);
    CHECK(counts.test == 900);

    counts = srrc::split_counts(100, 0.49, 0.21);
    CHECK(counts.train == 49);
    CHECK(counts.validation == 21);
    CHECK(counts.test == 30);

    counts = srrc::split_counts(10, 0.49, 0.21);
    CHECK(counts.train == 4);
    CHECK(counts.validation == 2);
    CHECK(counts.test == 4);
}

TEST_CASE("holdout split is contiguous and exhaustive") {
    srrc::LabeledSeries series;
    series.labels.emplace();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 137; ++i) {
        series.values.push_back(gauss(rng));
        series.labels->push_back(i % 11 == 0 ? 1 : 0);
    }

    const auto split = srrc::holdout_split(series, 0.49, 0.21);
    const auto counts = srrc::split_counts(series.size(), 0.49, 0.21);
    CHECK(split.train.size() == counts.train);
    CHECK(split.validation.size() == counts.validation);
    CHECK(split.test.size() == counts.test);

    std::vector<double> glued = split.train.values;
    glued.insert(glued.end(), split.validation.values.begin(), split.validation.values.end());
    glued.insert(glued.end(), split.test.values.begin(), split.test.values.end());
    CHECK(glued == series.values);

    Labels glued_labels = *split.train.labels;
    glued_labels.insert(glued_labels.end(), split.validation.labels->begin(),
                        split.validation.labels->end());
    glued_labels.insert(glued_labels.end(), split.test.labels->begin(),
                        split.test.labels->end());
    CHECK(glued_labels == *series.labels);
}

TEST_CASE("series shorter than ten samples cannot be split") {
    srrc::LabeledSeries series;
    series.values.assign(9, 1.0);
    series.labels = Labels(9, 0);
    CHECK_THROWS_AS(srrc::holdout_split(series, 0.49, 0.21), std::invalid_argument);
}

TEST_CASE("validation rejects malformed series") {
    srrc::LabeledSeries series;
    series.values = {1.0, std::nan("")};
    series.labels = Labels{0, 0};
    CHECK_THROWS_AS(series.validate(), std::invalid_argument);

    series.values = {1.0, 2.0};
    series.labels = Labels{0, 2};
    CHECK_THROWS_AS(series.validate(), std::invalid_argument);

    series.labels = Labels{0};
    CHECK_THROWS_AS(series.validate(), std::invalid_argument);

    series.labels = Labels{0, 1};
    CHECK_NOTHROW(series.validate());
}
