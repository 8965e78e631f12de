#include "fgn/series_io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace fgn;

TEST_CASE("single column with header and missing values") {
    std::istringstream in("level\n1102\n# comment\n\n1090.5\nNA\n-3e2\n");
    const SeriesData data = read_series(in);
    REQUIRE(data.values.size() == 4);
    CHECK(data.values(0) == 1102.0);
    CHECK(data.values(1) == 1090.5);
    CHECK(std::isnan(data.values(2)));
    CHECK(data.values(3) == -300.0);
    CHECK(data.missing == 1);
    CHECK_FALSE(data.has_precision());

    const ObservationModel obs = data.observation_model(3);
    CHECK(obs.length() == 7);
    CHECK(obs.missing(2));
    CHECK(obs.exact_at(0));
    CHECK(obs.observed_count() == 3);
}

TEST_CASE("precision column and custom missing marker") {
    std::istringstream in("y,d\n0.5,2\n.,0\n1.5,inf\n");
    const SeriesData data = read_series(in, ".");
    REQUIRE(data.has_precision());
    CHECK(data.precision(0) == 2.0);
    CHECK(data.missing == 1);
    const ObservationModel obs = data.observation_model();
    CHECK_FALSE(obs.exact_at(0));
    CHECK(obs.missing(1));
    CHECK(obs.exact_at(2));
}

TEST_CASE("malformed input reports the line") {
    std::istringstream bad("1\n2\nabc\n");
    try {
        read_series(bad, "NA", "series.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("series.csv:3") == 0);
    }
    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_series(ragged), ParseError);
    std::istringstream wide("1,2,3\n");
    CHECK_THROWS_AS(read_series(wide), ParseError);
    std::istringstream negative("1,-2\n");
    CHECK_THROWS_AS(read_series(negative), ParseError);
    std::istringstream empty("header only\n");
    CHECK_THROWS_AS(read_series(empty), ParseError);
    CHECK_THROWS(read_series(std::string("/nonexistent/file.csv")));
}

TEST_CASE("CSV output round trip") {
    Eigen::MatrixXd columns(2, 2);
    columns << 0.1, 1.0 / 3.0, -2.5e-17, 12345.678901234567;
    std::stringstream out;
    write_csv(out, {"a", "b"}, columns);
    std::string header;
    std::getline(out, header);
    CHECK(header == "a,b");
    std::string row;
    std::getline(out, row);
    const auto comma = row.find(',');
    CHECK(std::stod(row.substr(0, comma)) == 0.1);
    CHECK(std::stod(row.substr(comma + 1)) == 1.0 / 3.0);
    CHECK_THROWS(write_csv(out, {"a"}, columns));
}
