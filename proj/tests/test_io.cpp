#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "cyslag/errors.hpp"
#include "cyslag/io.hpp"

using namespace cyslag;

TEST_CASE("CSV round trip is exact for arbitrary doubles") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CsvTable t;
  t.header = {{"n", "3"}, {"constants", "0.1,-0.2,0.3"}, {"version", kToolVersion}};
  t.columns = {"a", "b", "c"};
  for (int k = 0; k < 500; ++k) t.rows.push_back({u(rng) * std::pow(10.0, k % 40 - 20), u(rng), std::nextafter(1.0, 2.0)});
  t.rows.push_back({0.0, -0.0, std::numeric_limits<double>::denorm_min()});
  t.rows.push_back({std::numeric_limits<double>::max(), std::numeric_limits<double>::quiet_NaN(), -1e-300});

  std::stringstream ss;
  write_csv(ss, t);
  const CsvTable back = read_csv(ss);
  CHECK(back.columns == t.columns);
  CHECK(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double a = t.rows[i][j], b = back.rows[i][j];
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  CHECK(back.header_value("constants") == "0.1,-0.2,0.3");
  CHECK(back.header_value("missing").empty());
  CHECK(back.column("c") == 2);
  CHECK_THROWS_AS(back.column("d"), ArgumentError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("malformed CSV input is rejected with the line number") {
  {
    std::istringstream in("# k: v\na,b\n1,2\n3\n");
    try {
      read_csv(in);
      FAIL("expected an error");
    } catch (const ArgumentError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }
  std::istringstream bad_number("a,b\n1,2x\n");
  CHECK_THROWS_AS(read_csv(bad_number), ArgumentError);
  std::istringstream trailing("a,b\n1,\n");
  CHECK_THROWS_AS(read_csv(trailing), ArgumentError);
  std::istringstream empty("# only: header\n");
  CHECK_THROWS_AS(read_csv(empty), ArgumentError);
  std::istringstream crlf("a,b\r\n1,2\r\n");
  CHECK(read_csv(crlf).rows.at(0).at(1) == 2.0);
}

TEST_CASE("points survive a JSON round trip and bad shapes are rejected") {
  ComplexVector z(4);
  z << Complex(0.1, -0.7), Complex(1e-300, 3.0), Complex(-2.5, 0.0), Complex(std::nextafter(1.0, 0.0), 1e10);
  const nlohmann::json j = point_to_json(z);
  const ComplexVector back = point_from_json(nlohmann::json::parse(j.dump()));
  CHECK((back - z).norm() == 0.0);
  CHECK_THROWS_AS(point_from_json(nlohmann::json::object()), ArgumentError);
  CHECK_THROWS_AS(point_from_json(nlohmann::json::parse("[[1,2],[3]]")), ArgumentError);
  CHECK_THROWS_AS(point_from_json(nlohmann::json::parse("[[1,\"x\"]]")), ArgumentError);
}

TEST_CASE("leaf sample tables revalidate after a round trip") {
  const auto p = std::make_shared<const PotentialProfile>(PotentialProfile::build(3, 1.0));
  for (auto [family, constants] : {std::pair{Family::SO3, std::vector<double>{0.0, 0.0, 1.0}},
                                   std::pair{Family::T2, std::vector<double>{0.1, -0.2, 0.3}}}) {
    const LeafSpec spec = make_leaf_spec(family, constants, p);
    const LeafSample s = sample_leaf(spec, trace_profile_curve(spec), {10, 4, 1});
    const CsvTable t = leaf_sample_table(s);
    CHECK(t.rows.size() == s.points.size());
    CHECK(t.columns.front() == "branch");
    CHECK(t.columns.back() == "frame_ok");
    CHECK(t.columns.size() == 1 + (family == Family::T2 ? 4 : 2) + 8 + 3 + 2);
    std::stringstream ss;
    write_csv(ss, t);
    const CsvTable back = read_csv(ss);
    // Emission tolerance for leaf samples is 1e-9.
    CHECK(revalidate_leaf_table(spec, back) <= 2e-9);
    const std::size_t r = back.column("residual1");
    for (const auto& row : back.rows) CHECK(std::abs(row[r]) <= 1e-9);

    LeafSpec other = spec;
    other.constants[2] += 0.5;
    CHECK(revalidate_leaf_table(other, back) == doctest::Approx(0.5).epsilon(1e-6));
  }
}
