#include "catch_amalgamated.hpp"

#include "eitnoise/io/output.hpp"
#include "eitnoise/io/scenario.hpp"

using namespace eitnoise;
using io::json;
using Catch::Approx;

namespace {

const char* kScenario = R"({
  "name": "t",
  "n_atoms": 2505,
  "alpha_1": 10.0,
  "alpha_2": [20.0, 0.0],
  "squeeze_2": {"r": 3.0, "theta": -1.0},
  "grid": {"omega_min": 0.01, "omega_max": 5.0, "count": 7, "spacing": "linear"},
  "extrema": {"channel": "pump"}
})";

}  // namespace

TEST_CASE("scenario parsing") {
  const auto sc = io::scenario_from_json(json::parse(kScenario));
  CHECK(sc.name == "t");
  CHECK(sc.params.n_atoms == 2505);
  CHECK(sc.params.alpha_2 == Complex(20.0, 0.0));
  CHECK(sc.params.squeeze_2.theta == Approx(2 * kPi - 1.0));
  CHECK(sc.params.kappa_1 == 0.15);
  CHECK(sc.extrema_channel == Channel::Pump);
  const auto w = sc.grid.omegas();
  CHECK(w.size() == 14);
  CHECK(w.back() == Approx(5.0));
  CHECK(*sc.params.cooperativity() == Approx(167.0));
}

TEST_CASE("unknown keys are rejected at every level") {
  auto doc = json::parse(kScenario);
  doc["kapa_1"] = 0.1;
  CHECK_THROWS_AS(io::scenario_from_json(doc), InputError);
  doc = json::parse(kScenario);
  doc["grid"]["points"] = 3;
  CHECK_THROWS_WITH(io::scenario_from_json(doc), Catch::Matchers::ContainsSubstring("points"));
  doc = json::parse(kScenario);
  doc["squeeze_2"]["phase"] = 0.0;
  CHECK_THROWS_AS(io::scenario_from_json(doc), InputError);
}

TEST_CASE("malformed scenarios") {
  SECTION("grid count of one") {
    auto doc = json::parse(kScenario);
    doc["grid"]["count"] = 1;
    CHECK_THROWS_AS(io::scenario_from_json(doc), InputError);
  }
  SECTION("wrong type") {
    auto doc = json::parse(kScenario);
    doc["n_atoms"] = "many";
    CHECK_THROWS_WITH(io::scenario_from_json(doc), Catch::Matchers::ContainsSubstring("n_atoms"));
  }
  SECTION("invalid physics") {
    auto doc = json::parse(kScenario);
    doc["kappa_2"] = -1.0;
    CHECK_THROWS_AS(io::scenario_from_json(doc), InputError);
  }
  SECTION("syntax error names the position") {
    CHECK_THROWS_WITH(io::parse_json_text("{\"n_atoms\": 3,,}", "x.json"),
                      Catch::Matchers::ContainsSubstring("byte 15"));
  }
}

TEST_CASE("scenario hash ignores key order and whitespace") {
  const auto a = json::parse(R"({"n_atoms": 3, "alpha_1": 1.0, "grid": {"count": 4, "omega_min": 0.1}})");
  const auto b = json::parse(R"({
      "grid": {"omega_min": 0.1, "count": 4},
      "alpha_1": 1.0,
      "n_atoms": 3 })");
  CHECK(io::scenario_hash(a) == io::scenario_hash(b));
  const auto c = json::parse(R"({"n_atoms": 4, "alpha_1": 1.0, "grid": {"count": 4, "omega_min": 0.1}})");
  CHECK(io::scenario_hash(a) != io::scenario_hash(c));
  CHECK(io::scenario_hash(a).size() == 16);
}

TEST_CASE("dgcz grid parsing") {
  const auto g = io::dgcz_grid_from_json(json::parse(R"({
    "cooperativity": {"min": 10, "max": 200, "count": 8},
    "rabi_1": [1, 2],
    "rabi_2": {"min": 1, "max": 10, "count": 3, "spacing": "log"},
    "omega": {"min": -10, "max": 10, "count": 201}
  })"));
  CHECK(g.cooperativities.size() == 8);
  CHECK(g.cooperativities.back() == Approx(200));
  CHECK(g.rabi_2[1] == Approx(std::sqrt(10.0)));
  CHECK(g.omegas.size() == 200);  // zero dropped
  CHECK(g.theta_steps == 64);
  CHECK_THROWS_AS(io::dgcz_grid_from_json(json::parse(R"({"cooperativity": [], "rabi_1": [1], "rabi_2": [1], "omega": [1]})")),
                  InputError);
  CHECK_THROWS_AS(io::dgcz_grid_from_json(json::parse(R"({"rabi_1": [1], "rabi_2": [1], "omega": [1]})")), InputError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, -1.0, 1e-300, 2.4787521766663585e-3, 123456.789, -9.87654321e12}) {
    const std::string s = io::format_number(v);
    const double back = io::parse_number(s);
    CHECK(io::format_number(back) == s);
    CHECK(io::parse_number(io::format_number(back)) == back);
  }
  CHECK(io::format_number(std::optional<double>{}) == "nan");
}

TEST_CASE("csv writer and reader agree") {
  io::CsvWriter w({"omega", "y"});
  w.row({io::format_number(0.5), io::format_number(1.25)});
  w.row({io::format_number(-3.0), io::format_number(2e-7)});
  const auto t = io::parse_csv(w.text());
  CHECK(t.header == std::vector<std::string>{"omega", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(io::parse_number(t.rows[1][1]) == 2e-7);
  CHECK_THROWS(w.row({"1"}));
}

TEST_CASE("matrix dump layout") {
  Matrix12 m = Matrix12::Zero();
  m(0, 1) = Complex(1.5, -2.0);
  const auto t = io::parse_csv(io::matrix_csv(m).text());
  CHECK(t.header.size() == 25);
  CHECK(t.header[3] == "alpha1*_re");
  REQUIRE(t.rows.size() == 12);
  CHECK(io::parse_number(t.rows[0][3]) == 1.5);
  CHECK(io::parse_number(t.rows[0][4]) == -2.0);
}

TEST_CASE("manifest fields") {
  io::RunManifest m;
  m.scenario_hash = "abc";
  m.command = "spectrum";
  m.outputs = {"spectrum.csv"};
  const auto j = m.to_json();
  CHECK(j["version"] == io::kToolVersion);
  CHECK(j["outputs"][0] == "spectrum.csv");
  CHECK(j["timestamp"].get<std::string>().size() == 20);
}
