#include "catch_amalgamated.hpp"

#include "fixtures.hpp"

using namespace eitnoise;
using Catch::Approx;

namespace {

std::vector<Extremum> of_kind(const std::vector<Extremum>& xs, ExtremumKind k) {
  std::vector<Extremum> out;
  for (const auto& e : xs)
    if (e.kind == k) out.push_back(e);
  return out;
}

}  // namespace

TEST_CASE("probe absorption maxima of the reference scenario") {
  const auto report = find_extrema(fixtures::fig2(), 0.0, Channel::Probe);
  const auto maxima = report.of_type(ExtremumType::Maximum);
  REQUIRE(maxima.size() == 4);
  const auto inner = of_kind(maxima, ExtremumKind::Inner);
  const auto outer = of_kind(maxima, ExtremumKind::Outer);
  REQUIRE(inner.size() == 2);
  REQUIRE(outer.size() == 2);
  for (const auto& e : inner) {
    CHECK(std::abs(e.omega) == Approx(0.0204).epsilon(0.05));
    CHECK(std::abs(e.omega) < 0.15 / 2);
    REQUIRE(e.approx_omega);
    CHECK(*e.omega_deviation < 0.05);
    CHECK(*e.value_deviation < 0.10);
  }
  for (const auto& e : outer) {
    CHECK(std::abs(e.omega) == Approx(std::sqrt(2.0 + 25.05)).epsilon(0.05));
    CHECK(std::abs(e.omega) > 4.0);
    CHECK(std::abs(e.omega) < 6.0);
  }
  // +- pairs
  CHECK(inner[0].omega == Approx(-inner[1].omega).epsilon(1e-6));
  CHECK(inner[0].value == Approx(inner[1].value).epsilon(1e-10));
}

TEST_CASE("pump minima sit at the probe maxima") {
  for (double rabi_2 : {1.0, 2.0}) {
    const auto p = fixtures::fig2(rabi_2);
    const auto probe = find_extrema(p, 0.0, Channel::Probe).of_type(ExtremumType::Maximum);
    const auto pump = find_extrema(p, 0.0, Channel::Pump).of_type(ExtremumType::Minimum);
    REQUIRE(probe.size() == 4);
    REQUIRE(pump.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(pump[i].omega) == Approx(std::abs(probe[i].omega)).epsilon(0.05));
  }
}

TEST_CASE("coherent probe leaves the pump spectrum flat") {
  const auto p = fixtures::with_probe_squeeze(fixtures::fig2(), 0.0);
  CHECK_THROWS_AS(find_extrema(p, 0.0, Channel::Pump), NoExtrema);
}

TEST_CASE("closed-form and numeric scans locate the pump extrema alike") {
  const auto p = fixtures::fig2(2.0);
  ExtremaOptions cf;
  cf.source = SpectrumSource::ClosedForm;
  cf.points_per_side = 801;
  ExtremaOptions num = cf;
  num.source = SpectrumSource::Numeric;
  const auto a = find_extrema(p, 0.0, Channel::Pump, cf);
  const auto b = find_extrema(p, 0.0, Channel::Pump, num);
  REQUIRE(a.extrema.size() == b.extrema.size());
  for (std::size_t i = 0; i < a.extrema.size(); ++i) CHECK(a.extrema[i].omega == Approx(b.extrema[i].omega).epsilon(1e-5));
}

TEST_CASE("inner extrema track the approximations in their regime") {
  for (double C : {100.0, 300.0, 1000.0}) {
    for (auto [o1, o2] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.0}}) {
      const auto p = symmetric_scenario(C, 0.05, o1, o2, 3.0, 1e4);
      for (Channel ch : {Channel::Probe, Channel::Pump}) {
        const auto report = find_extrema(p, 0.0, ch);
        const auto want = ch == Channel::Probe ? ExtremumType::Maximum : ExtremumType::Minimum;
        const auto inner = of_kind(report.of_type(want), ExtremumKind::Inner);
        REQUIRE(inner.size() == 2);
        for (const auto& e : inner) {
          INFO("C = " << C << " rabi = " << o1 << "," << o2);
          CHECK(*e.omega_deviation < 0.05);
          CHECK(*e.value_deviation < 0.10);
        }
      }
    }
  }
}

TEST_CASE("transfer fraction at the inner extremum") {
  const auto p = fixtures::fig2();
  const double w = approx::inner_position(*symmetric_regime(p));
  const auto t = transfer_report(p, 0.0, w);
  REQUIRE(t.fraction);
  REQUIRE(t.approx_fraction);
  CHECK(*t.approx_fraction == Approx(0.7436).epsilon(1e-3));
  CHECK(*t.fraction == Approx(*t.approx_fraction).epsilon(0.02));
  CHECK(t.f == Approx(std::exp(-6.0)));
}

TEST_CASE("no transfer without a pump coupling partner") {
  auto p = fixtures::fig2();
  p.alpha_2 = 0.0;
  const auto t = transfer_report(p, 0.0, 0.02);
  REQUIRE(t.fraction);
  CHECK(std::abs(*t.fraction) < 1e-9);
  CHECK(*t.approx_fraction == 0.0);
}

TEST_CASE("unsqueezed probe has no defined transfer fraction") {
  const auto t = transfer_report(fixtures::with_probe_squeeze(fixtures::fig2(), 0.0), 0.0, 0.02);
  CHECK_FALSE(t.fraction);
}

TEST_CASE("sum rule defect shrinks along a cooperativity ladder") {
  const double f = std::exp(-6.0);
  double previous = std::numeric_limits<double>::infinity();
  for (double ratio : {10.0, 100.0, 1000.0}) {
    // C kappa Gamma / Omega^2 = ratio with Omega = 1, kappa = 0.15
    const auto p = symmetric_scenario(ratio / 0.15, 0.15, 1.0, 1.0, 3.0, 1e5);
    const auto inner = of_kind(find_extrema(p, 0.0, Channel::Probe).of_type(ExtremumType::Maximum), ExtremumKind::Inner);
    REQUIRE(!inner.empty());
    const double w = std::abs(inner.back().omega);
    const auto t = transfer_report(p, 0.0, w);
    const double defect = std::abs(t.probe + t.pump - 1.0 - f);
    INFO("ratio " << ratio << " defect " << defect);
    CHECK(defect < previous);
    previous = defect;
  }
}

TEST_CASE("separability functional of a synthetic two-mode squeezed source") {
  const double r = 1.0;
  auto source = [r](double theta) {
    return QuadratureTriple{std::cosh(2 * r), std::cosh(2 * r), -std::sinh(2 * r) * std::cos(2 * theta)};
  };
  CHECK(dgcz_functional(source, 0.0) == Approx(4 * std::exp(-2 * r)));
  CHECK(dgcz_functional(source, 0.0) < kDgczBound);
  CHECK(dgcz_functional(source, kPi / 2) > kDgczBound);
}

TEST_CASE("separability functional at vacuum") {
  auto vacuum = [](double) { return QuadratureTriple{1.0, 1.0, 0.0}; };
  CHECK(dgcz_functional(vacuum, 0.3) == 4.0);

  DgczGrid g;
  g.cooperativities = {167};
  g.rabi_1 = {1};
  g.rabi_2 = {1};
  g.omegas = {0.5};
  g.squeeze_r2 = 0.0;
  const auto report = dgcz_scan(g);
  CHECK(report.minimum == Approx(4.0).epsilon(1e-9));
  CHECK_FALSE(report.violation);
}

TEST_CASE("separability functional is pi periodic in theta") {
  const auto p = fixtures::fig2(2.0);
  const auto ev = make_evaluator(p);
  const auto pt = ev.at(0.3);
  auto source = [&](double t) {
    return QuadratureTriple{ev.quadrature_noise(pt, Channel::Pump, t), ev.quadrature_noise(pt, Channel::Probe, t),
                            ev.cross_correlation(pt, t, t)};
  };
  for (double t : {0.0, 0.4, 1.9}) CHECK(dgcz_functional(source, t + kPi) == Approx(dgcz_functional(source, t)).epsilon(1e-10));
}

TEST_CASE("single reference point shows no violation") {
  DgczGrid g;
  g.cooperativities = {167};
  g.rabi_1 = {1};
  g.rabi_2 = {1};
  g.omegas = symmetric_grid(0.1, 10.0, 20, GridSpacing::Linear);
  const auto report = dgcz_scan(g);
  CHECK_FALSE(report.violation);
  CHECK(report.minimum > 4.0);
  CHECK(report.evaluations == 40 * 64);
  REQUIRE(report.cell_minima.size() == 1);
}

TEST_CASE("scan grids must be non-empty") {
  DgczGrid g;
  g.cooperativities = {};
  g.rabi_1 = {1};
  g.rabi_2 = {1};
  g.omegas = {0.5};
  CHECK_THROWS_AS(dgcz_scan(g), InvalidParameters);
}

TEST_CASE("cross decay sweep isolates the zero value") {
  const auto rows = gamma_cross_sensitivity(fixtures::fig2(), {0.0, 0.01, 1.0}, {0.02, 0.5, 5.0});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].pump_max_rel < 1e-8);
  CHECK(rows[0].correlation_max_rel < 1e-8);
  CHECK(rows[1].pump_max_rel > 1e-3);
  CHECK(rows[2].pump_max_rel > rows[1].pump_max_rel);
}
