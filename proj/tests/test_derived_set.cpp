#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lipdiff/catalog.hpp"
#include "lipdiff/derived_set.hpp"
#include "lipdiff/rng.hpp"

using namespace lipdiff;
using namespace lipdiff::derived;

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

EvaluableMap scalar_map(const char* name, double radius, double (*fn)(double)) {
  EvaluableMap m;
  m.name = name;
  m.domain = OpenDomain::ball(Vec::Zero(1), radius);
  m.codomain_dim = 1;
  m.fn = [fn](const Vec& p) { return v1(fn(p[0])); };
  return m;
}

// Schedule reaching t ~ 1e-8 with tail spacing fine enough to trace the
// oscillation of sin(log t).
const StepSchedule tsinlog_schedule{0.5, 0.93, 240};

}  // namespace

TEST_CASE("delta_derived_set: identity quotients are exact") {
  const MapPair id2 = catalog_get("identity-2");
  const DerivedSetSample s = delta_derived_set(id2.g, v2(0.0, 0.0), v2(1.0, 1.0), 0.3, 12);
  REQUIRE(s.quotients.size() == 12);
  for (const auto& [t, q] : s.quotients) {
    CHECK(q == v2(1.0, 1.0));  // (y + t v - y) / t is exact here
    CHECK(t < 0.3);
  }
  CHECK(s.verdict == Verdict::Singleton);
}

TEST_CASE("delta_derived_set: |t| at 0 gives constant quotient 1") {
  const EvaluableMap abs_map = scalar_map("abs", 1.0, [](double t) { return std::abs(t); });
  const DerivedSetSample s = delta_derived_set(abs_map, v1(0.0), v1(1.0), 0.1, 10);
  for (const auto& [t, q] : s.quotients) CHECK(q[0] == 1.0);
}

TEST_CASE("delta_derived_set: tsinlog quotients equal sin(log t)") {
  const EvaluableMap ts = catalog_map("tsinlog");
  const DerivedSetSample s = delta_derived_set(ts, v1(0.0), v1(1.0), 0.1, 40);
  for (const auto& [t, q] : s.quotients) {
    CHECK(q[0] == doctest::Approx(std::sin(std::log(t))).epsilon(1e-13));
    CHECK(q[0] >= -1.0 - 1e-15);
    CHECK(q[0] <= 1.0 + 1e-15);
  }
}

TEST_CASE("delta_derived_set: grid count zero gives the empty verdict") {
  const EvaluableMap ts = catalog_map("tsinlog");
  const DerivedSetSample s = delta_derived_set(ts, v1(0.0), v1(1.0), 0.1, 0);
  CHECK(s.verdict == Verdict::Empty);
  CHECK(s.quotients.empty());
}

TEST_CASE("delta_derived_set: nesting of grids") {
  const EvaluableMap ts = catalog_map("tsinlog");
  const DerivedSetSample inner = delta_derived_set(ts, v1(0.0), v1(1.0), 0.1, 20);
  const DerivedSetSample outer = delta_derived_set(ts, v1(0.0), v1(1.0), 0.5, 30);
  // Every (t, q) of the inner snapshot appears bitwise in the outer one.
  for (const auto& [t, q] : inner.quotients) {
    const auto it = std::find_if(outer.quotients.begin(), outer.quotients.end(),
                                 [&](const auto& e) { return e.first == t; });
    REQUIRE(it != outer.quotients.end());
    CHECK(it->second == q);
  }
}

TEST_CASE("delta_derived_set: reports the offending t on domain exit") {
  const EvaluableMap ts = catalog_map("tsinlog");  // domain (-1, 1)
  CHECK_THROWS_AS(delta_derived_set(ts, v1(0.5), v1(1.0), 0.9, 10), DomainViolation);
}

TEST_CASE("derived_set_estimate: identity is singleton {v}") {
  const MapPair id2 = catalog_get("identity-2");
  // At the origin the quotients are exact.
  const DerivedSetSample s0 =
      derived_set_estimate(id2.g, v2(0.0, 0.0), v2(0.3, 0.4), StepSchedule{});
  REQUIRE(s0.verdict == Verdict::Singleton);
  CHECK((s0.clusters.front().representative - v2(0.3, 0.4)).norm() <= 1e-12);

  // Away from it the cancellation (y + t v) - y costs eps*||y||/t at the
  // deepest steps of the default schedule.
  const DerivedSetSample s =
      derived_set_estimate(id2.g, v2(0.1, -0.2), v2(0.3, 0.4), StepSchedule{});
  REQUIRE(s.verdict == Verdict::Singleton);
  CHECK((s.clusters.front().representative - v2(0.3, 0.4)).norm() <= 1e-6);
}

TEST_CASE("derived_set_estimate: tsinlog at 0 is multivalued with wide hull") {
  const EvaluableMap ts = catalog_map("tsinlog");
  const DerivedSetSample s = derived_set_estimate(ts, v1(0.0), v1(1.0), tsinlog_schedule, 0.05);
  CHECK(s.verdict == Verdict::Multivalued);

  // Independent oracle: dense evaluation of sin(log t) over the tail range.
  const auto ts_steps = tsinlog_schedule.steps();
  const double t_hi = ts_steps[s.tail_start];
  const double t_lo = ts_steps.back();
  double oracle_lo = 1.0, oracle_hi = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const double logt = std::log(t_lo) + (std::log(t_hi) - std::log(t_lo)) * i / 9999.0;
    const double v = std::sin(logt);
    oracle_lo = std::min(oracle_lo, v);
    oracle_hi = std::max(oracle_hi, v);
  }
  CHECK(oracle_hi >= 0.999);
  CHECK(oracle_lo <= -0.999);

  CHECK(s.hull_lo[0] <= -0.9);
  CHECK(s.hull_hi[0] >= 0.9);
  CHECK(s.hull_lo[0] >= -1.001);
  CHECK(s.hull_hi[0] <= 1.001);
}

TEST_CASE("derived_set_estimate: cube root at 0 diverges") {
  const MapPair cube = catalog_get("cube");
  // Quotient at t is t^(-2/3): 1e4 at t = 1e-6 already.
  CHECK(std::pow(1e-6, -2.0 / 3.0) == doctest::Approx(1e4).epsilon(1e-10));
  const DerivedSetSample s = derived_set_estimate(cube.f, v1(0.0), v1(1.0), StepSchedule{});
  CHECK(s.verdict == Verdict::Divergent);
}

TEST_CASE("derived_set_estimate: rejects the zero direction") {
  const MapPair id2 = catalog_get("identity-2");
  CHECK_THROWS_AS(derived_set_estimate(id2.g, v2(0.0, 0.0), v2(0.0, 0.0), StepSchedule{}),
                  DegenerateDirection);
}

TEST_CASE("one_sided_directional: smooth scalar cases") {
  const EvaluableMap sq = scalar_map("square", 2.0, [](double t) { return t * t; });
  const DirectionalResult r = one_sided_directional(sq, v1(1.0), v1(1.0), StepSchedule{}, 1e-4);
  REQUIRE(r.value.has_value());
  CHECK((*r.value)[0] == doctest::Approx(2.0).epsilon(1e-6));

  const MapPair id2 = catalog_get("identity-2");
  const DirectionalResult ri =
      one_sided_directional(id2.g, v2(0.2, 0.1), v2(3.0, 4.0), StepSchedule{}, 1e-4);
  REQUIRE(ri.value.has_value());
  CHECK((*ri.value - v2(3.0, 4.0)).norm() <= 1e-6);
}

TEST_CASE("one_sided_directional: tsinlog is multivalued at 0") {
  const EvaluableMap ts = catalog_map("tsinlog");
  const DirectionalResult r =
      one_sided_directional(ts, v1(0.0), v1(1.0), tsinlog_schedule, 1e-4);
  CHECK_FALSE(r.value.has_value());
  CHECK(r.verdict == Verdict::Multivalued);
}

TEST_CASE("bilateral_directional: exists for t^2, not for |t|") {
  const EvaluableMap sq = scalar_map("square", 2.0, [](double t) { return t * t; });
  const auto b = bilateral_directional(sq, v1(1.0), v1(1.0), StepSchedule{}, 1e-4);
  REQUIRE(b.has_value());
  CHECK((*b)[0] == doctest::Approx(2.0).epsilon(1e-6));

  const EvaluableMap abs_map = scalar_map("abs", 1.0, [](double t) { return std::abs(t); });
  CHECK_FALSE(bilateral_directional(abs_map, v1(0.0), v1(1.0), StepSchedule{}, 1e-4).has_value());
}

TEST_CASE("gateaux_assemble: affine map returns its own matrix") {
  const MapPair affine = catalog_get("affine");
  Mat expected(2, 2);
  expected << 2.0, 0.0, 0.0, 3.0;

  // b = 0, so quotients at the origin are exact on any schedule.
  const GateauxCandidate c0 = gateaux_assemble(affine.g, v2(0.0, 0.0), StepSchedule{}, 1e-6);
  CHECK((c0.matrix - expected).norm() <= 1e-10);
  CHECK(c0.linearity_residual <= 1e-10);
  CHECK(c0.homogeneity_residual <= 1e-10);

  // Generic base point with a schedule shallow enough for the cancellation.
  const GateauxCandidate c =
      gateaux_assemble(affine.g, v2(0.5, -0.5), StepSchedule{1e-2, 0.7, 20}, 1e-6);
  CHECK((c.matrix - expected).norm() <= 1e-9);
  CHECK(c.linearity_residual <= 1e-9);
  CHECK(c.homogeneity_residual <= 1e-9);
}

TEST_CASE("gateaux_assemble: cube at 0 has the zero derivative") {
  const MapPair cube = catalog_get("cube");
  const GateauxCandidate c = gateaux_assemble(cube.g, v1(0.0), StepSchedule{}, 1e-6);
  CHECK(std::abs(c.matrix(0, 0)) <= 1e-10);
  CHECK(c.linearity_residual <= 1e-10);
}

TEST_CASE("gateaux_assemble: quadratic shear Jacobian") {
  const MapPair poly = catalog_get("poly2d");
  const GateauxCandidate c = gateaux_assemble(poly.g, v2(0.0, 1.0), StepSchedule{}, 1e-3);
  Mat expected(2, 2);
  expected << 1.0, 2.0, 0.0, 1.0;
  CHECK((c.matrix - expected).norm() <= 1e-4);
}

TEST_CASE("gateaux_assemble: throws when a direction is multivalued") {
  const EvaluableMap ts = catalog_map("tsinlog");
  CHECK_THROWS_AS(gateaux_assemble(ts, v1(0.0), tsinlog_schedule, 1e-4),
                  NotDirectionallyDifferentiable);
}

TEST_CASE("property: linear maps give singleton {Lv} (exact at the origin)") {
  Rng rng(314);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    Mat l(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) l(i, j) = rng.uniform(-2.0, 2.0);
    EvaluableMap lin;
    lin.name = "linear";
    lin.domain = OpenDomain::ball(Vec::Zero(n), 10.0);
    lin.codomain_dim = n;
    lin.fn = [l](const Vec& p) { return Vec(l * p); };

    const Vec v = rng.unit_vector(n);
    const DerivedSetSample s = derived_set_estimate(lin, Vec::Zero(n), v, StepSchedule{});
    REQUIRE(s.verdict == Verdict::Singleton);
    CHECK(s.clusters.front().spread <= 1e-12);
    CHECK((s.clusters.front().representative - l * v).norm() <= 1e-12);

    // Away from the origin the cancellation in L(y+tv) - L(y) costs
    // eps*||L y|| / t, so a shallower schedule carries a scaled bound.
    const Vec y = rng.in_ball(Vec::Zero(n), 1.0);
    const DerivedSetSample s2 =
        derived_set_estimate(lin, y, v, StepSchedule{1e-2, 0.7, 12});
    REQUIRE(s2.verdict == Verdict::Singleton);
    CHECK((s2.clusters.front().representative - l * v).norm() <= 1e-9);
  }
}

TEST_CASE("property: positive homogeneity of the estimate") {
  const MapPair poly = catalog_get("poly2d");
  Rng rng(2718);
  for (const double c : {2.0, 3.0, 0.25, 10.0}) {
    const Vec y = rng.in_ball(Vec::Zero(2), 0.5);
    const Vec v = rng.unit_vector(2);
    const StepSchedule base{1e-2, 0.7, 30};
    const DerivedSetSample scaled =
        derived_set_estimate(poly.g, y, Vec(c * v), base.scaled(1.0 / c));
    const DerivedSetSample plain = derived_set_estimate(poly.g, y, v, base);
    REQUIRE(scaled.quotients.size() == plain.quotients.size());
    for (std::size_t k = 0; k < plain.quotients.size(); ++k) {
      const Vec expect = c * plain.quotients[k].second;
      CHECK((scaled.quotients[k].second - expect).norm() <=
            1e-12 * (1.0 + expect.norm()));
    }
  }
}

TEST_CASE("hausdorff distance and hulls") {
  std::vector<Vec> a{v1(0.0), v1(1.0)};
  std::vector<Vec> b{v1(0.1), v1(1.2)};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.2));
}
