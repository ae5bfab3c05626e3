#pragma once

// Invariant suites shared by the properties test binary and the acceptance
// runner: linear-map derived-set oracle, Lipschitz scaling law, Karcher
// permutation/idempotence, CLI determinism.

#include <Eigen/Dense>

#include <sstream>
#include <string>
#include <vector>

#include "lipdiff/catalog.hpp"
#include "lipdiff/derived_set.hpp"
#include "lipdiff/karcher.hpp"
#include "lipdiff/parallel.hpp"
#include "lipdiff/regularity.hpp"
#include "lipdiff/rng.hpp"
#include "lipdiff/scenario.hpp"

namespace suites {

struct SuiteResult {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

inline lipdiff::Mat seeded_spd(lipdiff::Rng& rng, int d, double lo = 0.5, double hi = 2.0) {
  lipdiff::Mat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.gauss();
  const lipdiff::Mat q = Eigen::HouseholderQR<lipdiff::Mat>(g).householderQ();
  lipdiff::Vec vals(d);
  for (int i = 0; i < d; ++i) vals[i] = rng.uniform(lo, hi);
  lipdiff::Mat m = q * vals.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

// Singleton {L v} with spread <= 1e-12 where the quotient arithmetic is
// exact (base 0); roundoff-scaled bound at generic bases.
inline SuiteResult linear_map_derived_oracle() {
  using namespace lipdiff;
  SuiteResult result;
  Rng rng(424242);
  double worst_spread = 0.0, worst_err = 0.0, worst_generic = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 5;
    Mat l(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) l(i, j) = rng.uniform(-2.0, 2.0);
    EvaluableMap lin{"linear", OpenDomain::ball(Vec::Zero(n), 10.0), n,
                     [l](const Vec& p) { return Vec(l * p); }};
    const Vec v = rng.unit_vector(n);

    const auto s = derived::derived_set_estimate(lin, Vec::Zero(n), v,
                                                 derived::StepSchedule{});
    if (s.verdict != derived::Verdict::Singleton) {
      result.fail("non-singleton verdict at the origin");
      continue;
    }
    worst_spread = std::max(worst_spread, s.clusters.front().spread);
    worst_err =
        std::max(worst_err, (s.clusters.front().representative - l * v).norm());

    const Vec y = rng.in_ball(Vec::Zero(n), 1.0);
    const auto s2 = derived::derived_set_estimate(lin, y, v,
                                                  derived::StepSchedule{1e-2, 0.7, 12});
    if (s2.verdict != derived::Verdict::Singleton) {
      result.fail("non-singleton verdict at a generic base");
      continue;
    }
    worst_generic =
        std::max(worst_generic, (s2.clusters.front().representative - l * v).norm());
  }
  if (worst_spread > 1e-12) result.fail("spread above 1e-12 at the origin");
  if (worst_err > 1e-12) result.fail("representative error above 1e-12 at the origin");
  if (worst_generic > 1e-9) result.fail("representative error above 1e-9 off-origin");
  std::ostringstream os;
  os << "spread " << worst_spread << ", err " << worst_err << ", off-origin "
     << worst_generic;
  if (result.detail.empty()) result.detail = os.str();
  return result;
}

// lipschitz_estimate(c*f) equals |c| * lipschitz_estimate(f) pair by pair;
// bitwise for power-of-two factors.
inline SuiteResult lipschitz_scaling_law() {
  using namespace lipdiff;
  SuiteResult result;
  const MapPair poly = catalog_get("poly2d");
  const EvaluableMap f = poly.f;
  Vec center(2);
  center << 0.1, -0.2;
  const std::vector<double> radii{1e-1, 1e-2, 1e-3};

  auto scaled = [&](double c) {
    EvaluableMap m = f;
    m.fn = [c, inner = f.fn](const Vec& p) { return Vec(c * inner(p)); };
    return m;
  };
  const auto base = reg::lipschitz_estimate(f, center, radii, 200, 99);
  const auto x2 = reg::lipschitz_estimate(scaled(2.0), center, radii, 200, 99);
  const auto x05 = reg::lipschitz_estimate(scaled(-0.5), center, radii, 200, 99);
  const auto x3 = reg::lipschitz_estimate(scaled(3.0), center, radii, 200, 99);
  for (std::size_t i = 0; i < base.profile.size(); ++i) {
    if (x2.profile[i].estimate != 2.0 * base.profile[i].estimate) {
      result.fail("2x scaling not exact");
    }
    if (x05.profile[i].estimate != 0.5 * base.profile[i].estimate) {
      result.fail("|-0.5|x scaling not exact");
    }
    // Short-separation pairs cancel |f| values, so a generic factor is
    // exact only up to eps*|f|/diff.
    const double expect = 3.0 * base.profile[i].estimate;
    if (std::abs(x3.profile[i].estimate - expect) > 1e-8 * expect) {
      result.fail("3x scaling beyond cancellation roundoff");
    }
  }
  if (result.detail.empty()) result.detail = "2x and 0.5x bitwise, 3x within roundoff";
  return result;
}

// Permutation invariance (<= 1e-9), idempotence (<= 1e-10) and the
// residual certificate of every converged mean.
inline SuiteResult karcher_mean_invariants() {
  using namespace lipdiff;
  using namespace lipdiff::spd;
  SuiteResult result;
  Rng rng(777);
  double worst_perm = 0.0, worst_idem = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 2 + trial % 4;
    std::vector<Mat> ops{seeded_spd(rng, d), seeded_spd(rng, d), seeded_spd(rng, d),
                         seeded_spd(rng, d)};
    const KarcherTrace t = karcher_mean(ops, 1e-12, 400);
    if (!t.converged) {
      result.fail("mean did not converge");
      continue;
    }
    worst_res = std::max(worst_res, karcher_residual(t.mean, ops).norm());

    std::vector<Mat> perm{ops[2], ops[0], ops[3], ops[1]};
    const KarcherTrace tp = karcher_mean(perm, 1e-12, 400);
    if (!tp.converged) {
      result.fail("permuted mean did not converge");
      continue;
    }
    worst_perm = std::max(worst_perm, (t.mean - tp.mean).norm());

    std::vector<Mat> same(4, ops[0]);
    const KarcherTrace ts = karcher_mean(same, 1e-12, 400);
    worst_idem = std::max(worst_idem, (ts.mean - ops[0]).norm());
  }
  if (worst_perm > 1e-9) result.fail("permutation gap above 1e-9");
  if (worst_idem > 1e-10) result.fail("idempotence gap above 1e-10");
  if (worst_res > 1e-12) result.fail("converged residual above tol");
  std::ostringstream os;
  os << "perm " << worst_perm << ", idem " << worst_idem << ", residual " << worst_res;
  if (result.detail.empty()) result.detail = os.str();
  return result;
}

// Byte-identical reports for identical scenario + seed, across thread
// counts; different seeds must change the envelope.
inline SuiteResult cli_determinism() {
  using namespace lipdiff;
  SuiteResult result;
  nlohmann::json s{{"schema", "lipdiff-scenario/1"}, {"name", "determinism"},
                   {"pipeline", "certify"},          {"seed", 20240131},
                   {"map", {{"catalog", "poly2d"}}}, {"point", {0.1, -0.3}}};
  const std::string a = cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  const std::string b = cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  if (a != b) result.fail("repeat run differs");

  par::set_max_threads(1);
  const std::string t1 = cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  par::set_max_threads(4);
  const std::string t4 = cli::strip_volatile(cli::run_scenario_json(s, ".").envelope).dump();
  par::set_max_threads(0);
  if (t1 != t4 || t1 != a) result.fail("thread count perturbs the report");

  nlohmann::json s2 = s;
  s2["seed"] = 20240132;
  if (cli::strip_volatile(cli::run_scenario_json(s2, ".").envelope).dump() == a) {
    result.fail("seed change does not reach the samplers");
  }
  if (result.detail.empty()) {
    result.detail = "byte-identical across runs and thread counts";
  }
  return result;
}

}  // namespace suites
