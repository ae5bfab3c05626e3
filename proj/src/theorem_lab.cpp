#include "lipdiff/theorem_lab.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lipdiff/rng.hpp"

namespace lipdiff::lab {

namespace {

// Shrinking radius profile anchored at the domain margin around `center`.
std::vector<double> margin_radii(const EvaluableMap& map, const Vec& center, int count,
                                 double factor) {
  const double m = map.domain.margin(center);
  if (m <= 0.0) throw DomainViolation("radius profile: center outside domain");
  std::vector<double> radii(count);
  double r = 0.4 * m;
  for (int i = 0; i < count; ++i) {
    radii[i] = r;
    r /= factor;
  }
  return radii;
}

// Shrinking profile on a locality scale: M(r) must stabilize as r drops,
// which only happens once the largest ball stops seeing the map's global
// curvature. scale_hint overrides the default 5% of the point scale.
reg::LipschitzEstimate lipschitz_near(const EvaluableMap& f, const Vec& y, int pairs,
                                      std::uint64_t seed, Norm norm, par::Exec exec,
                                      double scale_hint = -1.0) {
  const double m = f.domain.margin(y);
  if (m <= 0.0) throw DomainViolation("lipschitz_near: center outside domain");
  const double scale = scale_hint > 0.0 ? scale_hint : 0.05 * (1.0 + y.norm());
  const double r0 = std::min(scale, 0.4 * m);
  return reg::lipschitz_estimate(f, y, {r0, r0 / 10.0, r0 / 100.0}, pairs, seed, norm, exec);
}

}  // namespace

ChainRuleReport chain_rule_check(const MapPair& pair, const Vec& x, const Vec& v,
                                 const derived::StepSchedule& schedule,
                                 const ChainRuleConfig& cfg, par::Exec exec) {
  ChainRuleReport rep;
  rep.x = x;
  rep.v = v;

  // Hypothesis 1: g has a one-sided directional derivative at x along v.
  const derived::DirectionalResult gdir =
      derived::one_sided_directional(pair.g, x, v, schedule, cfg.directional_tol, exec);
  if (!gdir.value) {
    throw HypothesisFailure("g-not-directionally-differentiable",
                            std::string("chain_rule_check: derived set of g is ") +
                                derived::verdict_name(gdir.verdict));
  }
  rep.g_directional = *gdir.value;

  // Hypothesis 2: f is Lipschitz near g(x), on the region the quotient
  // comparisons actually traverse (displacements up to ~t0 * ||g'(x,v)||).
  const Vec gx = evaluate(pair.g, x);
  const double region = 2.0 * schedule.t0 * (1.0 + rep.g_directional.norm());
  const reg::LipschitzEstimate lip =
      lipschitz_near(pair.f, gx, cfg.lipschitz_pairs,
                     derive_seed(cfg.seed, "chain/lipschitz"), cfg.norm, exec, region);
  if (lip.verdict != reg::LipschitzVerdict::Lipschitz) {
    throw HypothesisFailure("f-not-lipschitz",
                            std::string("chain_rule_check: lipschitz verdict is ") +
                                reg::lipschitz_verdict_name(lip.verdict));
  }
  rep.kappa = lip.max_estimate;

  const EvaluableMap composite = make_composite(pair.g, pair.f);
  rep.lhs = derived::derived_set_estimate(composite, x, v, schedule, cfg.cluster_tol, exec);
  rep.rhs =
      derived::derived_set_estimate(pair.f, gx, rep.g_directional, schedule, cfg.cluster_tol, exec);

  const auto lhs_reps = rep.lhs.representatives();
  const auto rhs_reps = rep.rhs.representatives();
  rep.hausdorff_gap = derived::hausdorff_distance(lhs_reps, rhs_reps);
  rep.hull_gap = derived::hull_gap(rep.lhs, rep.rhs);

  rep.all_within_bound = true;
  for (std::size_t k = 0; k < rep.lhs.quotients.size(); ++k) {
    const auto& [t, ql] = rep.lhs.quotients[k];
    const auto& [t2, qr] = rep.rhs.quotients[k];
    ChainRuleReport::TraceEntry e;
    e.t = t;
    e.quotient_gap = (ql - qr).norm();
    const Vec g_quotient = (evaluate(pair.g, Vec(x + t * v)) - gx) / t;
    e.bound = rep.kappa * (g_quotient - rep.g_directional).norm();
    e.within_bound =
        e.quotient_gap <= e.bound * (1.0 + cfg.bound_rel_slack) +
                              cfg.bound_abs_slack * (1.0 + v.norm());
    rep.all_within_bound = rep.all_within_bound && e.within_bound;
    rep.trace.push_back(e);
  }
  return rep;
}

std::vector<Vec> identity_check_directions(int dim, int extra, std::uint64_t seed) {
  std::vector<Vec> dirs;
  for (int i = 0; i < dim; ++i) {
    Vec e = Vec::Zero(dim);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  Rng rng(derive_seed(seed, "identity-check/directions"));
  for (int k = 0; k < extra; ++k) dirs.push_back(rng.unit_vector(dim));
  return dirs;
}

IdentityCheckReport identity_derived_check(const MapPair& pair, const Vec& x,
                                           std::span<const Vec> directions,
                                           const derived::StepSchedule& schedule, double tol,
                                           par::Exec exec) {
  const EvaluableMap composite = make_composite(pair.g, pair.f);
  IdentityCheckReport rep;
  rep.residuals.resize(directions.size());
  par::fill_indexed(
      directions.size(),
      [&](std::size_t i) {
        const derived::DirectionalResult r = derived::one_sided_directional(
            composite, x, directions[i], schedule, tol, par::Exec::Serial);
        double residual;
        if (r.value) {
          residual = (*r.value - directions[i]).norm();
        } else {
          // Non-singleton composite derivative: report the worst tail
          // deviation from the direction itself.
          const derived::DerivedSetSample s = derived::derived_set_estimate(
              composite, x, directions[i], schedule, 0.0, par::Exec::Serial);
          residual = 0.0;
          for (int k = s.tail_start; k < static_cast<int>(s.quotients.size()); ++k) {
            residual = std::max(residual, (s.quotients[k].second - directions[i]).norm());
          }
        }
        rep.residuals[i] = {directions[i], residual};
      },
      exec);
  for (const auto& [dir, r] : rep.residuals) rep.max_residual = std::max(rep.max_residual, r);
  return rep;
}

DensityProbeReport density_probe(const MapPair& pair, const Vec& x, const Vec& w,
                                 const derived::StepSchedule& schedule,
                                 const DensityProbeConfig& cfg, par::Exec exec) {
  DensityProbeReport rep;
  rep.x = x;
  rep.w = w;
  rep.y = evaluate(pair.g, x);
  const Vec fy = evaluate(pair.f, rep.y);

  rep.jacobian = reg::fd_jacobian(pair.g, x, 0.0, reg::FdScheme::Central, exec).jacobian;

  // M_f on the fixed ball the probe lives in: radius t0*||w|| around y.
  const double region = std::min(schedule.t0 * w.norm(), 0.5 * pair.f.domain.margin(rep.y));
  std::vector<double> radii{region, region / 10.0, region / 100.0};
  const reg::LipschitzEstimate lip =
      reg::lipschitz_estimate(pair.f, rep.y, radii, cfg.lipschitz_pairs,
                              derive_seed(cfg.seed, "density/lipschitz"), cfg.norm, exec);
  rep.kappa = lip.profile.front().estimate;

  const std::vector<double> ts = schedule.steps();
  rep.trace.resize(ts.size());
  par::fill_indexed(
      ts.size(),
      [&](std::size_t k) {
        const double t = ts[k];
        DensityProbeReport::Entry e;
        e.t = t;
        e.z = (evaluate(pair.f, Vec(rep.y + t * w)) - fy) / t;
        e.z_norm = e.z.norm();
        const Vec through_g = (evaluate(pair.g, Vec(x + t * e.z)) - rep.y) / t;
        e.step1_residual = vec_norm(Vec(through_g - w), cfg.norm);
        e.jac_gap = vec_norm(Vec(w - rep.jacobian * e.z), cfg.norm);
        rep.trace[k] = e;
      },
      exec);

  for (const auto& e : rep.trace) {
    rep.max_z_norm = std::max(rep.max_z_norm, e.z_norm);
    rep.max_step1_residual = std::max(rep.max_step1_residual, e.step1_residual);
  }
  rep.bound_ok = rep.max_z_norm <= rep.kappa * w.norm() * (1.0 + cfg.bound_slack);
  // Decreasing means nonincreasing within noise AND a real decay across
  // the schedule, not just a flat trace.
  rep.gap_decreasing = true;
  for (std::size_t k = 1; k < rep.trace.size(); ++k) {
    if (rep.trace[k].jac_gap > rep.trace[k - 1].jac_gap * 1.1 + 1e-12) {
      rep.gap_decreasing = false;
      break;
    }
  }
  rep.final_gap = rep.trace.back().jac_gap;
  const double floor = 1e-10 * (1.0 + w.norm());
  if (rep.final_gap > std::max(0.5 * rep.trace.front().jac_gap, floor)) {
    rep.gap_decreasing = false;
  }
  return rep;
}

const char* cert_verdict_name(CertVerdict v) {
  switch (v) {
    case CertVerdict::Certified:
      return "certified";
    case CertVerdict::Refuted:
      return "refuted";
    case CertVerdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

ConverseIftCertificate converse_ift_certify(MapPair pair, const Vec& x,
                                            const CertifyConfig& cfg, par::Exec exec) {
  ConverseIftCertificate cert;
  cert.x = x;
  cert.y = evaluate(pair.g, x);

  cert.inverse = check_inverse_pair(pair, cfg.inverse_samples, cfg.inverse_tol,
                                    derive_seed(cfg.seed, "certify/inverse"), cfg.norm, exec);

  cert.jac_g = reg::fd_jacobian(pair.g, x, cfg.fd_step, cfg.scheme, exec);
  cert.jac_g.svd = reg::invertibility_report(cert.jac_g.jacobian, cfg.singular_rel,
                                             cfg.singular_abs);
  cert.jac_g.frechet_curve =
      reg::frechet_residual(pair.g, x, cert.jac_g.jacobian,
                            margin_radii(pair.g, x, cfg.frechet_radii, 4.0), cfg.sphere_samples,
                            derive_seed(cfg.seed, "certify/frechet"), cfg.norm, exec);

  cert.lipschitz_f = lipschitz_near(pair.f, cert.y, cfg.lipschitz_pairs,
                                    derive_seed(cfg.seed, "certify/lipschitz"), cfg.norm, exec);

  cert.jac_f = reg::fd_jacobian(pair.f, cert.y, cfg.fd_step, cfg.scheme, exec);
  cert.jac_f.svd = reg::invertibility_report(cert.jac_f.jacobian, cfg.singular_rel, 0.0);

  if (cert.jac_g.svd.invertible) {
    const Mat inv_jg = cert.jac_g.jacobian.inverse();
    cert.inverse_consistency = (cert.jac_f.jacobian - inv_jg).norm() / inv_jg.norm();
  } else {
    cert.inverse_consistency = std::numeric_limits<double>::infinity();
  }

  const std::vector<Vec> dirs = identity_check_directions(
      pair.g.domain.dim(), cfg.extra_directions, derive_seed(cfg.seed, "certify/directions"));
  // Small domains need the identity probes kept inside the ball.
  derived::StepSchedule id_schedule = cfg.identity_schedule;
  id_schedule.t0 = std::min(id_schedule.t0, 0.4 * pair.g.domain.margin(x));
  cert.identity = identity_derived_check(pair, x, dirs, id_schedule,
                                         cfg.identity_tol, exec);

  // Clause order fixed by the certificate contract; the first failure is
  // the refutation reason.
  if (!cert.inverse.passed) {
    cert.verdict = CertVerdict::Refuted;
    cert.reason = "inverse-check-failed";
  } else if (!cert.jac_g.svd.invertible) {
    cert.verdict = CertVerdict::Refuted;
    cert.reason = "jacobian-singular";
  } else if (cert.lipschitz_f.verdict == reg::LipschitzVerdict::Blowup) {
    cert.verdict = CertVerdict::Refuted;
    cert.reason = "f-not-lipschitz";
  } else if (cert.lipschitz_f.verdict == reg::LipschitzVerdict::Inconclusive) {
    cert.verdict = CertVerdict::Inconclusive;
    cert.reason = "lipschitz-inconclusive";
  } else if (!(cert.inverse_consistency <= cfg.consistency_tol)) {
    cert.verdict = CertVerdict::Refuted;
    cert.reason = "inverse-consistency";
  } else if (!(cert.identity.max_residual <= cfg.identity_tol)) {
    cert.verdict = CertVerdict::Refuted;
    cert.reason = "identity-residual";
  } else {
    cert.verdict = CertVerdict::Certified;
  }
  return cert;
}

}  // namespace lipdiff::lab
