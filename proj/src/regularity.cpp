#include "lipdiff/regularity.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lipdiff/rng.hpp"

namespace lipdiff::reg {

double default_fd_step() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

JacobianReport fd_jacobian(const EvaluableMap& g, const Vec& x, double step, FdScheme scheme,
                           par::Exec exec) {
  const int n = g.domain.dim();
  if (x.size() != n) throw Error("fd_jacobian: point dimension mismatch");
  if (step <= 0.0) step = default_fd_step();

  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = step * std::max(1.0, std::abs(x[i]));
  for (int i = 0; i < n; ++i) {
    for (const double s : {+h[i], -h[i]}) {
      if (scheme == FdScheme::Forward && s < 0) continue;
      Vec probe = x;
      probe[i] += s;
      if (!g.domain.contains(probe)) {
        std::ostringstream os;
        os << "fd_jacobian: probe x" << (s > 0 ? "+" : "-") << "h*e_" << i
           << " leaves the domain of '" << g.name << "'";
        throw DomainViolation(os.str());
      }
    }
  }

  JacobianReport rep;
  rep.x = x;
  rep.step = step;
  rep.scheme = scheme;
  rep.jacobian.resize(g.codomain_dim, n);

  const Vec gx = evaluate(g, x);
  par::fill_indexed(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        Vec plus = x;
        plus[i] += h[i];
        if (scheme == FdScheme::Forward) {
          rep.jacobian.col(i) = (evaluate(g, plus) - gx) / h[i];
        } else {
          Vec minus = x;
          minus[i] -= h[i];
          rep.jacobian.col(i) = (evaluate(g, plus) - evaluate(g, minus)) / (2.0 * h[i]);
        }
      },
      exec);
  return rep;
}

SingularData invertibility_report(const Mat& jacobian, double rel_threshold,
                                  double abs_threshold) {
  if (!jacobian.allFinite()) throw Error("invertibility_report: non-finite entries");
  SingularData d;
  Eigen::JacobiSVD<Mat> svd(jacobian);
  const auto& sv = svd.singularValues();
  d.singular_values.assign(sv.data(), sv.data() + sv.size());
  d.sigma_max = sv.size() ? sv(0) : 0.0;
  d.sigma_min = sv.size() ? sv(sv.size() - 1) : 0.0;
  d.condition = d.sigma_min > 0.0 ? d.sigma_max / d.sigma_min
                                  : std::numeric_limits<double>::infinity();
  if (jacobian.rows() != jacobian.cols()) {
    d.invertible = false;
    d.reason = "non-square";
    return d;
  }
  const double threshold = std::max(rel_threshold * d.sigma_max, abs_threshold);
  d.invertible = d.sigma_min > threshold;
  if (!d.invertible) {
    std::ostringstream os;
    os << "sigma_min=" << d.sigma_min << " <= threshold=" << threshold;
    d.reason = os.str();
  }
  return d;
}

std::vector<std::pair<double, double>> frechet_residual(const EvaluableMap& g, const Vec& x,
                                                        const Mat& jacobian,
                                                        const std::vector<double>& radii,
                                                        int sphere_samples, std::uint64_t seed,
                                                        Norm norm, par::Exec exec) {
  if (radii.empty()) throw Error("frechet_residual: no radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw Error("frechet_residual: radii must decrease");
  }
  if (sphere_samples < 1) throw Error("frechet_residual: sphere_samples must be >= 1");
  if (g.domain.margin(x) <= radii.front()) {
    throw DomainViolation("frechet_residual: largest radius exceeds the domain margin");
  }

  const int n = g.domain.dim();
  Rng rng(derive_seed(seed, "frechet/sphere"));
  std::vector<Vec> dirs(sphere_samples);
  for (int s = 0; s < sphere_samples; ++s) dirs[s] = rng.unit_vector(n);

  const Vec gx = evaluate(g, x);
  std::vector<std::pair<double, double>> curve;
  curve.reserve(radii.size());
  for (const double r : radii) {
    const double sup = par::max_indexed(
        dirs.size(),
        [&](std::size_t s) {
          const Vec u = r * dirs[s];
          return vec_norm(evaluate(g, Vec(x + u)) - gx - jacobian * u, norm) / u.norm();
        },
        exec);
    curve.emplace_back(r, sup);
  }
  return curve;
}

const char* lipschitz_verdict_name(LipschitzVerdict v) {
  switch (v) {
    case LipschitzVerdict::Lipschitz:
      return "lipschitz";
    case LipschitzVerdict::Blowup:
      return "blowup";
    case LipschitzVerdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

LipschitzEstimate lipschitz_estimate(const EvaluableMap& f, const Vec& center,
                                     const std::vector<double>& radii, int pairs_per_radius,
                                     std::uint64_t seed, Norm norm, par::Exec exec) {
  if (radii.empty()) throw Error("lipschitz_estimate: no radii");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw Error("lipschitz_estimate: radii must decrease");
  }
  if (pairs_per_radius < 8) throw Error("lipschitz_estimate: need >= 8 pairs per radius");
  if (f.domain.margin(center) <= radii.front()) {
    throw DomainViolation("lipschitz_estimate: largest ball exceeds the domain margin");
  }

  // Unit-ball pair pattern reused at every radius.
  const int n = f.domain.dim();
  Rng rng(derive_seed(seed, "lipschitz/pairs"));
  std::vector<std::pair<Vec, Vec>> pattern;
  pattern.reserve(pairs_per_radius);
  const Vec origin = Vec::Zero(n);
  const int uniform_pairs = pairs_per_radius / 2;
  for (int i = 0; i < uniform_pairs; ++i) {
    pattern.emplace_back(rng.in_ball(origin, 1.0), rng.in_ball(origin, 1.0));
  }
  for (int i = uniform_pairs; i < pairs_per_radius; ++i) {
    const int k = 1 + (i - uniform_pairs) % 4;  // separation 10^-k
    const Vec base = rng.in_ball(origin, 0.9);
    const Vec sep = std::pow(10.0, -k) * rng.unit_vector(n);
    pattern.emplace_back(base, Vec(base + sep));
  }

  LipschitzEstimate est;
  est.center = center;
  for (const double r : radii) {
    const double m = par::max_indexed(
        pattern.size(),
        [&](std::size_t i) {
          const Vec y1 = center + r * pattern[i].first;
          const Vec y2 = center + r * pattern[i].second;
          const double sep = vec_norm(Vec(y1 - y2), norm);
          if (sep < 1e-14) return 0.0;  // degenerate pair, skipped
          return vec_norm(Vec(evaluate(f, y1) - evaluate(f, y2)), norm) / sep;
        },
        exec);
    est.profile.push_back({r, m, pairs_per_radius});
    est.max_estimate = std::max(est.max_estimate, m);
  }

  double min_m = std::numeric_limits<double>::infinity();
  double max_m = 0.0;
  for (const auto& e : est.profile) {
    min_m = std::min(min_m, e.estimate);
    max_m = std::max(max_m, e.estimate);
  }
  if (max_m <= 1.5 * min_m) {
    est.verdict = LipschitzVerdict::Lipschitz;
  } else if (est.profile.back().estimate >= 10.0 * est.profile.front().estimate) {
    est.verdict = LipschitzVerdict::Blowup;
  } else {
    est.verdict = LipschitzVerdict::Inconclusive;
  }
  return est;
}

}  // namespace lipdiff::reg
