#include "lipdiff/func_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

#include "lipdiff/rng.hpp"

namespace lipdiff {

double vec_norm(const Vec& v, Norm norm) {
  return norm == Norm::Euclidean ? v.norm() : v.lpNorm<Eigen::Infinity>();
}

void require_finite(const Vec& v, const char* who) {
  if (!v.allFinite()) {
    throw Error(std::string(who) + ": non-finite entries");
  }
  if (v.size() < 1) {
    throw Error(std::string(who) + ": dimension must be >= 1");
  }
}

int sym_coord_dim(int matrix_dim) { return matrix_dim * (matrix_dim + 1) / 2; }

int sym_matrix_dim(int coord_dim) {
  const int d = static_cast<int>(std::lround((std::sqrt(8.0 * coord_dim + 1.0) - 1.0) / 2.0));
  if (sym_coord_dim(d) != coord_dim) {
    throw Error("sym_matrix_dim: " + std::to_string(coord_dim) +
                " is not a triangular dimension");
  }
  return d;
}

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

Vec sym_flatten(const Mat& m) {
  const int d = static_cast<int>(m.rows());
  Vec out(sym_coord_dim(d));
  int k = 0;
  for (int i = 0; i < d; ++i) {
    out[k++] = m(i, i);
    for (int j = i + 1; j < d; ++j) out[k++] = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
  return out;
}

Mat sym_unflatten(const Vec& v) {
  const int d = sym_matrix_dim(static_cast<int>(v.size()));
  Mat m(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) {
    m(i, i) = v[k++];
    for (int j = i + 1; j < d; ++j) {
      m(i, j) = v[k] / kSqrt2;
      m(j, i) = m(i, j);
      ++k;
    }
  }
  return m;
}

OpenDomain OpenDomain::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw Error("OpenDomain::ball: radius must be > 0");
  require_finite(center, "OpenDomain::ball center");
  OpenDomain d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

OpenDomain OpenDomain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw Error("OpenDomain::box: bound dimensions differ");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw Error("OpenDomain::box: lower must be < upper componentwise");
  }
  OpenDomain d;
  d.kind = Kind::Box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

OpenDomain OpenDomain::spd_cone(int matrix_dim) {
  if (matrix_dim < 1) throw Error("OpenDomain::spd_cone: matrix dimension must be >= 1");
  OpenDomain d;
  d.kind = Kind::SpdCone;
  d.matrix_dim = matrix_dim;
  return d;
}

int OpenDomain::dim() const {
  switch (kind) {
    case Kind::Ball:
      return static_cast<int>(center.size());
    case Kind::Box:
      return static_cast<int>(lo.size());
    case Kind::SpdCone:
      return sym_coord_dim(matrix_dim);
  }
  return 0;
}

bool OpenDomain::contains(const Vec& p) const { return margin(p) > 0.0; }

double OpenDomain::margin(const Vec& p) const {
  if (p.size() != dim()) return -1.0;
  switch (kind) {
    case Kind::Ball:
      return radius - (p - center).norm();
    case Kind::Box: {
      double m = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        m = std::min(m, std::min(p[i] - lo[i], hi[i] - p[i]));
      }
      return m;
    }
    case Kind::SpdCone: {
      // A Frobenius perturbation below lambda_min keeps the matrix SPD.
      Eigen::SelfAdjointEigenSolver<Mat> es(sym_unflatten(p), Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff();
    }
  }
  return -1.0;
}

std::pair<Vec, double> OpenDomain::sampling_ball() const {
  switch (kind) {
    case Kind::Ball:
      return {center, 0.9 * radius};
    case Kind::Box: {
      Vec mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo).minCoeff();
      return {mid, 0.9 * half};
    }
    case Kind::SpdCone:
      // Ball around the identity; stays inside the cone for radius < 1.
      return {sym_flatten(Mat::Identity(matrix_dim, matrix_dim)), 0.45};
  }
  throw Error("sampling_ball: unknown domain kind");
}

std::string OpenDomain::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Ball:
      os << "ball(r=" << radius << ", dim=" << dim() << ")";
      break;
    case Kind::Box:
      os << "box(dim=" << dim() << ")";
      break;
    case Kind::SpdCone:
      os << "spd-cone(d=" << matrix_dim << ")";
      break;
  }
  return os.str();
}

Vec evaluate(const EvaluableMap& map, const Vec& p) {
  require_finite(p, "evaluate: input");
  if (!map.domain.contains(p)) {
    std::ostringstream os;
    os << "evaluate: point outside open domain of '" << map.name << "' ("
       << map.domain.describe() << "), margin=" << map.domain.margin(p);
    throw DomainViolation(os.str());
  }
  Vec out = map.fn(p);
  if (out.size() != map.codomain_dim) {
    throw Error("evaluate: '" + map.name + "' returned wrong dimension");
  }
  require_finite(out, "evaluate: output");
  return out;
}

EvaluableMap make_composite(const EvaluableMap& inner, const EvaluableMap& outer,
                            std::string name) {
  EvaluableMap c;
  c.name = name.empty() ? outer.name + "∘" + inner.name : std::move(name);
  c.domain = inner.domain;
  c.codomain_dim = outer.codomain_dim;
  c.fn = [inner, outer](const Vec& p) { return evaluate(outer, evaluate(inner, p)); };
  return c;
}

InverseCheckReport check_inverse_pair(MapPair& pair, int sample_count, double tol,
                                      std::uint64_t seed, Norm norm, par::Exec exec) {
  if (sample_count < 1) throw Error("check_inverse_pair: sample_count must be >= 1");
  if (!(tol > 0.0)) throw Error("check_inverse_pair: tol must be > 0");
  if (pair.g.domain.dim() != pair.f.codomain_dim ||
      pair.f.domain.dim() != pair.g.codomain_dim) {
    throw Error("check_inverse_pair: pair dimensions are inconsistent");
  }

  const auto [cg, rg] = pair.sample_ball_g ? *pair.sample_ball_g : pair.g.domain.sampling_ball();
  const auto [cf, rf] = pair.sample_ball_f ? *pair.sample_ball_f : pair.f.domain.sampling_ball();

  Rng rng_g(derive_seed(seed, "inverse-check/g-side"));
  Rng rng_f(derive_seed(seed, "inverse-check/f-side"));
  std::vector<Vec> xs(sample_count), ys(sample_count);
  for (int i = 0; i < sample_count; ++i) xs[i] = rng_g.in_ball(cg, rg);
  for (int i = 0; i < sample_count; ++i) ys[i] = rng_f.in_ball(cf, rf);

  InverseCheckReport rep;
  rep.samples = sample_count;
  rep.tol = tol;
  rep.max_fg_residual = par::max_indexed(
      static_cast<std::size_t>(sample_count),
      [&](std::size_t i) {
        return vec_norm(evaluate(pair.f, evaluate(pair.g, xs[i])) - xs[i], norm);
      },
      exec);
  rep.max_gf_residual = par::max_indexed(
      static_cast<std::size_t>(sample_count),
      [&](std::size_t i) {
        return vec_norm(evaluate(pair.g, evaluate(pair.f, ys[i])) - ys[i], norm);
      },
      exec);
  rep.passed = rep.max_fg_residual <= tol && rep.max_gf_residual <= tol;
  pair.declared_inverse = rep.passed;
  return rep;
}

}  // namespace lipdiff
