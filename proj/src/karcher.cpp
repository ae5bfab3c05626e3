#include "lipdiff/karcher.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace lipdiff::spd {

namespace {

Mat apply_scalar(const Mat& m, const std::function<double(double)>& fn, const char* who,
                 bool need_positive) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const Vec& vals = es.eigenvalues();
  if (need_positive && vals.minCoeff() <= 0.0) {
    std::ostringstream os;
    os << who << ": eigenvalue " << vals.minCoeff() << " is not positive";
    throw NotSpd(os.str());
  }
  Vec mapped(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) mapped[i] = fn(vals[i]);
  Mat out = es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

struct SqrtPair {
  Mat sqrt, inv_sqrt;
};

// One eigendecomposition for both X^1/2 and X^-1/2.
SqrtPair sqrt_pair(const Mat& m) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const Vec& vals = es.eigenvalues();
  if (vals.minCoeff() <= 0.0) throw NotSpd("sqrt_pair: matrix is not positive definite");
  Vec s(vals.size()), si(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    s[i] = std::sqrt(vals[i]);
    si[i] = 1.0 / s[i];
  }
  SqrtPair out;
  out.sqrt = symmetrize(es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose());
  out.inv_sqrt =
      symmetrize(es.eigenvectors() * si.asDiagonal() * es.eigenvectors().transpose());
  return out;
}

Mat residual_from_inv_sqrt(const Mat& xis, std::span<const Mat> operands) {
  Mat sum = Mat::Zero(xis.rows(), xis.cols());
  for (const Mat& a : operands) sum += spd_log(symmetrize(xis * a * xis));
  return symmetrize(sum);
}

}  // namespace

void require_symmetric(const Mat& m, double tol) {
  if (m.rows() != m.cols()) throw AsymmetricInput("matrix is not square");
  const double gap = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (gap > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "matrix is not symmetric (max asymmetry " << gap << ")";
    throw AsymmetricInput(os.str());
  }
}

bool is_spd(const Mat& m, double* min_eigenvalue) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  const double lam = es.eigenvalues().minCoeff();
  if (min_eigenvalue) *min_eigenvalue = lam;
  return lam > 0.0;
}

Mat spd_sqrt(const Mat& m) {
  return apply_scalar(m, [](double x) { return std::sqrt(x); }, "spd_sqrt", true);
}

Mat spd_inv_sqrt(const Mat& m) {
  return apply_scalar(m, [](double x) { return 1.0 / std::sqrt(x); }, "spd_inv_sqrt", true);
}

Mat spd_log(const Mat& m) {
  return apply_scalar(m, [](double x) { return std::log(x); }, "spd_log", true);
}

Mat sym_exp(const Mat& m) {
  return apply_scalar(m, [](double x) { return std::exp(x); }, "sym_exp", false);
}

Mat karcher_residual(const Mat& x, std::span<const Mat> operands) {
  if (operands.empty()) throw Error("karcher_residual: no operands");
  for (const Mat& a : operands) {
    if (a.rows() != x.rows()) throw Error("karcher_residual: dimension mismatch");
  }
  return residual_from_inv_sqrt(spd_inv_sqrt(x), operands);
}

KarcherTrace karcher_mean(std::span<const Mat> operands, double tol, int max_iter) {
  if (operands.empty()) throw Error("karcher_mean: no operands");
  if (!(tol > 0.0)) throw Error("karcher_mean: tol must be > 0");
  for (const Mat& a : operands) {
    if (!is_spd(a)) throw NotSpd("karcher_mean: operand is not SPD");
  }

  const double n = static_cast<double>(operands.size());
  Mat x = Mat::Zero(operands.front().rows(), operands.front().cols());
  for (const Mat& a : operands) x += a;
  x /= n;

  KarcherTrace trace;
  for (int k = 0; k <= max_iter; ++k) {
    const SqrtPair xsp = sqrt_pair(x);
    const Mat residual = residual_from_inv_sqrt(xsp.inv_sqrt, operands);
    const double rnorm = residual.norm();
    trace.steps.push_back({k, x, rnorm});
    trace.iterations = k;
    if (rnorm <= tol) {
      trace.converged = true;
      break;
    }
    if (k == max_iter) break;
    x = symmetrize(xsp.sqrt * sym_exp(residual / n) * xsp.sqrt);
  }
  trace.mean = x;
  trace.final_residual = trace.steps.back().residual;
  return trace;
}

Mat geometric_mean_two(const Mat& a, const Mat& b) {
  if (!is_spd(a) || !is_spd(b)) throw NotSpd("geometric_mean_two: operands must be SPD");
  const Mat as = spd_sqrt(a);
  const Mat ais = spd_inv_sqrt(a);
  return symmetrize(as * spd_sqrt(symmetrize(ais * b * ais)) * as);
}

Mat solve_for_y(const Mat& x, std::span<const Mat> fixed) {
  if (fixed.empty()) throw Error("solve_for_y: need at least one fixed operand");
  const SqrtPair xsp = sqrt_pair(x);
  const Mat sum = residual_from_inv_sqrt(xsp.inv_sqrt, fixed);
  const Mat y = symmetrize(xsp.sqrt * sym_exp(Mat(-sum)) * xsp.sqrt);

  std::vector<Mat> all(fixed.begin(), fixed.end());
  all.push_back(y);
  const double check = karcher_residual(x, all).norm();
  if (!(check <= 1e-10 * std::max(1.0, x.norm()))) {
    std::ostringstream os;
    os << "solve_for_y: residual check failed (" << check << ")";
    throw Error(os.str());
  }
  return y;
}

MapPair make_karcher_pair(const KarcherProblem& problem, double radius_factor,
                          double solver_tol, int solver_max_iter) {
  if (problem.fixed.empty()) throw Error("make_karcher_pair: no fixed operands");
  if (!is_spd(problem.y0)) throw NotSpd("make_karcher_pair: Y0 is not SPD");
  const int d = static_cast<int>(problem.y0.rows());

  std::vector<Mat> all(problem.fixed.begin(), problem.fixed.end());
  all.push_back(problem.y0);
  const KarcherTrace solve = karcher_mean(all, solver_tol, solver_max_iter);
  if (!solve.converged) {
    throw NoConvergence("make_karcher_pair: karcher_mean did not converge at X0");
  }
  const Mat x0 = solve.mean;

  double lam_x = 0.0, lam_y = 0.0;
  is_spd(x0, &lam_x);
  is_spd(problem.y0, &lam_y);

  std::vector<Mat> fixed = problem.fixed;

  EvaluableMap g;
  g.name = "karcher-g";
  g.codomain_dim = sym_coord_dim(d);
  g.fn = [fixed](const Vec& v) { return sym_flatten(solve_for_y(sym_unflatten(v), fixed)); };

  // Probes around X0 reach 0.4 * rx, so the Y-side ball must contain
  // image displacements up to 0.4 * rx * ||dg||. Size it from a
  // finite-difference probe of the closed-form g on the open cone,
  // shrinking rx when the cone margin at Y0 cannot absorb the images.
  g.domain = OpenDomain::spd_cone(d);
  Eigen::JacobiSVD<Mat> jg_svd(
      reg::fd_jacobian(g, sym_flatten(x0), 0.0, reg::FdScheme::Central, par::Exec::Serial)
          .jacobian);
  const double lg = std::max(jg_svd.singularValues()(0), 1e-8);
  const double lf =
      1.0 / std::max(jg_svd.singularValues()(jg_svd.singularValues().size() - 1), 1e-8);

  double rx = radius_factor * lam_x;
  double ry = std::min(0.9 * lam_y, 0.6 * lg * rx);
  if (ry < 0.6 * lg * rx) rx = ry / (0.6 * lg);
  g.domain = OpenDomain::ball(sym_flatten(x0), rx);

  EvaluableMap f;
  f.name = "karcher-f";
  f.domain = OpenDomain::ball(sym_flatten(problem.y0), ry);
  f.codomain_dim = sym_coord_dim(d);
  f.fn = [fixed, solver_tol, solver_max_iter](const Vec& v) {
    std::vector<Mat> ops(fixed.begin(), fixed.end());
    ops.push_back(sym_unflatten(v));
    const KarcherTrace t = karcher_mean(ops, solver_tol, solver_max_iter);
    if (!t.converged) {
      throw NoConvergence("karcher-f: mean solve did not converge");
    }
    return sym_flatten(t.mean);
  };

  MapPair pair;
  pair.g = g;
  pair.f = f;
  // Round trips must land inside the opposite ball: the f side samples a
  // region small enough that g(f(y)) stays within 0.75 * rx.
  pair.sample_ball_g = std::make_pair(g.domain.center, 0.25 * rx);
  pair.sample_ball_f =
      std::make_pair(f.domain.center, std::min(0.25 * ry, 0.6 * rx / lf));
  return pair;
}

lab::ConverseIftCertificate karcher_regularity_pipeline(const KarcherProblem& problem,
                                                        const lab::CertifyConfig& cfg,
                                                        double radius_factor, int max_shrinks,
                                                        par::Exec exec) {
  double factor = radius_factor;
  std::string last_error;
  for (int attempt = 0; attempt <= max_shrinks; ++attempt) {
    MapPair pair = make_karcher_pair(problem, factor);
    try {
      return lab::converse_ift_certify(pair, pair.g.domain.center, cfg, exec);
    } catch (const DomainViolation& e) {
      last_error = e.what();
    } catch (const NotSpd& e) {
      last_error = e.what();
    }
    factor *= 0.5;
  }
  throw ConeViolation("karcher_regularity_pipeline: probes kept leaving the cone (" +
                      last_error + ")");
}

Mat load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_matrix: cannot open " + path);
  int d = 0;
  in >> d;
  if (!in || d < 1) throw ParseError("load_matrix: bad dimension header in " + path);
  Mat m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (!(in >> m(i, j))) {
        throw ParseError("load_matrix: not enough entries in " + path);
      }
    }
  }
  return m;
}

void save_matrix(const std::string& path, const Mat& m) {
  std::ofstream out(path);
  if (!out) throw IoError("save_matrix: cannot open " + path);
  out << m.rows() << "\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << m(i, j) << (j + 1 == m.cols() ? "" : " ");
    }
    out << "\n";
  }
}

}  // namespace lipdiff::spd
