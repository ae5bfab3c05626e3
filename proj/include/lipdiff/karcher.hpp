#pragma once

#include <span>
#include <string>
#include <vector>

#include "lipdiff/func_core.hpp"
#include "lipdiff/theorem_lab.hpp"

namespace lipdiff::spd {

// Matrix functions via symmetric eigendecomposition. sqrt/inv_sqrt/log
// require SPD input; exp accepts any symmetric matrix.
void require_symmetric(const Mat& m, double tol = 1e-12);
bool is_spd(const Mat& m, double* min_eigenvalue = nullptr);
Mat spd_sqrt(const Mat& m);
Mat spd_inv_sqrt(const Mat& m);
Mat spd_log(const Mat& m);
Mat sym_exp(const Mat& m);

// F(X) = sum_i log(X^-1/2 A_i X^-1/2); zero exactly at the Karcher mean.
Mat karcher_residual(const Mat& x, std::span<const Mat> operands);

struct KarcherTrace {
  struct Step {
    int k = 0;
    Mat x;
    double residual = 0.0;  // ||F(x)||_F
  };
  std::vector<Step> steps;
  bool converged = false;
  int iterations = 0;
  Mat mean;  // final iterate, SPD
  double final_residual = 0.0;
};

// Damped fixed-point iteration
//   X <- X^1/2 exp((1/n) F(X)) X^1/2
// initialized at the arithmetic mean. Non-convergence is reported in the
// trace, not thrown.
KarcherTrace karcher_mean(std::span<const Mat> operands, double tol = 1e-12,
                          int max_iter = 300);

// A # B = A^1/2 (A^-1/2 B A^-1/2)^1/2 A^1/2; closed form for n = 2.
Mat geometric_mean_two(const Mat& a, const Mat& b);

// Y with karcher_residual(X, fixed ∪ {Y}) = 0:
//   Y = X^1/2 exp(-sum_i log(X^-1/2 A_i X^-1/2)) X^1/2.
Mat solve_for_y(const Mat& x, std::span<const Mat> fixed);

struct KarcherProblem {
  std::vector<Mat> fixed;  // A_1 .. A_{n-1}
  Mat y0;                  // starting variable operand
};

// Wraps g = solve_for_y and f(Y) = karcher_mean(fixed ∪ {Y}) as maps on
// balls inside the cone (flattened coordinates, radius_factor * lambda_min).
MapPair make_karcher_pair(const KarcherProblem& problem, double radius_factor = 0.1,
                          double solver_tol = 1e-12, int solver_max_iter = 400);

// Runs converse_ift_certify on the pair at x = flatten(Lambda(fixed, Y0)).
// On a domain violation the ball radii shrink and the run retries; after
// `max_shrinks` failures a ConeViolation is thrown.
lab::ConverseIftCertificate karcher_regularity_pipeline(const KarcherProblem& problem,
                                                        const lab::CertifyConfig& cfg = {},
                                                        double radius_factor = 0.1,
                                                        int max_shrinks = 4,
                                                        par::Exec exec = par::Exec::Parallel);

// Plain-text format: first line the dimension d, then d whitespace-separated
// rows of d entries.
Mat load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Mat& m);

}  // namespace lipdiff::spd
