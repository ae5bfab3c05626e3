#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lipdiff/func_core.hpp"

namespace lipdiff::reg {

enum class FdScheme { Forward, Central };

// eps^(1/3): truncation/roundoff balance for central differences.
double default_fd_step();

struct SingularData {
  std::vector<double> singular_values;  // descending
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double condition = 0.0;  // +inf when singular
  bool invertible = false;
  std::string reason;  // set when not invertible
};

struct JacobianReport {
  Vec x;
  Mat jacobian;
  double step = 0.0;
  FdScheme scheme = FdScheme::Central;
  SingularData svd;
  // (radius, sup over sampled sphere of ||g(x+u)-g(x)-J u|| / ||u||),
  // radii strictly decreasing.
  std::vector<std::pair<double, double>> frechet_curve;
};

// Finite-difference derivative matrix; column i uses h = step*max(1,|x_i|).
JacobianReport fd_jacobian(const EvaluableMap& g, const Vec& x, double step = 0.0,
                           FdScheme scheme = FdScheme::Central,
                           par::Exec exec = par::Exec::Parallel);

// Verdict is invertible iff the matrix is square and
// sigma_min > max(rel_threshold * sigma_max, abs_threshold).
SingularData invertibility_report(const Mat& jacobian, double rel_threshold = 1e-8,
                                  double abs_threshold = 0.0);

std::vector<std::pair<double, double>> frechet_residual(
    const EvaluableMap& g, const Vec& x, const Mat& jacobian,
    const std::vector<double>& radii, int sphere_samples, std::uint64_t seed,
    Norm norm = Norm::Euclidean, par::Exec exec = par::Exec::Parallel);

enum class LipschitzVerdict { Lipschitz, Blowup, Inconclusive };

const char* lipschitz_verdict_name(LipschitzVerdict v);

struct LipschitzEstimate {
  Vec center;
  struct RadiusEntry {
    double radius = 0.0;
    double estimate = 0.0;  // max sampled difference quotient
    int pairs = 0;
  };
  std::vector<RadiusEntry> profile;  // radii decreasing
  LipschitzVerdict verdict = LipschitzVerdict::Inconclusive;
  double max_estimate = 0.0;
};

// Samples pair quotients ||f(y1)-f(y2)|| / ||y1-y2|| in shrinking balls.
// One unit-ball pair pattern is drawn per call and scaled to every radius,
// so the profile compares the same pair geometry across radii. Half the
// pattern is uniform pairs, half short-separation pairs (separation
// r*10^-k, k=1..4) that expose blowup near a singular point.
LipschitzEstimate lipschitz_estimate(const EvaluableMap& f, const Vec& center,
                                     const std::vector<double>& radii, int pairs_per_radius,
                                     std::uint64_t seed, Norm norm = Norm::Euclidean,
                                     par::Exec exec = par::Exec::Parallel);

}  // namespace lipdiff::reg
