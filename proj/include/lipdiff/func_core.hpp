#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "lipdiff/errors.hpp"
#include "lipdiff/parallel.hpp"

namespace lipdiff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Norm { Euclidean, Sup };

double vec_norm(const Vec& v, Norm norm = Norm::Euclidean);
void require_finite(const Vec& v, const char* who);

// Coordinates for symmetric d x d matrices: row-major upper triangle with
// off-diagonal entries scaled by sqrt(2), so the euclidean norm of the
// coordinate vector equals the Frobenius norm of the matrix.
int sym_coord_dim(int matrix_dim);
int sym_matrix_dim(int coord_dim);
Vec sym_flatten(const Mat& m);
Mat sym_unflatten(const Vec& v);

/// Open subset of R^n. Membership is strict: boundary points are outside.
struct OpenDomain {
  enum class Kind { Ball, Box, SpdCone };

  static OpenDomain ball(Vec center, double radius);
  static OpenDomain box(Vec lo, Vec hi);
  // Cone of symmetric positive-definite matrices in flattened coordinates.
  static OpenDomain spd_cone(int matrix_dim);

  Kind kind = Kind::Ball;
  Vec center;          // ball
  double radius = 0.0;
  Vec lo, hi;          // box
  int matrix_dim = 0;  // spd cone

  int dim() const;
  bool contains(const Vec& p) const;
  // Lower bound on the distance from p to the boundary; <= 0 outside.
  double margin(const Vec& p) const;
  // Ball used when drawing random samples from the domain.
  std::pair<Vec, double> sampling_ball() const;
  std::string describe() const;
};

struct EvaluableMap {
  std::string name;
  OpenDomain domain;
  int codomain_dim = 0;
  std::function<Vec(const Vec&)> fn;
};

// Evaluates map.fn at p after a strict domain check. Evaluators must be
// pure; two calls with equal inputs give bitwise-equal outputs.
Vec evaluate(const EvaluableMap& map, const Vec& p);

EvaluableMap make_composite(const EvaluableMap& inner, const EvaluableMap& outer,
                            std::string name = {});

struct MapPair {
  EvaluableMap g;  // g : U -> V
  EvaluableMap f;  // f : V -> U
  bool declared_inverse = false;
  // Regions used by check_inverse_pair; default is the domains' sampling
  // balls. Pairs whose image is a proper subset of the codomain override
  // these so composite evaluations stay inside both domains.
  std::optional<std::pair<Vec, double>> sample_ball_g;
  std::optional<std::pair<Vec, double>> sample_ball_f;
};

struct InverseCheckReport {
  double max_fg_residual = 0.0;  // max ||f(g(x)) - x||
  double max_gf_residual = 0.0;  // max ||g(f(y)) - y||
  int samples = 0;
  double tol = 0.0;
  bool passed = false;
};

// Draws sample_count points from each side's sampling ball and measures the
// worst round-trip residual. Sets pair.declared_inverse on success.
InverseCheckReport check_inverse_pair(MapPair& pair, int sample_count, double tol,
                                      std::uint64_t seed, Norm norm = Norm::Euclidean,
                                      par::Exec exec = par::Exec::Parallel);

}  // namespace lipdiff
