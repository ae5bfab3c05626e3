#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lipdiff/func_core.hpp"

namespace lipdiff::derived {

/// Geometric step sequence t_k = t0 * ratio^k, k = 0..count-1.
struct StepSchedule {
  double t0 = 1e-2;
  double ratio = 0.7;
  int count = 60;

  StepSchedule() = default;
  StepSchedule(double t0_, double ratio_, int count_);
  std::vector<double> steps() const;  // strictly decreasing
  StepSchedule scaled(double c) const;
};

enum class Verdict { Singleton, Multivalued, Divergent, Empty };

const char* verdict_name(Verdict v);

struct Cluster {
  Vec representative;  // centroid of members
  int members = 0;
  double spread = 0.0;  // max distance from representative to a member
};

// Difference quotients (f(y + t v) - f(y)) / t plus the cluster summary of
// their accumulation behaviour on the schedule tail.
struct DerivedSetSample {
  Vec base, direction;
  std::vector<std::pair<double, Vec>> quotients;  // ordered by decreasing t
  int tail_start = 0;                             // clustering uses quotients[tail_start..]
  double cluster_tol = 0.0;
  std::vector<Cluster> clusters;
  Verdict verdict = Verdict::Empty;
  // Componentwise hull of the tail quotients (the clustered points).
  Vec hull_lo, hull_hi;

  std::vector<Vec> representatives() const;
};

double default_cluster_tol(const Vec& direction);

// Raw delta-approximating snapshot: quotients at the canonical geometric
// grid points inside (0, delta). Grids for delta1 < delta2 nest.
DerivedSetSample delta_derived_set(const EvaluableMap& f, const Vec& y, const Vec& v,
                                   double delta, int grid_count,
                                   par::Exec exec = par::Exec::Parallel);

// Clusters the tail (last half) of the schedule's quotients. Singleton
// verdicts approximate the one-sided directional derivative.
DerivedSetSample derived_set_estimate(const EvaluableMap& f, const Vec& y, const Vec& v,
                                      const StepSchedule& schedule, double cluster_tol = 0.0,
                                      par::Exec exec = par::Exec::Parallel);

struct DirectionalResult {
  Verdict verdict = Verdict::Empty;
  std::optional<Vec> value;  // set iff verdict == Singleton with spread <= tol
  double spread = 0.0;
};

DirectionalResult one_sided_directional(const EvaluableMap& f, const Vec& y, const Vec& v,
                                        const StepSchedule& schedule, double tol,
                                        par::Exec exec = par::Exec::Parallel);

// Exists when the one-sided derivatives along v and -v agree up to sign.
std::optional<Vec> bilateral_directional(const EvaluableMap& f, const Vec& y, const Vec& v,
                                         const StepSchedule& schedule, double tol);

struct GateauxCandidate {
  Vec x;
  Mat matrix;  // columns assembled from +e_i one-sided derivatives
  std::vector<std::pair<Vec, Vec>> directional;  // (direction, derivative)
  double linearity_residual = 0.0;    // max over probes of ||g'(x,v) - M v||
  double homogeneity_residual = 0.0;  // max_i ||g'(x,e_i) + g'(x,-e_i)||
};

// Probes +-e_i and `extra_probes` seeded random unit directions.
GateauxCandidate gateaux_assemble(const EvaluableMap& g, const Vec& x,
                                  const StepSchedule& schedule, double tol,
                                  int extra_probes = 8, std::uint64_t seed = 1,
                                  par::Exec exec = par::Exec::Parallel);

// Symmetric Hausdorff distance between two finite point sets.
double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b);

// Max componentwise deviation between the two samples' tail hulls.
double hull_gap(const DerivedSetSample& a, const DerivedSetSample& b);

}  // namespace lipdiff::derived
