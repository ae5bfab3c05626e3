#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lipdiff/derived_set.hpp"
#include "lipdiff/func_core.hpp"
#include "lipdiff/regularity.hpp"

namespace lipdiff::lab {

// D(f∘g)(x,v) versus Df(g(x), g'(x,v)) on a shared schedule, with the
// per-step quantitative bound gap <= kappa * directional-error.
struct ChainRuleReport {
  Vec x, v;
  Vec g_directional;  // g'(x,v)
  derived::DerivedSetSample lhs;  // f∘g at (x, v)
  derived::DerivedSetSample rhs;  // f at (g(x), g'(x,v))
  double hausdorff_gap = 0.0;     // between cluster representative sets
  double hull_gap = 0.0;          // between tail hulls
  double kappa = 0.0;             // measured local Lipschitz constant of f
  struct TraceEntry {
    double t = 0.0;
    double quotient_gap = 0.0;     // ||lhs_t - rhs_t||
    double bound = 0.0;            // kappa * ||g-quotient_t - g'(x,v)||
    bool within_bound = false;
  };
  std::vector<TraceEntry> trace;
  bool all_within_bound = false;
};

struct ChainRuleConfig {
  double directional_tol = 1e-4;
  double cluster_tol = 0.0;  // 0 -> default
  int lipschitz_pairs = 200;
  double bound_rel_slack = 0.25;
  double bound_abs_slack = 1e-9;
  std::uint64_t seed = 1;
  Norm norm = Norm::Euclidean;
};

ChainRuleReport chain_rule_check(const MapPair& pair, const Vec& x, const Vec& v,
                                 const derived::StepSchedule& schedule,
                                 const ChainRuleConfig& cfg = {},
                                 par::Exec exec = par::Exec::Parallel);

struct IdentityCheckReport {
  std::vector<std::pair<Vec, double>> residuals;  // (direction, ||rep - v||)
  double max_residual = 0.0;
};

// D(f∘g)(x, v) must be the singleton {v} for every direction.
IdentityCheckReport identity_derived_check(const MapPair& pair, const Vec& x,
                                           std::span<const Vec> directions,
                                           const derived::StepSchedule& schedule, double tol,
                                           par::Exec exec = par::Exec::Parallel);

// Standard basis plus `extra` seeded random unit directions.
std::vector<Vec> identity_check_directions(int dim, int extra, std::uint64_t seed);

// z_t = (f(y+tw)-f(y))/t; checks the algebraic identity
// (g(x+t z_t)-g(x))/t = w, the decay of ||w - J z_t||, and the Lipschitz
// bound max ||z_t|| <= M_f ||w||.
struct DensityProbeReport {
  Vec x, y, w;
  struct Entry {
    double t = 0.0;
    Vec z;
    double z_norm = 0.0;
    double step1_residual = 0.0;  // ||(g(x+t z_t)-g(x))/t - w||
    double jac_gap = 0.0;         // ||w - J z_t||
  };
  std::vector<Entry> trace;  // ordered by decreasing t
  Mat jacobian;
  double kappa = 0.0;       // measured Lipschitz constant of f on ball(y, t0*||w||)
  double max_z_norm = 0.0;
  bool bound_ok = false;       // max ||z_t|| <= kappa*||w||*(1+slack)
  double max_step1_residual = 0.0;
  bool gap_decreasing = false;  // ||w - J z_t|| nonincreasing within noise
  double final_gap = 0.0;       // at the smallest t
};

struct DensityProbeConfig {
  double bound_slack = 0.5;
  int lipschitz_pairs = 256;
  std::uint64_t seed = 1;
  Norm norm = Norm::Euclidean;
};

DensityProbeReport density_probe(const MapPair& pair, const Vec& x, const Vec& w,
                                 const derived::StepSchedule& schedule,
                                 const DensityProbeConfig& cfg = {},
                                 par::Exec exec = par::Exec::Parallel);

enum class CertVerdict { Certified, Refuted, Inconclusive };

const char* cert_verdict_name(CertVerdict v);

struct CertifyConfig {
  double inverse_tol = 1e-9;
  int inverse_samples = 200;
  double fd_step = 0.0;  // 0 -> default
  reg::FdScheme scheme = reg::FdScheme::Central;
  double singular_rel = 1e-8;
  // Absolute floor for the invertibility threshold: derivatives measured
  // below it are indistinguishable from zero at central-difference accuracy.
  double singular_abs = 1e-8;
  int lipschitz_pairs = 256;
  double consistency_tol = 1e-5;
  double identity_tol = 1e-6;
  derived::StepSchedule identity_schedule{1e-2, 0.7, 20};
  int frechet_radii = 4;
  int sphere_samples = 64;
  int extra_directions = 8;
  std::uint64_t seed = 1;
  Norm norm = Norm::Euclidean;
};

// Verdict + every measured hypothesis/conclusion of the converse statement.
// Lipschitzness is measured on a ball around y = g(x), so a certificate
// asserts the local form: f Lipschitz near y implies dg_x invertible with
// df_y its inverse.
struct ConverseIftCertificate {
  Vec x, y;
  InverseCheckReport inverse;
  reg::JacobianReport jac_g;            // with frechet curve and svd data
  reg::LipschitzEstimate lipschitz_f;   // near y
  reg::JacobianReport jac_f;            // at y
  double inverse_consistency = 0.0;     // ||J_f - J_g^-1|| / ||J_g^-1||
  IdentityCheckReport identity;
  CertVerdict verdict = CertVerdict::Inconclusive;
  std::string reason;  // first failed clause when refuted
};

ConverseIftCertificate converse_ift_certify(MapPair pair, const Vec& x,
                                            const CertifyConfig& cfg = {},
                                            par::Exec exec = par::Exec::Parallel);

}  // namespace lipdiff::lab
