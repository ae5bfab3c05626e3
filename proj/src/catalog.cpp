#include "lipdiff/catalog.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <mutex>

#include "lipdiff/karcher.hpp"

namespace lipdiff {

double tsinlog_scalar(double t) {
  if (t == 0.0) return 0.0;
  return t * std::sin(std::log(std::abs(t)));
}

namespace {

EvaluableMap scalar_map(std::string name, OpenDomain domain, std::function<double(double)> fn) {
  EvaluableMap m;
  m.name = std::move(name);
  m.domain = std::move(domain);
  m.codomain_dim = 1;
  m.fn = [fn = std::move(fn)](const Vec& p) {
    Vec out(1);
    out[0] = fn(p[0]);
    return out;
  };
  return m;
}

MapPair make_identity_pair(int n) {
  EvaluableMap id;
  id.name = "identity-" + std::to_string(n);
  id.domain = OpenDomain::ball(Vec::Zero(n), 1.0);
  id.codomain_dim = n;
  id.fn = [](const Vec& p) { return p; };
  MapPair pair;
  pair.g = id;
  pair.f = id;
  return pair;
}

MapPair make_cube_pair(const CatalogParams&) {
  MapPair pair;
  pair.g = scalar_map("cube-g", OpenDomain::ball(Vec::Zero(1), 1.0),
                      [](double x) { return x * x * x; });
  pair.f = scalar_map("cube-f", OpenDomain::ball(Vec::Zero(1), 1.0),
                      [](double y) { return std::cbrt(y); });
  return pair;
}

MapPair make_exp_log_pair(const CatalogParams&) {
  MapPair pair;
  Vec lo(1), hi(1);
  lo[0] = std::exp(-1.0);
  hi[0] = std::exp(1.0);
  pair.g = scalar_map("exp", OpenDomain::ball(Vec::Zero(1), 1.0),
                      [](double x) { return std::exp(x); });
  pair.f = scalar_map("log", OpenDomain::box(lo, hi), [](double y) { return std::log(y); });
  return pair;
}

MapPair make_affine_pair(const CatalogParams& params) {
  Mat a(2, 2);
  a << 2.0, 0.0, 0.0, 3.0;
  if (params.matrix) a = *params.matrix;
  const int n = static_cast<int>(a.rows());
  Vec b = Vec::Zero(n);
  if (params.offset) b = *params.offset;
  const Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) throw Error("catalog affine: matrix A must be invertible");
  const Mat a_inv = lu.inverse();

  // Domains sized so each map's image of its sampling ball stays strictly
  // inside the other domain.
  const double r_u = 10.0;
  Eigen::JacobiSVD<Mat> svd(a);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double r_v = 1.2 * smax * r_u;

  MapPair pair;
  pair.g.name = "affine-g";
  pair.g.domain = OpenDomain::ball(Vec::Zero(n), r_u);
  pair.g.codomain_dim = n;
  pair.g.fn = [a, b](const Vec& x) { return Vec(a * x + b); };
  pair.f.name = "affine-f";
  pair.f.domain = OpenDomain::ball(b, r_v);
  pair.f.codomain_dim = n;
  pair.f.fn = [a_inv, b](const Vec& y) { return Vec(a_inv * (y - b)); };
  pair.sample_ball_g = std::make_pair(Vec(Vec::Zero(n)), 0.9 * r_u);
  pair.sample_ball_f = std::make_pair(b, 0.9 * smin * r_u);
  return pair;
}

// 2-D polynomial diffeomorphism (shear by a quadratic).
MapPair make_poly2d_pair(const CatalogParams&) {
  Vec lo(2), hi(2);
  lo << -4.0, -2.0;
  hi << 4.0, 2.0;
  MapPair pair;
  pair.g.name = "poly2d-g";
  pair.g.domain = OpenDomain::box(lo, hi);
  pair.g.codomain_dim = 2;
  pair.g.fn = [](const Vec& x) {
    Vec y(2);
    y[0] = x[0] + x[1] * x[1];
    y[1] = x[1];
    return y;
  };
  pair.f.name = "poly2d-f";
  pair.f.domain = OpenDomain::box(lo, hi);
  pair.f.codomain_dim = 2;
  pair.f.fn = [](const Vec& y) {
    Vec x(2);
    x[0] = y[0] - y[1] * y[1];
    x[1] = y[1];
    return x;
  };
  pair.sample_ball_g = std::make_pair(Vec(Vec::Zero(2)), 1.0);
  pair.sample_ball_f = std::make_pair(Vec(Vec::Zero(2)), 1.0);
  return pair;
}

spd::KarcherProblem default_karcher_problem(const CatalogParams& params) {
  spd::KarcherProblem p;
  if (!params.fixed_operands.empty()) {
    p.fixed = params.fixed_operands;
  } else {
    Mat a(2, 2);
    a << 2.0, 0.5, 0.5, 1.0;
    p.fixed = {a};
  }
  if (params.y0) {
    p.y0 = *params.y0;
  } else {
    const int d = static_cast<int>(p.fixed.front().rows());
    Mat y0 = Mat::Identity(d, d);
    if (d >= 2) {
      y0(0, 0) = 1.5;
      y0(1, 1) = 0.8;
    }
    p.y0 = y0;
  }
  return p;
}

MapPair make_karcher_catalog_pair(const CatalogParams& params) {
  return spd::make_karcher_pair(default_karcher_problem(params));
}

EvaluableMap make_tsinlog_map(const CatalogParams&) {
  return scalar_map("tsinlog", OpenDomain::ball(Vec::Zero(1), 1.0), tsinlog_scalar);
}

// g(t) = (t, 0) into R^2 composed with f(a, b) = tsinlog(a): both sides of
// the chain rule reduce to sampling sin(log t).
MapPair make_tsinlog_composite_pair(const CatalogParams&) {
  MapPair pair;
  pair.g.name = "embed-line";
  pair.g.domain = OpenDomain::ball(Vec::Zero(1), 0.9);
  pair.g.codomain_dim = 2;
  pair.g.fn = [](const Vec& x) {
    Vec y(2);
    y[0] = x[0];
    y[1] = 0.0;
    return y;
  };
  pair.f.name = "tsinlog-first";
  pair.f.domain = OpenDomain::ball(Vec::Zero(2), 1.0);
  pair.f.codomain_dim = 1;
  pair.f.fn = [](const Vec& y) {
    Vec out(1);
    out[0] = tsinlog_scalar(y[0]);
    return out;
  };
  return pair;
}

EvaluableMap make_karcher_g_map(const CatalogParams& params) {
  return spd::make_karcher_pair(default_karcher_problem(params)).g;
}

struct Registry {
  std::map<std::string, std::pair<CatalogEntry, std::function<MapPair(const CatalogParams&)>>>
      pairs;
  std::map<std::string,
           std::pair<CatalogEntry, std::function<EvaluableMap(const CatalogParams&)>>>
      maps;
  std::mutex mu;
};

void populate(Registry& r) {
    auto add_pair = [&r](const std::string& name, bool inverse, const std::string& desc,
                         std::function<MapPair(const CatalogParams&)> factory) {
      r.pairs[name] = {CatalogEntry{name, true, inverse, desc}, std::move(factory)};
    };
    auto add_map = [&r](const std::string& name, const std::string& desc,
                        std::function<EvaluableMap(const CatalogParams&)> factory) {
      r.maps[name] = {CatalogEntry{name, false, false, desc}, std::move(factory)};
    };
    add_pair("identity-n", true, "identity on the unit ball of R^n (use identity-<n>)",
             [](const CatalogParams&) { return make_identity_pair(2); });
    add_pair("cube", true, "g = x^3, f = x^(1/3) on (-1,1); dg_0 is singular",
             make_cube_pair);
    add_pair("exp-log", true, "g = exp on (-1,1), f = log on (1/e, e)", make_exp_log_pair);
    add_pair("affine", true, "g = Ax + b with invertible A (default diag(2,3))",
             make_affine_pair);
    add_pair("poly2d", true, "2-D polynomial diffeomorphism (x1 + x2^2, x2)",
             make_poly2d_pair);
    add_pair("karcher-pair", true,
             "g = solve-for-Y, f = Karcher mean in the remaining operand",
             make_karcher_catalog_pair);
    add_pair("tsinlog-composite", false,
             "chain-rule scenario: embed into R^2 then t*sin(log t) on the first coordinate",
             make_tsinlog_composite_pair);
    add_map("tsinlog", "t*sin(log|t|), 0 at 0; multivalued derived set at the origin",
            make_tsinlog_map);
    add_map("karcher-g", "the g side of karcher-pair on flattened SPD coordinates",
            make_karcher_g_map);
}

Registry& registry() {
  static Registry* reg = [] {
    auto* r = new Registry;
    populate(*r);
    return r;
  }();
  return *reg;
}

}  // namespace

MapPair catalog_get(const std::string& name) { return catalog_get(name, CatalogParams{}); }

MapPair catalog_get(const std::string& name, const CatalogParams& params) {
  if (name.rfind("identity-", 0) == 0 && name != "identity-n") {
    const int n = std::atoi(name.c_str() + 9);
    if (n >= 1) return make_identity_pair(n);
    throw UnknownScenario("catalog_get: bad identity dimension in '" + name + "'");
  }
  Registry& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  auto it = r.pairs.find(name);
  if (it == r.pairs.end()) {
    throw UnknownScenario("catalog_get: unknown pair '" + name + "'");
  }
  return it->second.second(params);
}

EvaluableMap catalog_map(const std::string& name) { return catalog_map(name, CatalogParams{}); }

EvaluableMap catalog_map(const std::string& name, const CatalogParams& params) {
  Registry& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  auto it = r.maps.find(name);
  if (it != r.maps.end()) return it->second.second(params);
  // Fall back to the g side of a registered pair.
  auto pit = r.pairs.find(name);
  if (pit != r.pairs.end()) return pit->second.second(params).g;
  throw UnknownScenario("catalog_map: unknown map '" + name + "'");
}

std::vector<CatalogEntry> catalog_list() {
  Registry& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  std::vector<CatalogEntry> out;
  for (const auto& [name, e] : r.pairs) out.push_back(e.first);
  for (const auto& [name, e] : r.maps) out.push_back(e.first);
  return out;
}

void catalog_register_pair(const std::string& name, bool inverse_pair, std::string description,
                           std::function<MapPair(const CatalogParams&)> factory) {
  Registry& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  r.pairs[name] = {CatalogEntry{name, true, inverse_pair, std::move(description)},
                   std::move(factory)};
}

void catalog_register_map(const std::string& name, std::string description,
                          std::function<EvaluableMap(const CatalogParams&)> factory) {
  Registry& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  r.maps[name] = {CatalogEntry{name, false, false, std::move(description)},
                  std::move(factory)};
}

}  // namespace lipdiff
