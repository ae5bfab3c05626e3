#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lipdiff/func_core.hpp"

namespace lipdiff {

struct CatalogParams {
  std::optional<Mat> matrix;        // affine A
  std::optional<Vec> offset;        // affine b
  std::vector<Mat> fixed_operands;  // karcher-pair A_1..A_{n-1}
  std::optional<Mat> y0;            // karcher-pair variable operand
};

struct CatalogEntry {
  std::string name;
  bool is_pair = true;
  bool inverse_pair = true;  // pairs asserted to be true inverse homeomorphisms
  std::string description;
};

// Built-in pairs: identity-<n>, cube, exp-log, affine, poly2d, karcher-pair,
// tsinlog-composite (chain-rule scenario, not an inverse pair).
// Built-in standalone maps: tsinlog, karcher-g.
MapPair catalog_get(const std::string& name);
MapPair catalog_get(const std::string& name, const CatalogParams& params);
EvaluableMap catalog_map(const std::string& name);
EvaluableMap catalog_map(const std::string& name, const CatalogParams& params);
std::vector<CatalogEntry> catalog_list();

// Plugin hooks for user-defined evaluators.
void catalog_register_pair(const std::string& name, bool inverse_pair,
                           std::string description,
                           std::function<MapPair(const CatalogParams&)> factory);
void catalog_register_map(const std::string& name, std::string description,
                          std::function<EvaluableMap(const CatalogParams&)> factory);

// Scalar t sin(log|t|) with value 0 at t = 0; Lipschitz near 0 yet with a
// multivalued derived set there.
double tsinlog_scalar(double t);

}  // namespace lipdiff
