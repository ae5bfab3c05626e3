#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "lipdiff/func_core.hpp"

namespace lipdiff {

// Splittable seeding: every randomized sub-procedure derives its own seed
// from a base seed plus a stable label, so adding a pipeline stage never
// perturbs the randomness of earlier stages.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double a, double b);
  double gauss();
  Vec unit_vector(int dim);
  Vec in_ball(const Vec& center, double radius);

 private:
  std::mt19937_64 engine_;
};

}  // namespace lipdiff
