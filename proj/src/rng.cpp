#include "lipdiff/rng.hpp"

#include <cmath>

namespace lipdiff {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  return splitmix64(base ^ fnv1a(label));
}

double Rng::uniform(double a, double b) {
  std::uniform_real_distribution<double> dist(a, b);
  return dist(engine_);
}

double Rng::gauss() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

Vec Rng::unit_vector(int dim) {
  Vec v(dim);
  double n = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = gauss();
    n = v.norm();
  } while (n < 1e-12);
  return v / n;
}

Vec Rng::in_ball(const Vec& center, double radius) {
  const int dim = static_cast<int>(center.size());
  const Vec u = unit_vector(dim);
  const double r = radius * std::pow(uniform(0.0, 1.0), 1.0 / dim);
  return center + r * u;
}

}  // namespace lipdiff
