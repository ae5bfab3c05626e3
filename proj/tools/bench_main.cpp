// Compares the serial reference kernels against the OpenMP kernels on the
// toolkit's real workloads and checks the results agree bitwise.

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "lipdiff/catalog.hpp"
#include "lipdiff/derived_set.hpp"
#include "lipdiff/karcher.hpp"
#include "lipdiff/regularity.hpp"
#include "lipdiff/rng.hpp"

using namespace lipdiff;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Case {
  const char* name;
  std::function<double(par::Exec)> run;  // returns a checksum
};

Mat seeded_spd(Rng& rng, int d) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.gauss();
  Eigen::HouseholderQR<Mat> qr(a);
  const Mat q = qr.householderQ();
  Vec vals(d);
  for (int i = 0; i < d; ++i) vals[i] = rng.uniform(0.5, 2.0);
  return q * vals.asDiagonal() * q.transpose();
}

}  // namespace

int main() {
  std::vector<Case> cases;

  {
    const MapPair poly = catalog_get("poly2d");
    Vec center(2);
    center << 0.2, 0.3;
    cases.push_back({"lipschitz poly2d 8192 pairs x 3 radii", [=](par::Exec exec) {
                       MapPair p = poly;
                       return reg::lipschitz_estimate(p.f, center, {1e-1, 1e-2, 1e-3}, 8192,
                                                      7, Norm::Euclidean, exec)
                           .max_estimate;
                     }});
  }
  {
    const MapPair pair = catalog_get("karcher-pair");
    cases.push_back({"lipschitz karcher-f 96 pairs x 2 radii", [=](par::Exec exec) {
                       MapPair p = pair;
                       const Vec y0 = p.f.domain.center;
                       const double m = p.f.domain.margin(y0);
                       return reg::lipschitz_estimate(p.f, y0, {0.4 * m, 0.04 * m}, 96, 7,
                                                      Norm::Euclidean, exec)
                           .max_estimate;
                     }});
  }
  {
    const MapPair poly = catalog_get("poly2d");
    Vec x(2);
    x << 0.1, -0.4;
    const Mat j = reg::fd_jacobian(poly.g, x).jacobian;
    cases.push_back({"frechet poly2d 4096 sphere samples x 4 radii", [=](par::Exec exec) {
                       auto curve =
                           reg::frechet_residual(poly.g, x, j, {1e-1, 1e-2, 1e-3, 1e-4}, 4096,
                                                 7, Norm::Euclidean, exec);
                       double sum = 0;
                       for (auto& [r, v] : curve) sum += v;
                       return sum;
                     }});
  }
  {
    Rng rng(13);
    std::vector<Mat> ops;
    for (int i = 0; i < 3; ++i) ops.push_back(seeded_spd(rng, 4));
    const MapPair pair = spd::make_karcher_pair({{ops[0], ops[1]}, ops[2]});
    const Vec y = pair.f.domain.center;
    const Vec v = Vec::Ones(y.size()).normalized();
    const double t0 = 0.1 * pair.f.domain.margin(y);
    const derived::StepSchedule schedule(t0, 0.9, 256);
    cases.push_back({"derived-set karcher-f 256 solver steps", [=](par::Exec exec) {
                       auto s = derived::derived_set_estimate(pair.f, y, v, schedule,
                                                              1e-3, exec);
                       return s.hull_hi.sum() - s.hull_lo.sum();
                     }});
  }
  {
    Rng rng(11);
    std::vector<Mat> ops;
    for (int i = 0; i < 3; ++i) ops.push_back(seeded_spd(rng, 5));
    MapPair pair = spd::make_karcher_pair({{ops[0], ops[1]}, ops[2]});
    cases.push_back({"inverse check karcher pair d=5, 64 samples", [=](par::Exec exec) {
                       MapPair p = pair;
                       auto rep = check_inverse_pair(p, 64, 1e-8, 7, Norm::Euclidean, exec);
                       return rep.max_fg_residual + rep.max_gf_residual;
                     }});
  }

  std::printf("%-48s %12s %12s %8s %s\n", "kernel", "serial ms", "parallel ms", "speedup",
              "bitwise");
  for (const Case& c : cases) {
    auto t0 = std::chrono::steady_clock::now();
    const double serial = c.run(par::Exec::Serial);
    const double serial_ms = ms_since(t0);
    t0 = std::chrono::steady_clock::now();
    const double parallel = c.run(par::Exec::Parallel);
    const double parallel_ms = ms_since(t0);
    std::printf("%-48s %12.2f %12.2f %7.2fx %s\n", c.name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, serial == parallel ? "ok" : "MISMATCH");
  }
  return 0;
}
