#pragma once

#include <cstdint>

namespace sgdlab {

// Counter-based Gaussian noise: the draw at (seed, replica, step, coord) is a
// pure function of those indices, so replicas can be replayed exactly and
// methods can share one underlying noise path.
struct NoiseModel {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  double scale = 1.0;  // 0 gives the deterministic (noiseless) degeneracy

  // normal draw with standard deviation `scale`
  double gaussian(std::uint64_t step, std::uint32_t coord) const;

  // uniform in (0,1)
  double uniform(std::uint64_t step, std::uint32_t coord) const;
};

// Inverse standard normal CDF (Wichura's AS241, double precision).
double inverse_normal_cdf(double p);

}  // namespace sgdlab
