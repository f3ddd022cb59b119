#pragma once

#include <cstdint>
#include <vector>

#include "amw/model.hpp"
#include "amw/rng.hpp"

namespace amw {

/// Draws a(t) entrywise from per-queue substreams. Sampling is by CDF
/// inversion, so a given seed always yields the same trace.
class ArrivalSampler {
 public:
  ArrivalSampler(const TrafficSpec& spec, std::uint64_t seed);

  void sample(IntMatrix& out);
  IntMatrix sample();

  int n() const noexcept { return n_; }

 private:
  struct Entry {
    rng::Xoshiro256StarStar gen;
    double p0 = 0.0;          ///< Poisson: e^-lambda; Bernoulli: success probability
    double lambda = 0.0;
    std::vector<double> cdf;  ///< truncated family only
  };

  std::int64_t draw(Entry& e) const noexcept;

  int n_;
  ArrivalFamily family_;
  std::vector<Entry> entries_;
};

/// Parameter theta such that Poisson(theta) conditioned on {0..a_max} has mean `mean`.
double truncated_poisson_parameter(double mean, int a_max);

}  // namespace amw
