#include "amw/arrivals.hpp"

#include <cmath>

namespace amw {

namespace {

double truncated_mean(double theta, int a_max) {
  double p = 1.0, z = 1.0, m = 0.0;
  for (int k = 1; k <= a_max; ++k) {
    p *= theta / k;
    z += p;
    m += k * p;
  }
  return m / z;
}

}  // namespace

double truncated_poisson_parameter(double mean, int a_max) {
  if (mean <= 0.0) return 0.0;
  if (mean >= a_max) throw Error(ErrorCode::BadTraffic, "truncated mean must be below a_max");
  // The truncated mean is increasing in theta; bracket then bisect.
  double lo = 0.0, hi = 1.0;
  while (truncated_mean(hi, a_max) < mean) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (truncated_mean(mid, a_max) < mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ArrivalSampler::ArrivalSampler(const TrafficSpec& spec, std::uint64_t seed)
    : n_(spec.n()), family_(spec.family) {
  validate_traffic(spec);
  entries_.reserve(static_cast<std::size_t>(n_) * n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      Entry e;
      e.gen = rng::Xoshiro256StarStar(
          rng::substream_seed(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
      e.lambda = spec.lambda(i, j);
      switch (family_) {
        case ArrivalFamily::Poisson:
          e.p0 = std::exp(-e.lambda);
          break;
        case ArrivalFamily::Bernoulli:
          e.p0 = e.lambda;
          break;
        case ArrivalFamily::TruncatedPoisson: {
          const int a_max = *spec.a_max;
          const double theta = truncated_poisson_parameter(e.lambda, a_max);
          std::vector<double> pmf(static_cast<std::size_t>(a_max) + 1);
          pmf[0] = 1.0;
          double z = 1.0;
          for (int k = 1; k <= a_max; ++k) {
            pmf[static_cast<std::size_t>(k)] = pmf[static_cast<std::size_t>(k) - 1] * theta / k;
            z += pmf[static_cast<std::size_t>(k)];
          }
          double acc = 0.0;
          for (auto& p : pmf) {
            acc += p / z;
            e.cdf.push_back(acc);
          }
          e.cdf.back() = 1.0;
          break;
        }
      }
      entries_.push_back(std::move(e));
    }
  }
}

std::int64_t ArrivalSampler::draw(Entry& e) const noexcept {
  if (e.lambda <= 0.0) return 0;
  const double u = e.gen.uniform();
  switch (family_) {
    case ArrivalFamily::Poisson: {
      // Sequential inversion; lambda < 1 here, so this terminates in a few steps.
      std::int64_t k = 0;
      double p = e.p0;
      double f = p;
      while (u >= f) {
        ++k;
        p *= e.lambda / static_cast<double>(k);
        const double next = f + p;
        if (next == f) break;  // the tail underflowed
        f = next;
      }
      return k;
    }
    case ArrivalFamily::Bernoulli:
      return u < e.p0 ? 1 : 0;
    case ArrivalFamily::TruncatedPoisson: {
      std::int64_t k = 0;
      while (u >= e.cdf[static_cast<std::size_t>(k)]) ++k;
      return k;
    }
  }
  return 0;
}

void ArrivalSampler::sample(IntMatrix& out) {
  if (out.n() != n_) out = IntMatrix(n_);
  auto flat = out.flat();
  for (std::size_t k = 0; k < entries_.size(); ++k) flat[k] = draw(entries_[k]);
}

IntMatrix ArrivalSampler::sample() {
  IntMatrix out(n_);
  sample(out);
  return out;
}

}  // namespace amw
