#include "symq/rng.hpp"

#include <stdexcept>

namespace symq {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng(split_seed(master, stream));
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double positive_normal(Rng& rng, double mean, double sigma) {
  if (!(mean > 0.0) || sigma < 0.0) {
    throw std::invalid_argument("positive_normal requires mean > 0 and sigma >= 0");
  }
  if (sigma == 0.0) return mean;
  std::normal_distribution<double> normal(mean, sigma);
  for (;;) {
    const double x = normal(rng);
    if (x > 0.0) return x;
  }
}

}  // namespace symq
