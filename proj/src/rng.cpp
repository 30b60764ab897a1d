#include "arsgs/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace arsgs {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), state_(mix64(seed)) {}

RngStream RngStream::substream(std::uint64_t key) const {
  return RngStream(mix64(seed_ ^ ((key + 1) * kGamma)));
}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

int RngStream::categorical(const std::vector<double>& p) {
  if (p.empty()) throw std::invalid_argument("categorical: empty vector");
  const double u = uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(p.size()) - 1;
}

std::vector<double> RngStream::unit_sphere(int dim) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = normal();
      norm2 += v[i] * v[i];
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace arsgs
