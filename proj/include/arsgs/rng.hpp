#pragma once

#include <cstdint>
#include <vector>

namespace arsgs {

// Substream keys used by the samplers so that serial and parallel drivers
// consume identical, independent random streams.
enum class StreamId : std::uint64_t {
  Init = 1,     // starting location
  Chain = 2,    // Gibbs / Metropolis draws
  Adapter = 3,  // z0 / y0 initial unit vector
  Perturb = 4,  // power-iteration perturbations xi
};

// Splittable 64-bit generator in the SplitMix64 family: the state advances by
// a fixed odd increment and the output is a bijective hash of the counter.
// Substreams are derived from the construction seed and a key, never from the
// evolving state, so stream layout is independent of consumption order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream substream(std::uint64_t key) const;
  RngStream substream(StreamId id) const {
    return substream(static_cast<std::uint64_t>(id));
  }

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal (Box-Muller, one value cached).
  double normal();

  // Index in [0, p.size()) for a probability vector summing to one.
  int categorical(const std::vector<double>& p);

  // i.i.d. standard normal vector scaled to unit length.
  std::vector<double> unit_sphere(int dim);

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace arsgs
