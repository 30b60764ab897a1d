#pragma once

#include <stdexcept>
#include <string>

namespace arsgs {

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what)
      : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
  explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct ZeroVector : std::runtime_error {
  explicit ZeroVector(const std::string& what) : std::runtime_error(what) {}
};

struct SingularBlock : std::runtime_error {
  explicit SingularBlock(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidEpsilon : std::runtime_error {
  explicit InvalidEpsilon(const std::string& what)
      : std::runtime_error(what) {}
};

struct ZeroDirection : std::runtime_error {
  explicit ZeroDirection(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalUnderflow : std::runtime_error {
  explicit NumericalUnderflow(const std::string& what)
      : std::runtime_error(what) {}
};

struct ZeroVariance : std::runtime_error {
  explicit ZeroVariance(const std::string& what) : std::runtime_error(what) {}
};

struct TooShort : std::runtime_error {
  explicit TooShort(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arsgs
