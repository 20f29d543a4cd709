// Shared scalar types, error hierarchy and small numeric helpers used
// across the library.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace aschern {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

// Raised when a resolvent on the integration contour becomes numerically
// singular, i.e. the spectrum touches the circle |lambda - 1| = 1/2.
class ContourPierced : public Error {
 public:
  explicit ContourPierced(const std::string& what) : Error(what) {}
};

class InvalidCocycle : public Error {
 public:
  explicit InvalidCocycle(const std::string& what) : Error(what) {}
};

class ConfigError : public Error {
 public:
  ConfigError(std::string pointer_, const std::string& what)
      : Error(pointer_ + ": " + what), pointer(std::move(pointer_)) {}
  std::string pointer;  // JSON-pointer-style location of the offending field
};

// L2 operator norm of a dense complex matrix (largest singular value).
double op_norm(const Mat& m);

// Deterministic, platform-independent RNG (splitmix64).  Used wherever a
// value ends up in a frozen fixture or a report, so results do not depend on
// the standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free multiply-shift; bias is negligible for desk-scale n.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

// Runs fn(i) for i in [0, n) on a few threads.  Each index writes disjoint
// state, so results are deterministic regardless of scheduling.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace aschern
