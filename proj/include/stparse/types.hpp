#pragma once
// Shared scalar and vector aliases plus the error type used across the library.
#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace stparse {

using Scalar = double;
using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();
inline constexpr Scalar kPi = 3.14159265358979323846;

// Closed time interval [t0, t1] in seconds.
struct Interval {
  Scalar t0 = 0;
  Scalar t1 = 0;
  Scalar length() const { return t1 - t0; }
  bool contains(Scalar t) const { return t >= t0 && t <= t1; }
};

inline Interval overlap(const Interval& a, const Interval& b) {
  return {std::max(a.t0, b.t0), std::min(a.t1, b.t1)};
}

// Error with a stable machine-readable kind ("empty-group", "schema", ...)
// in addition to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(const std::string& kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(kind) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace stparse
