#pragma once

#include <string>
#include <string_view>

namespace porosplit {

/// Source rate as a function of time: either a constant or
/// scale * sin(omega * t + phase).
struct RateFunction {
  enum class Kind { constant, sine };

  Kind kind = Kind::constant;
  double scale = 0.0;
  double omega = 0.0;
  double phase = 0.0;

  static RateFunction constant(double value) { return {Kind::constant, value, 0.0, 0.0}; }
  static RateFunction sine(double scale, double omega, double phase = 0.0) {
    return {Kind::sine, scale, omega, phase};
  }

  double operator()(double t) const;
  bool operator==(const RateFunction&) const = default;

  /// Parses "2.5", "sin(pi*t/100)", "3*sin(0.1*t + 0.5)" and similar:
  /// an optional numeric factor times sin() of a linear expression in t
  /// whose terms are products/quotients of numbers, `pi` and at most one `t`.
  /// Throws std::invalid_argument with the offending text.
  static RateFunction parse(std::string_view text);
};

}  // namespace porosplit
