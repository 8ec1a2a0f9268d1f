#ifndef PLQN_RATE_HPP
#define PLQN_RATE_HPP

#include <string>
#include <vector>

namespace plqn {

/// Errors at or below this are roundoff and are not used.
inline constexpr double kRateFloor = 1e-14;

struct RateVerdict {
  enum class Kind { Quadratic, Superlinear, Linear, None };
  Kind kind = Kind::None;
  double rho = 0.0;       // linear: fitted contraction factor
  double q_const = 0.0;   // quadratic: mean of the last e_{k+1}/e_k^2 ratios
  int used = 0;           // usable errors
  std::string reason;
};

std::string to_string(const RateVerdict& v);

RateVerdict classify_rate(const std::vector<double>& errors);

}  // namespace plqn

#endif  // PLQN_RATE_HPP
