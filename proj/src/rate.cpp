#include "plqn/rate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace plqn {

std::string to_string(const RateVerdict& v) {
  switch (v.kind) {
    case RateVerdict::Kind::Quadratic:
      return "quadratic";
    case RateVerdict::Kind::Superlinear:
      return "superlinear";
    case RateVerdict::Kind::Linear: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "linear(%.3g)", v.rho);
      return buf;
    }
    case RateVerdict::Kind::None:
      return "none";
  }
  return "none";
}

RateVerdict classify_rate(const std::vector<double>& errors) {
  RateVerdict v;
  std::vector<double> e;
  for (double x : errors) {
    if (!(x > kRateFloor) || !std::isfinite(x)) break;
    e.push_back(x);
  }
  v.used = static_cast<int>(e.size());
  if (e.size() < 4) {
    v.reason = "fewer than 4 errors above the roundoff floor";
    return v;
  }
  std::vector<double> r;
  std::vector<double> q;
  for (size_t i = 0; i + 1 < e.size(); ++i) {
    r.push_back(e[i + 1] / e[i]);
    q.push_back(e[i + 1] / (e[i] * e[i]));
  }
  const size_t nr = r.size();

  const auto qlast = std::vector<double>(q.end() - 3, q.end());
  const double qmax = *std::max_element(qlast.begin(), qlast.end());
  const double qmin = *std::min_element(qlast.begin(), qlast.end());
  if (qmax <= 10.0 * qmin && r.back() < 1e-2) {
    v.kind = RateVerdict::Kind::Quadratic;
    v.q_const = (qlast[0] + qlast[1] + qlast[2]) / 3.0;
    v.reason = "last three e+/e^2 ratios within a factor 10 and e+/e below 1e-2";
    return v;
  }

  if (r[nr - 3] > r[nr - 2] && r[nr - 2] > r[nr - 1] && r[nr - 1] <= 0.5 * r[nr - 3] && r[nr - 1] < 1.0) {
    v.kind = RateVerdict::Kind::Superlinear;
    v.reason = "last three e+/e ratios strictly decreasing, final at most half the first";
    return v;
  }

  const size_t w = std::min<size_t>(5, nr);
  double logsum = 0.0;
  for (size_t i = nr - w; i < nr; ++i) logsum += std::log(r[i]);
  const double rho = std::exp(logsum / static_cast<double>(w));
  bool band = rho < 1.0;
  for (size_t i = nr - w; i < nr && band; ++i) band = r[i] >= 0.5 * rho && r[i] <= 2.0 * rho;
  if (band) {
    v.kind = RateVerdict::Kind::Linear;
    v.rho = rho;
    v.reason = "last ratios within [rho/2, 2 rho]";
    return v;
  }
  v.reason = "no rate pattern matched";
  return v;
}

}  // namespace plqn
