#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/zeta.hpp>

#include "skillgraph/error.hpp"
#include "skillgraph/graph.hpp"

namespace skillgraph {

double hurwitz_zeta(double s, std::size_t q) {
  if (!(s > 1.0) || q < 1) throw Error(ErrorCode::InvalidArgument, "zeta", "need s > 1 and q >= 1");
  double value = boost::math::zeta(s);
  for (std::size_t k = 1; k < q; ++k) value -= std::pow(static_cast<double>(k), -s);
  return value;
}

double fit_power_law(std::span<const std::size_t> degrees, std::size_t x_min) {
  if (x_min < 1) throw Error(ErrorCode::InvalidArgument, "x_min", "x_min must be >= 1");
  std::vector<std::size_t> tail;
  for (auto d : degrees)
    if (d >= x_min) tail.push_back(d);
  if (tail.size() < 10) throw Error(ErrorCode::TooFewPoints, std::to_string(tail.size()), "need >= 10 values >= x_min");
  if (std::all_of(tail.begin(), tail.end(), [&](std::size_t d) { return d == tail.front(); }))
    throw Error(ErrorCode::DegenerateSample, std::to_string(tail.front()), "all degrees are equal");

  double sum_log = 0.0;
  for (auto d : tail) sum_log += std::log(static_cast<double>(d));
  const double n = static_cast<double>(tail.size());
  // Negative log-likelihood is convex in gamma; golden-section search.
  auto nll = [&](double gamma) { return gamma * sum_log + n * std::log(hurwitz_zeta(gamma, x_min)); };
  double lo = 1.0 + 1e-6, hi = 20.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = nll(a), fb = nll(b);
  while (hi - lo > 1e-9) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = nll(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = nll(b);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace skillgraph
