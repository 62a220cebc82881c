#include "twistecho/optimize.hpp"

#include <algorithm>
#include <stdexcept>

namespace twistecho {

Maximum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                double x_tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > x_tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

Maximum grid_then_refine(const std::function<double(double)>& f, const std::vector<double>& grid,
                         double x_tolerance) {
  if (grid.empty()) throw std::invalid_argument("grid_then_refine: empty grid");
  std::size_t best = 0;
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = f(grid[i]);
    if (values[i] > values[best]) best = i;
  }
  Maximum result{grid[best], values[best]};
  if (grid.size() < 2) return result;
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  const Maximum refined = golden_section_maximize(f, lo, hi, x_tolerance);
  if (refined.value > result.value) result = refined;
  return result;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  if (count == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = a + (b - a) * i / (count - 1);
  return out;
}

std::vector<double> logspace(double a, double b, int count) {
  std::vector<double> out = linspace(std::log(a), std::log(b), count);
  for (double& x : out) x = std::exp(x);
  return out;
}

}  // namespace twistecho
