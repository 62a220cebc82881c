#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace twistecho {

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [a, b],
/// stopping when the bracket is narrower than `x_tolerance`.
Maximum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                double x_tolerance);

/// Evaluates f on `grid` (sorted ascending), then refines with golden
/// section between the neighbours of the best sample. The returned value is
/// never below the best grid sample. Deterministic.
Maximum grid_then_refine(const std::function<double(double)>& f, const std::vector<double>& grid,
                         double x_tolerance);

std::vector<double> linspace(double a, double b, int count);
std::vector<double> logspace(double a, double b, int count);

}  // namespace twistecho
