#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistecho/runner.hpp"

namespace twistecho {

/// One output table: the rows of every series, in series order.
struct FigurePanel {
  std::string name;
  std::vector<RunConfig> series;
};

struct FigureOptions {
  /// Caps every atom number of the recipe (desk-scale runs).
  std::optional<int> max_n;
  int threads = 0;
  bool timestamp = true;
};

const std::vector<std::string>& figure_names();

/// Panels of a recipe with the caption parameters as defaults. Throws
/// ConfigError for unknown recipes.
std::vector<FigurePanel> figure_panels(const std::string& recipe, const FigureOptions& options = {});

/// Runs a recipe and writes one CSV per panel into out_dir (created when
/// missing). Returns the written paths.
std::vector<std::string> write_figure(const std::string& recipe, const std::string& out_dir,
                                      const FigureOptions& options = {});

}  // namespace twistecho
