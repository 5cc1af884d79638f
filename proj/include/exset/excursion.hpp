#pragma once

#include "exset/design.hpp"
#include "exset/errors.hpp"

namespace exset {

enum class ExcursionDirection { Above, Below };

/// The response range of interest: {Z >= t} (Above) or {Z <= t} (Below).
struct ExcursionSpec {
  double threshold = 0.0;
  ExcursionDirection direction = ExcursionDirection::Above;

  /// Sign that maps the Below case onto the Above form by negating field and
  /// threshold.
  double sign() const { return direction == ExcursionDirection::Above ? 1.0 : -1.0; }
};

/// Quasi-Monte Carlo integration nodes carrying the uniform measure on the
/// domain; integrals are total_mass times the node mean.
struct IntegrationMeasure {
  Design nodes;
  double total_mass = 1.0;

  void validate() const {
    if (nodes.size() == 0) throw DimensionError("integration measure: empty node set");
    if (!(total_mass > 0.0)) throw DimensionError("integration measure: mass must be > 0");
  }
};

inline IntegrationMeasure uniform_sobol_measure(int d, Eigen::Index nodes = 2048) {
  return IntegrationMeasure{sobol(d, nodes, 0), 1.0};
}

}  // namespace exset
