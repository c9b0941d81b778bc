#pragma once

// Scenario files: one `key = value` per line, `#` starts a comment.
//
//   n = 500                       p = 4
//   replications = 2000           alpha = 0.05
//   seed = 20240601               beta = 0, 0.5
//   tests = independence, equicorr-free
//   generator = pure | contaminated | heavy-tailed
//   mean = 0, 0, 0, 0             (default zeros; one value broadcasts)
//   variances = 1, 1, 1, 1        (default ones; one value broadcasts)
//   correlation = identity | equicorr 0.3 | toeplitz 0.5 | <p*p values>
//   contamination.epsilon = 0.1
//   contamination.kind = point-mass | location-shift | scale-inflation
//   contamination.point = 5       contamination.shift = 3
//   contamination.scale = 9       heavy_tail.dof = 5
//   null.rho0 = 0.3               null.r0 = <same forms as correlation>
//   tolerance = 1e-10             max_iterations = 500   damping = 1

#include <istream>
#include <string>

#include "rao/sim_harness.hpp"

namespace rao::io {

ScenarioSpec parse_scenario(std::istream& in, const std::string& source);
ScenarioSpec read_scenario(const std::string& path);

}  // namespace rao::io
