#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qfg/factor_graph.hpp"

namespace qfg {

// Exhaustive ground truth over all 2^n assignments. Kept independent of the
// state-vector kernel on purpose: it anchors every other posterior in the
// project.
struct PosteriorTable {
  int num_variables = 0;
  std::vector<double> mass;          // unnormalized, indexed by assignment
  double p_total = 0.0;              // total mass
  std::vector<double> distribution;  // mass / p_total
  std::vector<std::uint64_t> ml_assignments;  // argmax set, ascending

  bool is_ml(std::uint64_t assignment) const;
  // Born marginal (p0, p1) of variable `index` under the normalized
  // distribution.
  std::pair<double, double> marginal(int index) const;
};

// mass(v) = prod_i prior_i(bit_i(v)) * prod_f |f entry at v|^2.
// Throws ResourceError above 20 variables and ContradictoryGraphError when
// the total mass vanishes.
PosteriorTable brute_force_posterior(const FactorGraph& graph);

// Assignment rendered as an x0-first bit string ("1101" = x0=1,x1=1,x2=0,x3=1).
std::string assignment_bits(std::uint64_t assignment, int num_variables);

}  // namespace qfg
