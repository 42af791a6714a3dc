#pragma once

#include <array>
#include <string>
#include <vector>

#include "qfg/factor_graph.hpp"

namespace qfg {

// Classical sum-product state: per-variable beliefs plus the raw message
// tables, indexed [function][slot in that function's scope].
struct BeliefState {
  std::vector<std::array<double, 2>> beliefs;  // graph variable order
  std::vector<std::vector<std::array<double, 2>>> var_to_fn;
  std::vector<std::vector<std::array<double, 2>>> fn_to_var;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

// Flooding-schedule sum-product with function weights |f_k|^2, uniform
// initial messages, no damping, and normalization after every message.
// Stops when the max-norm message change drops below tol.
BeliefState run_spa(const FactorGraph& graph, int max_iters = 200, double tol = 1e-9);

// Per-variable argmax as an x0-first bit string; an exact tie resolves to 0.
std::string hard_decision(const BeliefState& beliefs);

}  // namespace qfg
