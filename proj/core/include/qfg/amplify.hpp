#pragma once

#include <cstdint>
#include <vector>

#include "qfg/state_vector.hpp"

namespace qfg {

// Analytic amplification record at level k for a qubit with base probability
// alpha^2:
//   r       = alpha^(2^k) + beta^(2^k)
//   gamma   = probability of preparing the 2^k-th element power from 2^k
//             independently prepared copies (gamma_0 = 1)
//   p_ml    = probability that measuring the level-k state reads the ML bit
//   p_a     = success probability of the next amplification step
struct AmplificationStep {
  int k = 0;
  double gamma = 1.0;
  double p_ml = 1.0;
  double p_a = 1.0;
  double r = 1.0;
};

struct AmplificationProfile {
  double alpha_sq = 1.0;
  std::vector<AmplificationStep> steps;  // k = 0 .. k_max
};

// Permutation on dim^2 indices that pulls the diagonal of the two-register
// joint index to the front: output j (second register zero) reads input
// (j, j); the remaining outputs read the remaining inputs in ascending
// order, which never affects the all-zeros postselection.
PermutationOperator diag_extraction_perm(std::uint64_t dim);

struct AmplifyStepResult {
  double p_a = 0.0;           // probability of reading all-zeros on copy two
  StateVector amplified;      // element-square of the input, renormalized
};

// One ML-amplification step: element-wise squaring via two copies, the
// diagonal-extraction permutation, and postselection on the second copy
// reading all zeros. p_a = sum_v |state_v|^4, amplified_v = state_v^2 / sqrt(p_a).
AmplifyStepResult amplify_step(const StateVector& state);

// gamma_k / P_Mk / p_ak curves from the closed-form recurrences, computed in
// log space so deep levels neither overflow nor divide by underflowed zeros.
AmplificationProfile gamma_profile(double alpha_sq, int k_max);

// Expected number of base preparations to reach level k:
// N_0 = 1, N_j = (2 / p_a_{j-1}) N_{j-1}.
double expected_copies(const StateVector& state, int k);

}  // namespace qfg
