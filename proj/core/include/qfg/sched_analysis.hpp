#pragma once

#include <cstdint>
#include <vector>

#include "qfg/factor_graph.hpp"

namespace qfg {

// Two-phase restart process: independent parallel activations with
// single-attempt success probabilities p_i, then one closing activation that
// succeeds with conditional probability p'. A closing failure destroys
// everything and the process restarts from scratch.
struct TwoPhaseSpec {
  std::vector<double> parallel_probs;
  double final_conditional = 1.0;  // p'
  double joint_prob = 1.0;         // single-shot global success = p' * prod p_i
};

struct CompletionPoint {
  int t = 0;
  double p_e_paper = 0.0;    // exact-t completion, unordered-partition form
  double p_e_renewal = 0.0;  // exact-t completion, ordered renewal convolution
  double p_m_paper = 0.0;    // running sums
  double p_m_renewal = 0.0;
  double p_nondist = 0.0;    // 1 - (1 - joint)^t
  // Complements computed directly, stable far past the point where the
  // cumulative curves saturate to 1 in double precision.
  double survival_renewal = 1.0;
  double survival_nondist = 1.0;
};

struct CompletionCurve {
  TwoPhaseSpec spec;
  std::vector<CompletionPoint> points;  // t = 1 .. t_max
};

// All unordered partitions of k as nonincreasing part lists; D(0) = {[]}.
// Capped at k = 60.
std::vector<std::vector<int>> integer_partitions(int k);

// Probability that the last of the parallel nodes completes exactly at
// attempt q: prod_i F_i(q) - prod_i F_i(q-1) with F_i(q) = 1 - (1-p_i)^q.
// Equals the two-node 3-term and three-node 7-term inclusion-exclusion
// expansions term by term.
double parallel_exact_at(const TwoPhaseSpec& spec, int q);

// Closed-form completion curves up to t_max (<= 200): the
// unordered-partition form and the ordered renewal convolution side by
// side, plus the non-distributed single-shot baseline.
CompletionCurve completion_curve(const TwoPhaseSpec& spec, int t_max);

// Derives a TwoPhaseSpec from a phased graph (any number of leading phases
// flattened into the parallel set, exactly one closing function): p_i is the
// f-branch mass of each parallel node on its own priors, joint is the
// full-graph oracle mass, p' = joint / prod p_i.
TwoPhaseSpec spec_from_graph(const FactorGraph& graph);

struct EmpiricalPoint {
  int t = 0;
  std::uint64_t completions_at = 0;
  double p_e = 0.0;
  double p_m = 0.0;
  double stderr_m = 0.0;  // binomial standard error of p_m
};

struct EmpiricalCurve {
  int trials = 0;
  std::uint64_t master_seed = 0;
  std::vector<EmpiricalPoint> points;  // t = 1 .. t_max
};

// First-completion distribution of the sampled schedule, over independent
// trials with per-trial RNG streams derived from the master seed. Results
// are identical for any worker count.
EmpiricalCurve monte_carlo_completion(const FactorGraph& graph, int t_max, int trials,
                                      std::uint64_t master_seed, int num_workers = 0);

}  // namespace qfg
