#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qfg/factor_graph.hpp"
#include "qfg/rng.hpp"
#include "qfg/state_vector.hpp"

namespace qfg {

enum class ActivationMode { kSample, kForceSuccess };

struct ActivationOutcome {
  std::string function_id;
  bool success = false;
  double p_success = 0.0;
  // On failure, the full qubit content of the merged block; empty on success.
  std::vector<QubitId> destroyed_qubits;
};

// Partition of the live qubits into disjoint entangled blocks, each owning
// one StateVector, with per-function completion status. A failed activation
// destroys the whole merged block: its qubits respawn as fresh a-priori
// singletons and every completed function touching them is reopened.
class EntanglementRegistry {
 public:
  explicit EntanglementRegistry(const FactorGraph& graph);

  ActivationOutcome activate(const std::string& function_id, ActivationMode mode,
                             Rng* rng = nullptr);

  const StateVector& block_of(const QubitId& id) const;
  std::vector<const StateVector*> blocks() const;

  bool is_completed(const std::string& function_id) const;
  bool all_completed() const;
  int attempt_count(const std::string& function_id) const;
  const std::map<std::string, int>& attempt_counts() const { return attempt_counts_; }

  // Reopens a completed function without touching any state.
  void force_pending(const std::string& function_id);

  int failure_streak(const QubitId& id) const;
  bool is_bad_flagged(const QubitId& id) const;

  const FactorGraph& graph() const { return *graph_; }

 private:
  StateVector prior_block(const QubitId& id) const;

  const FactorGraph* graph_;
  std::vector<std::optional<StateVector>> slots_;
  std::unordered_map<QubitId, int> slot_of_;
  std::set<std::string> completed_;
  std::map<std::string, int> attempt_counts_;
  std::unordered_map<QubitId, int> failure_streak_;
  std::set<QubitId> bad_flagged_;
  std::optional<int> bad_timeout_;
};

struct TickEvent {
  int tick = 0;
  std::string function_id;
  bool success = false;
  double p_success = 0.0;
  std::vector<QubitId> destroyed;
};

struct RunReport {
  bool completed = false;
  int total_ticks = 0;      // ticks actually executed
  int completion_tick = 0;  // tick at which the last function completed
  double cumulative_success_probability = 1.0;  // exact mode only
  std::uint64_t seed = 0;
  std::vector<TickEvent> events;  // populated only when requested
};

struct RunOptions {
  int max_ticks = 1000;
  bool record_events = false;
};

// Sampled schedule execution. Each tick every eligible pending function
// attempts activation once: all of them under a free schedule (in a seeded
// shuffled order), the earliest phase that still has pending functions under
// a phased one (so a closing node first fires the tick after its inputs
// complete). Runs until everything is completed or max_ticks is exhausted.
RunReport run_schedule_sampled(const FactorGraph& graph, Rng& rng,
                               const RunOptions& options);

// Activates every function once with forced success, in schedule order (or
// the order given), accumulating the product of per-activation success
// probabilities. That product is the single-shot global success probability
// and is invariant under reordering.
RunReport run_schedule_exact(const FactorGraph& graph);
RunReport run_schedule_exact(const FactorGraph& graph, std::span<const std::string> order);

// Tensors all priors, applies every f-diagonal once, and returns the total
// success mass with the normalized posterior state.
std::pair<double, StateVector> exact_posterior(const FactorGraph& graph);

struct InitOutcome {
  bool success = false;
  double p_success = 0.0;
  StateVector state;  // meaningful only on success
};

// Deterministic initialization: the target prior, with probability 1.
InitOutcome init_variable_ideal(const QubitId& id, Complex alpha, Complex beta);

// Repeat-until-success initialization: starts the qubit uniform, sieves with
// diag(alpha, beta), and measures the ancilla. Succeeds with probability 1/2,
// leaving exactly (alpha, beta).
InitOutcome init_variable_qpa(const QubitId& id, Complex alpha, Complex beta, Rng& rng);

}  // namespace qfg
