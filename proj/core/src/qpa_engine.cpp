#include "qfg/qpa_engine.hpp"

#include <algorithm>
#include <cmath>

#include "qfg/errors.hpp"

namespace qfg {

namespace {
const double kUniformAmp = std::sqrt(0.5);
}

EntanglementRegistry::EntanglementRegistry(const FactorGraph& graph) : graph_(&graph) {
  bad_timeout_ = graph.schedule().bad_qubit_timeout;
  slots_.reserve(graph.variables().size());
  for (const VariableNode& v : graph.variables()) {
    slot_of_[v.id] = static_cast<int>(slots_.size());
    slots_.emplace_back(v.prior_state());
  }
}

StateVector EntanglementRegistry::prior_block(const QubitId& id) const {
  if (bad_flagged_.count(id)) {
    return StateVector::single(id, Complex{kUniformAmp, 0.0}, Complex{kUniformAmp, 0.0});
  }
  return graph_->variable(id).prior_state();
}

const StateVector& EntanglementRegistry::block_of(const QubitId& id) const {
  auto it = slot_of_.find(id);
  if (it == slot_of_.end()) {
    throw InvalidArgumentError("unknown qubit \"" + id + "\"");
  }
  return *slots_[it->second];
}

std::vector<const StateVector*> EntanglementRegistry::blocks() const {
  std::vector<const StateVector*> out;
  for (const auto& slot : slots_) {
    if (slot) out.push_back(&*slot);
  }
  return out;
}

bool EntanglementRegistry::is_completed(const std::string& function_id) const {
  return completed_.count(function_id) > 0;
}

bool EntanglementRegistry::all_completed() const {
  return completed_.size() == graph_->functions().size();
}

int EntanglementRegistry::attempt_count(const std::string& function_id) const {
  auto it = attempt_counts_.find(function_id);
  return it == attempt_counts_.end() ? 0 : it->second;
}

void EntanglementRegistry::force_pending(const std::string& function_id) {
  graph_->function(function_id);  // validates the id
  completed_.erase(function_id);
}

int EntanglementRegistry::failure_streak(const QubitId& id) const {
  auto it = failure_streak_.find(id);
  return it == failure_streak_.end() ? 0 : it->second;
}

bool EntanglementRegistry::is_bad_flagged(const QubitId& id) const {
  return bad_flagged_.count(id) > 0;
}

ActivationOutcome EntanglementRegistry::activate(const std::string& function_id,
                                                 ActivationMode mode, Rng* rng) {
  const FunctionNode& node = graph_->function(function_id);
  if (is_completed(function_id)) {
    throw InvalidStateError("function \"" + function_id + "\" is already completed");
  }
  if (mode == ActivationMode::kSample && rng == nullptr) {
    throw InvalidArgumentError("sample-mode activation needs an RNG");
  }
  ++attempt_counts_[function_id];

  // Merge the blocks containing the scope qubits, in first-touch order.
  std::vector<int> merged_slots;
  for (const QubitId& q : node.scope) {
    auto it = slot_of_.find(q);
    if (it == slot_of_.end()) {
      throw InvalidArgumentError("function \"" + function_id +
                                 "\" touches unknown qubit \"" + q + "\"");
    }
    if (std::find(merged_slots.begin(), merged_slots.end(), it->second) ==
        merged_slots.end()) {
      merged_slots.push_back(it->second);
    }
  }
  StateVector merged = *slots_[merged_slots[0]];
  for (std::size_t i = 1; i < merged_slots.size(); ++i) {
    merged = tensor_product(merged, *slots_[merged_slots[i]]);
  }

  // Apply U_fg and measure the ancilla: the f-branch mass is the success
  // probability, the g-branch is discarded on failure.
  const StateVector sieved = apply_diagonal(merged, node.f_diag, node.scope);
  const double p_f = std::clamp(sieved.squared_norm(), 0.0, 1.0);

  bool success;
  if (mode == ActivationMode::kForceSuccess) {
    if (p_f < kImpossibleOutcomeThreshold) {
      throw ImpossibleOutcomeError("function \"" + function_id +
                                   "\" has an empty f-branch");
    }
    success = true;
  } else {
    success = bernoulli(*rng, p_f);
  }

  if (success) {
    for (const QubitId& q : merged.qubit_ids()) failure_streak_[q] = 0;
    const int home = merged_slots[0];
    for (std::size_t i = 1; i < merged_slots.size(); ++i) {
      slots_[merged_slots[i]].reset();
    }
    for (const QubitId& q : merged.qubit_ids()) slot_of_[q] = home;
    slots_[home] = sieved.normalized();
    completed_.insert(function_id);
    return ActivationOutcome{function_id, true, p_f, {}};
  }

  // Failure: the whole merged block is destroyed. Qubits respawn as fresh
  // a-priori singletons and every completed function touching them reopens.
  std::vector<QubitId> destroyed = merged.qubit_ids();
  for (const QubitId& q : destroyed) {
    const int streak = ++failure_streak_[q];
    if (bad_timeout_ && streak >= *bad_timeout_) bad_flagged_.insert(q);
  }
  slots_[merged_slots[0]].reset();
  for (std::size_t i = 1; i < merged_slots.size(); ++i) slots_[merged_slots[i]].reset();
  for (const QubitId& q : destroyed) {
    slot_of_[q] = static_cast<int>(slots_.size());
    slots_.emplace_back(prior_block(q));
  }
  for (const FunctionNode& f : graph_->functions()) {
    if (!is_completed(f.id)) continue;
    for (const QubitId& q : f.scope) {
      if (std::find(destroyed.begin(), destroyed.end(), q) != destroyed.end()) {
        completed_.erase(f.id);
        break;
      }
    }
  }
  return ActivationOutcome{function_id, false, p_f, std::move(destroyed)};
}

namespace {

// Pending functions eligible this tick, captured before any activation runs.
std::vector<std::string> eligible_functions(const FactorGraph& graph,
                                            const EntanglementRegistry& reg) {
  std::vector<std::string> out;
  if (graph.schedule().kind == ScheduleKind::kPhased) {
    for (const auto& phase : graph.schedule().phases) {
      for (const std::string& fid : phase) {
        if (!reg.is_completed(fid)) out.push_back(fid);
      }
      if (!out.empty()) return out;  // earliest phase with pending work
    }
    return out;
  }
  for (const FunctionNode& f : graph.functions()) {
    if (!reg.is_completed(f.id)) out.push_back(f.id);
  }
  return out;
}

}  // namespace

RunReport run_schedule_sampled(const FactorGraph& graph, Rng& rng,
                               const RunOptions& options) {
  EntanglementRegistry reg(graph);
  RunReport report;
  if (graph.functions().empty()) {
    report.completed = true;
    return report;
  }
  for (int tick = 1; tick <= options.max_ticks; ++tick) {
    report.total_ticks = tick;
    std::vector<std::string> order = eligible_functions(graph, reg);
    if (graph.schedule().kind == ScheduleKind::kFree) {
      std::shuffle(order.begin(), order.end(), rng);
    }
    for (const std::string& fid : order) {
      if (reg.is_completed(fid)) continue;  // reopened state is handled next tick
      ActivationOutcome outcome = reg.activate(fid, ActivationMode::kSample, &rng);
      if (options.record_events) {
        report.events.push_back(TickEvent{tick, outcome.function_id, outcome.success,
                                          outcome.p_success,
                                          std::move(outcome.destroyed_qubits)});
      }
    }
    if (reg.all_completed()) {
      report.completed = true;
      report.completion_tick = tick;
      return report;
    }
  }
  return report;
}

RunReport run_schedule_exact(const FactorGraph& graph) {
  const std::vector<std::string> order = graph.activation_order();
  return run_schedule_exact(graph, order);
}

RunReport run_schedule_exact(const FactorGraph& graph, std::span<const std::string> order) {
  EntanglementRegistry reg(graph);
  RunReport report;
  int step = 0;
  for (const std::string& fid : order) {
    ActivationOutcome outcome = reg.activate(fid, ActivationMode::kForceSuccess);
    report.cumulative_success_probability *= outcome.p_success;
    ++step;
  }
  report.total_ticks = step;
  report.completion_tick = step;
  report.completed = reg.all_completed();
  return report;
}

std::pair<double, StateVector> exact_posterior(const FactorGraph& graph) {
  if (graph.variables().size() > kMaxBlockQubits) {
    throw ResourceError("exact posterior is capped at " +
                        std::to_string(kMaxBlockQubits) + " qubits");
  }
  StateVector state;
  for (const VariableNode& v : graph.variables()) {
    state = tensor_product(state, v.prior_state());
  }
  for (const FunctionNode& f : graph.functions()) {
    state = apply_diagonal(state, f.f_diag, f.scope);
  }
  const double p_total = state.squared_norm();
  if (p_total < kImpossibleOutcomeThreshold) {
    throw ContradictoryGraphError("every assignment is sieved to zero mass");
  }
  return {p_total, state.normalized()};
}

InitOutcome init_variable_ideal(const QubitId& id, Complex alpha, Complex beta) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTolerance) {
    throw InvalidArgumentError("target amplitudes are not normalized");
  }
  return InitOutcome{true, 1.0, StateVector::single(id, alpha, beta)};
}

InitOutcome init_variable_qpa(const QubitId& id, Complex alpha, Complex beta, Rng& rng) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTolerance) {
    throw InvalidArgumentError("target amplitudes are not normalized");
  }
  const StateVector uniform =
      StateVector::single(id, Complex{kUniformAmp, 0.0}, Complex{kUniformAmp, 0.0});
  const DiagonalOperator f({alpha, beta});
  complement_diag(f);  // derivable complement is part of the construction contract
  const std::vector<QubitId> scope{id};
  const StateVector sieved = apply_diagonal(uniform, f, scope);
  const double p_f = sieved.squared_norm();
  if (!bernoulli(rng, p_f)) {
    return InitOutcome{false, p_f, StateVector()};
  }
  return InitOutcome{true, p_f, sieved.normalized()};
}

}  // namespace qfg
